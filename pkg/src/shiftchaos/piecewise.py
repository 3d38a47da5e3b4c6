"""Piecewise exp-times-polynomial functions on [0, inf) with exact breakpoints.

A :class:`Segment` on ``[start, end)`` has the value

    c * base**(A + B*tau + C*tau**2) * exp(gamma*tau) * P(tau),   tau = t - start

Breakpoints and the weight exponents ``A, B, C`` are :class:`fractions.Fraction`
so translating by the step ``a`` and multiplying by powers of the operator
weight are exact bookkeeping; floating point enters only through ``c``,
``gamma`` and the polynomial.

Overlapping segments are allowed and add up. A :class:`PiecewiseFn` may end in
a :class:`GeometricTail`, a repeated block whose copies are produced by a fixed
generator (translate, multiply by ``weight_base**(alpha*t + beta)``, scale by
``ratio``).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import comb

import numpy as np

from . import _kernels

D_MAX = 4
INF = math.inf
EPS_CONT = 1e-10


class IncommensurateStep(ValueError):
    """A step or breakpoint is not a small exact rational."""


class IncompatibleTails(ValueError):
    """Two infinite tails with different block structure were combined."""


def to_rational(x, name="value"):
    """Exact rational from an int, Fraction, ``"k/q"`` string or an exactly
    representable float such as ``0.25``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError as exc:
            raise IncommensurateStep(f"{name}={x!r} is not a rational") from exc
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            raise IncommensurateStep(f"{name}={x!r} is not finite")
        fr = Fraction(x).limit_denominator(10**6)
        if float(fr) != x:
            raise IncommensurateStep(f"{name}={x!r} is not a grid rational")
        return fr
    raise TypeError(f"cannot read {name}={x!r} as a rational")


def _breakpoint(x, name):
    if x == INF or (isinstance(x, str) and x.strip().lower() in ("inf", "+inf")):
        return INF
    return to_rational(x, name)


def fmt_rational(x):
    if x == INF:
        return "inf"
    return f"{x.numerator}/{x.denominator}"


def _wpow(base, expo):
    """``base**expo`` for an exact rational exponent."""
    if expo == 0:
        return 1.0 + 0.0j
    if expo.denominator == 1:
        return complex(base) ** int(expo)
    return complex(math.exp(float(expo) * math.log(base.real)))


def _log_base(base):
    return cmath.log(base) if base.imag or base.real <= 0 else complex(math.log(base.real))


def _taylor_shift(poly, d):
    """Coefficients of ``P(tau + d)`` from those of ``P(tau)``."""
    d = float(d)
    n = len(poly)
    return tuple(
        sum(poly[i] * comb(i, k) * d ** (i - k) for i in range(k, n)) for k in range(n)
    )


def _strip(poly):
    poly = [complex(v) for v in poly]
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly) if poly else (0j,)


@dataclass(frozen=True)
class Space:
    """Ambient space: ``Space("Lp", p)`` or ``Space("C0")``."""

    kind: str
    p: float | None = None

    def __post_init__(self):
        if self.kind not in ("Lp", "C0"):
            raise ValueError(f"unknown space {self.kind!r}")
        if self.kind == "Lp":
            if self.p is None or not self.p >= 1 or not math.isfinite(self.p):
                raise ValueError(f"Lp needs 1 <= p < inf, got {self.p!r}")
            object.__setattr__(self, "p", float(self.p))
        elif self.p is not None:
            raise ValueError("C0 takes no exponent")

    @classmethod
    def parse(cls, text):
        if isinstance(text, Space):
            return text
        s = str(text).strip()
        if s.lower() == "c0":
            return cls("C0")
        head, _, tail = s.partition(":")
        if head.lower() != "lp" or not tail:
            raise ValueError(f"space must be 'Lp:<p>' or 'C0', got {text!r}")
        return cls("Lp", float(tail))

    @property
    def is_c0(self):
        return self.kind == "C0"

    def __str__(self):
        if self.is_c0:
            return "C0"
        p = self.p
        return f"Lp:{int(p)}" if p == int(p) else f"Lp:{p!r}"


@dataclass(frozen=True)
class Segment:
    start: Fraction
    end: Fraction | float
    c: complex = 1.0
    gamma: complex = 0.0
    poly: tuple = (1.0,)
    base: complex = 1.0
    A: Fraction = Fraction(0)
    B: Fraction = Fraction(0)
    C: Fraction = Fraction(0)

    def __post_init__(self):
        start = to_rational(self.start, "start")
        end = _breakpoint(self.end, "end")
        if not start < end:
            raise ValueError(f"empty segment [{start}, {end})")
        poly = _strip(self.poly)
        if len(poly) > D_MAX + 1:
            raise ValueError(f"polynomial degree {len(poly) - 1} exceeds {D_MAX}")
        A, B, C = (to_rational(v, n) for v, n in ((self.A, "A"), (self.B, "B"), (self.C, "C")))
        base = complex(self.base)
        if A == 0 and B == 0 and C == 0:
            base = 1.0 + 0.0j
        if base == 0:
            raise ValueError("weight base must be nonzero")
        if base.imag != 0 or base.real < 0:
            if B or C or A.denominator != 1:
                raise ValueError("a non-positive or complex weight base takes integer constant powers only")
        if end == INF and len(poly) > 1:
            raise ValueError("unbounded segments carry a constant polynomial")
        set_ = object.__setattr__
        set_(self, "start", start)
        set_(self, "end", end)
        set_(self, "c", complex(self.c))
        set_(self, "gamma", complex(self.gamma))
        set_(self, "poly", poly)
        set_(self, "base", base)
        set_(self, "A", A)
        set_(self, "B", B)
        set_(self, "C", C)

    # numeric views -----------------------------------------------------

    @property
    def scale(self):
        return self.c * _wpow(self.base, self.A)

    @property
    def rate(self):
        """Linear log-rate in tau (complex)."""
        if self.B == 0:
            return self.gamma
        return self.gamma + float(self.B) * _log_base(self.base)

    @property
    def curvature(self):
        """Quadratic log-rate in tau (real)."""
        if self.C == 0:
            return 0.0
        return float(self.C) * math.log(self.base.real)

    @property
    def is_zero(self):
        return self.c == 0 or all(v == 0 for v in self.poly)

    @property
    def trivial_weight(self):
        return self.A == 0 and self.B == 0 and self.C == 0

    def value(self, t):
        tau = float(t) - float(self.start)
        acc = 0j
        for coef in reversed(self.poly):
            acc = acc * tau + coef
        return self.scale * cmath.exp(self.rate * tau + self.curvature * tau * tau) * acc

    def covers(self, t, side="right"):
        if side == "right":
            return self.start <= t < self.end
        return self.start < t <= self.end

    # structural transforms ---------------------------------------------

    def moved(self, delta):
        return replace(self, start=self.start + delta, end=self.end + delta)

    def reanchored(self, new_start):
        """Same function, local variable restarted at ``new_start``."""
        d = new_start - self.start
        if d == 0:
            return self
        c = self.c * cmath.exp(self.gamma * float(d)) if self.gamma else self.c
        return replace(
            self,
            start=new_start,
            c=c,
            poly=_taylor_shift(self.poly, d),
            A=self.A + self.B * d + self.C * d * d,
            B=self.B + 2 * self.C * d,
        )

    def clipped(self, lo, hi):
        """Restriction to ``[lo, hi)``; ``None`` when empty."""
        start, end = max(self.start, lo), min(self.end, hi)
        if not start < end:
            return None
        seg = self.reanchored(start) if start != self.start else self
        return replace(seg, end=end) if end != seg.end else seg

    def weighted(self, base, alpha, beta):
        """Multiply by ``base**(alpha*t + beta)`` (t global)."""
        base = complex(base)
        if alpha == 0 and beta == 0:
            return self
        if self.trivial_weight or self.base == base:
            return replace(self, base=base, A=self.A + alpha * self.start + beta, B=self.B + alpha)
        if alpha:
            lb = math.log(base.real)
            return replace(
                self,
                c=self.c * math.exp(lb * float(alpha * self.start + beta)),
                gamma=self.gamma + float(alpha) * lb,
            )
        return replace(self, c=self.c * _wpow(base, beta))

    def scaled(self, c=1.0, gamma=0.0):
        """Multiply by ``c * exp(gamma*t)`` (t global)."""
        c, gamma = complex(c), complex(gamma)
        if gamma == 0:
            return replace(self, c=self.c * c)
        return replace(
            self, c=self.c * c * cmath.exp(gamma * float(self.start)), gamma=self.gamma + gamma
        )

    # serialization -------------------------------------------------------

    def to_dict(self):
        d = {
            "start": fmt_rational(self.start),
            "end": fmt_rational(self.end),
            "c": [self.c.real, self.c.imag],
            "gamma": [self.gamma.real, self.gamma.imag],
            "poly": [[v.real, v.imag] for v in self.poly],
        }
        if not self.trivial_weight:
            d["weight"] = {
                "base": [self.base.real, self.base.imag],
                "A": fmt_rational(self.A),
                "B": fmt_rational(self.B),
                "C": fmt_rational(self.C),
            }
        return d

    @classmethod
    def from_dict(cls, d):
        wt = d.get("weight") or {}
        return cls(
            start=d["start"],
            end=d["end"],
            c=_cplx(d.get("c", 1.0)),
            gamma=_cplx(d.get("gamma", 0.0)),
            poly=tuple(_cplx(v) for v in d.get("poly", [1.0])),
            base=_cplx(wt.get("base", 1.0)),
            A=wt.get("A", 0),
            B=wt.get("B", 0),
            C=wt.get("C", 0),
        )


def _cplx(v):
    if isinstance(v, (list, tuple)):
        re, im = v
        return complex(re, im)
    return complex(v)


def _sort_key(s):
    return (
        s.start,
        s.end,
        s.gamma.real,
        s.gamma.imag,
        s.base.real,
        s.base.imag,
        s.A,
        s.B,
        s.C,
        s.c.real,
        s.c.imag,
        tuple((v.real, v.imag) for v in s.poly),
    )


def _merge_key(s):
    return (s.start, s.end, s.gamma, s.base, s.A, s.B, s.C)


def canonical(segments):
    """Sorted, zero-free segment tuple; pieces with the same interval and
    exponent structure are combined by adding their polynomials."""
    groups = {}
    for s in segments:
        if s.is_zero:
            continue
        groups.setdefault(_merge_key(s), []).append(s)
    out = []
    for group in groups.values():
        if len(group) == 1:
            out.append(group[0])
            continue
        n = max(len(s.poly) for s in group)
        poly = [0j] * n
        for s in group:
            for i, v in enumerate(s.poly):
                poly[i] += s.c * v
        merged = replace(group[0], c=1.0, poly=tuple(poly))
        if not merged.is_zero:
            out.append(merged)
    out.sort(key=_sort_key)
    return tuple(out)


@dataclass(frozen=True)
class GeometricTail:
    """Blocks ``j = 0, 1, ...`` with block 0 = ``base`` and

        block[j+1](t) = ratio * weight_base**(alpha*t + beta) * block[j](t - period)

    ``count=None`` means infinitely many blocks.
    """

    base: tuple
    period: Fraction
    ratio: complex = 1.0
    weight_base: complex = 1.0
    alpha: Fraction = Fraction(0)
    beta: Fraction = Fraction(0)
    count: int | None = None

    def __post_init__(self):
        base = canonical(self.base)
        if not base:
            raise ValueError("tail base block is empty")
        if any(s.end == INF for s in base):
            raise ValueError("tail base block must be bounded")
        period = to_rational(self.period, "period")
        if period <= 0:
            raise ValueError("tail period must be positive")
        if self.count is not None and self.count < 1:
            raise ValueError("tail count must be >= 1")
        alpha, beta = to_rational(self.alpha, "alpha"), to_rational(self.beta, "beta")
        wb = complex(self.weight_base)
        if alpha == 0 and beta == 0:
            wb = 1.0 + 0.0j
        if (wb.imag != 0 or wb.real <= 0) and (alpha or beta.denominator != 1):
            raise ValueError("complex tail weight base takes integer constant powers only")
        set_ = object.__setattr__
        set_(self, "base", base)
        set_(self, "period", period)
        set_(self, "ratio", complex(self.ratio))
        set_(self, "weight_base", wb)
        set_(self, "alpha", alpha)
        set_(self, "beta", beta)

    @property
    def origin(self):
        return min(s.start for s in self.base)

    @property
    def width(self):
        return max(s.end for s in self.base) - self.origin

    def generator(self):
        return (self.period, self.ratio, self.weight_base, self.alpha, self.beta, self.count)

    def step(self, segs):
        """Apply the block generator once."""
        out = []
        for s in segs:
            s = s.moved(self.period).weighted(self.weight_base, self.alpha, self.beta)
            if self.ratio != 1:
                s = replace(s, c=s.c * self.ratio)
            out.append(s)
        return tuple(out)

    def blocks(self, k):
        """First ``k`` blocks (capped by ``count``) as a list of segment tuples."""
        if self.count is not None:
            k = min(k, self.count)
        out, cur = [], self.base
        for _ in range(k):
            out.append(cur)
            cur = self.step(cur)
        return out

    def advance(self):
        """Split off block 0; returns ``(block0, remaining tail or None)``."""
        if self.count == 1:
            return self.base, None
        nxt = canonical(self.step(self.base))
        count = None if self.count is None else self.count - 1
        if not nxt:
            return self.base, None
        return self.base, replace(self, base=nxt, count=count)

    def moved(self, delta):
        return replace(
            self, base=tuple(s.moved(delta) for s in self.base), beta=self.beta - self.alpha * delta
        )

    def to_dict(self):
        return {
            "base": [s.to_dict() for s in self.base],
            "period": fmt_rational(self.period),
            "ratio": [self.ratio.real, self.ratio.imag],
            "weight_base": [self.weight_base.real, self.weight_base.imag],
            "alpha": fmt_rational(self.alpha),
            "beta": fmt_rational(self.beta),
            "count": self.count,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            base=tuple(Segment.from_dict(s) for s in d["base"]),
            period=d["period"],
            ratio=_cplx(d.get("ratio", 1.0)),
            weight_base=_cplx(d.get("weight_base", 1.0)),
            alpha=d.get("alpha", 0),
            beta=d.get("beta", 0),
            count=d.get("count"),
        )


@dataclass(frozen=True)
class PiecewiseFn:
    segments: tuple = ()
    tail: GeometricTail | None = None
    space: Space | None = None

    def __post_init__(self):
        segs = canonical(self.segments)
        if any(s.start < 0 for s in segs):
            raise ValueError("segments must lie in [0, inf)")
        object.__setattr__(self, "segments", segs)
        if self.space is not None and not isinstance(self.space, Space):
            object.__setattr__(self, "space", Space.parse(self.space))
        if self.tail is not None and self.tail.origin < 0:
            raise ValueError("tail must lie in [0, inf)")

    def __call__(self, t, side="right"):
        return evaluate(self, t, side)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, exp_scale(other, -1.0))

    def __neg__(self):
        return exp_scale(self, -1.0)

    def __mul__(self, scalar):
        return exp_scale(self, scalar)

    __rmul__ = __mul__

    @property
    def is_finite(self):
        """Eventually zero: no infinite tail, no unbounded segment."""
        if any(s.end == INF for s in self.segments):
            return False
        return self.tail is None or self.tail.count is not None

    @property
    def is_zero(self):
        return not self.segments and self.tail is None

    def with_space(self, space):
        return replace(self, space=None if space is None else Space.parse(space))

    def to_dict(self):
        return {
            "frame": "local",
            "segments": [s.to_dict() for s in self.segments],
            "tail": None if self.tail is None else self.tail.to_dict(),
            "space": None if self.space is None else str(self.space),
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("frame", "local") != "local":
            raise ValueError("only the local-anchor frame is supported")
        tail = d.get("tail")
        return cls(
            segments=tuple(Segment.from_dict(s) for s in d.get("segments", [])),
            tail=None if tail is None else GeometricTail.from_dict(tail),
            space=d.get("space"),
        )


# ------------------------------------------------------------ constructors


def zero(space=None):
    return PiecewiseFn((), None, space)


def indicator(lo, hi, space=None, height=1.0):
    lo, hi = to_rational(lo), _breakpoint(hi, "hi")
    return PiecewiseFn((Segment(lo, hi, c=height),), None, space)


def ramp(lo, hi, v0, v1, space=None):
    """Linear piece from ``v0`` at ``lo`` to ``v1`` at ``hi``."""
    lo, hi = to_rational(lo), to_rational(hi)
    if hi <= lo:
        raise ValueError(f"empty interval [{lo}, {hi})")
    slope = (complex(v1) - complex(v0)) / float(hi - lo)
    return PiecewiseFn((Segment(lo, hi, poly=(v0, slope)),), None, space)


def hat(lo, hi, height=1.0, peak=None, space="C0"):
    """Continuous tent vanishing at ``lo`` and ``hi``."""
    lo, hi = to_rational(lo), to_rational(hi)
    peak = (lo + hi) / 2 if peak is None else to_rational(peak)
    return add(ramp(lo, peak, 0.0, height), ramp(peak, hi, height, 0.0)).with_space(space)


def exponential(lo, hi, rate, c=1.0, space=None):
    """``c * exp(rate * (t - lo))`` on ``[lo, hi)``."""
    return PiecewiseFn((Segment(to_rational(lo), _breakpoint(hi, "hi"), c=c, gamma=rate),), None, space)


# ------------------------------------------------------------- evaluation


def _tail_blocks_at(tail, t):
    """Blocks of ``tail`` whose support may contain ``t``."""
    if t < tail.origin:
        return []
    j_hi = math.floor((t - tail.origin) / tail.period)
    j_lo = max(0, math.ceil((t - tail.origin - tail.width) / tail.period))
    if tail.count is not None:
        j_hi = min(j_hi, tail.count - 1)
    if j_hi < j_lo:
        return []
    blocks = tail.blocks(j_hi + 1)
    return [s for b in blocks[j_lo:] for s in b]


def evaluate(f, t, side="right"):
    """Value at ``t >= 0``; ``side='left'`` gives the left limit."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    segs = list(f.segments)
    if f.tail is not None:
        segs.extend(_tail_blocks_at(f.tail, t))
    total = 0j
    for s in segs:
        if s.covers(t, side):
            total += s.value(t)
    return total


def pack(segments):
    """Struct-of-arrays view used by the compiled kernels."""
    n = len(segments)
    s0 = np.empty(n)
    s1 = np.empty(n)
    k0 = np.empty(n, dtype=np.complex128)
    k1 = np.empty(n, dtype=np.complex128)
    k2 = np.empty(n)
    poly = np.zeros((n, D_MAX + 1), dtype=np.complex128)
    for j, s in enumerate(segments):
        s0[j] = float(s.start)
        s1[j] = float(s.end)
        k0[j] = s.scale
        k1[j] = s.rate
        k2[j] = s.curvature
        poly[j, : len(s.poly)] = s.poly
    return s0, s1, k0, k1, k2, poly


def evaluate_many(f, ts):
    """Vectorized right-continuous evaluation."""
    ts = np.asarray(ts, dtype=np.float64)
    g = f
    if f.tail is not None:
        tmax = float(ts.max()) if ts.size else 0.0
        k = max(1, math.floor((tmax - float(f.tail.origin)) / float(f.tail.period)) + 2)
        g = materialize_tail(f, k)
    return _kernels.eval_segments(ts, *pack(g.segments))


# ------------------------------------------------------------- operations


def _shift_segment_left(s, a):
    s = s.moved(-a)
    if s.end <= 0:
        return None
    if s.start < 0:
        s = s.reanchored(Fraction(0))
    return s


def _step_rational(a):
    a = to_rational(a, "step")
    if a <= 0:
        raise ValueError("step must be positive")
    return a


def shift_left(f, a):
    """``g(t) = f(t + a)``; the part pushed below 0 is discarded."""
    a = _step_rational(a)
    head = list(f.segments)
    tail = f.tail
    while tail is not None and tail.origin < a:
        block, tail = tail.advance()
        head.extend(block)
    segs = [g for g in (_shift_segment_left(s, a) for s in head) if g is not None]
    return PiecewiseFn(tuple(segs), None if tail is None else tail.moved(-a), f.space)


def shift_right(f, d):
    """``g(t) = f(t - d)`` for ``t >= d`` and 0 before."""
    d = _step_rational(d)
    tail = None if f.tail is None else f.tail.moved(d)
    return PiecewiseFn(tuple(s.moved(d) for s in f.segments), tail, f.space)


def exp_scale(f, c=1.0, gamma=0.0):
    """``g(t) = c * exp(gamma*t) * f(t)``."""
    c, gamma = complex(c), complex(gamma)
    if c == 1 and gamma == 0:
        return f
    tail = f.tail
    if tail is not None:
        ratio = tail.ratio * cmath.exp(gamma * float(tail.period)) if gamma else tail.ratio
        tail = replace(tail, base=tuple(s.scaled(c, gamma) for s in tail.base), ratio=ratio)
        if c == 0:
            tail = None
    return PiecewiseFn(tuple(s.scaled(c, gamma) for s in f.segments), tail, f.space)


def weight(f, base, alpha=0, beta=0):
    """``g(t) = base**(alpha*t + beta) * f(t)`` with exact rational exponents."""
    alpha, beta = to_rational(alpha, "alpha"), to_rational(beta, "beta")
    base = complex(base)
    tail = f.tail
    if tail is not None:
        new_base = tuple(s.weighted(base, alpha, beta) for s in tail.base)
        if alpha == 0:
            tail = replace(tail, base=new_base)
        elif tail.weight_base == base or (tail.alpha == 0 and tail.beta == 0):
            tail = replace(tail, base=new_base, weight_base=base, beta=tail.beta + alpha * tail.period)
        else:
            lb = math.log(base.real)
            ratio = tail.ratio * math.exp(lb * float(alpha * tail.period))
            tail = replace(tail, base=new_base, ratio=ratio)
    return PiecewiseFn(tuple(s.weighted(base, alpha, beta) for s in f.segments), tail, f.space)


def _merge_tails(t1, t2):
    """Combine two tails; returns ``(extra_head_segments, tail)``."""
    extra = []
    if t1.generator() == t2.generator():
        aligned = t1.count is None and (t1.origin - t2.origin) % t1.period == 0
        while aligned and t1 is not None and t2 is not None and t1.origin != t2.origin:
            if t1.origin < t2.origin:
                block, t1 = t1.advance()
            else:
                block, t2 = t2.advance()
            extra.extend(block)
        if t1 is None or t2 is None:
            return extra, t1 or t2
        if t1.origin == t2.origin:
            base = canonical(t1.base + t2.base)
            return extra, (replace(t1, base=base) if base else None)
    for t in (t1, t2):
        if t.count is not None:
            other = t2 if t is t1 else t1
            extra.extend(s for b in t.blocks(t.count) for s in b)
            return extra, other
    raise IncompatibleTails("both tails are infinite with different block structure")


def add(f, g):
    """Pointwise sum."""
    if f.tail is None or g.tail is None:
        tail = f.tail or g.tail
        extra = []
    else:
        extra, tail = _merge_tails(f.tail, g.tail)
    space = f.space if f.space is not None else g.space
    return PiecewiseFn(f.segments + g.segments + tuple(extra), tail, space)


def support_end(f):
    """Least ``b`` with ``f == 0`` on ``[b, inf)``."""
    ends = [s.end for s in f.segments]
    if f.tail is not None:
        t = f.tail
        ends.append(INF if t.count is None else t.origin + (t.count - 1) * t.period + t.width)
    return max(ends, default=Fraction(0))


def materialize_tail(f, k):
    """Expand the first ``k`` tail blocks into explicit segments and drop the rest.

    Use :func:`shiftchaos.norms.tail_remainder_bound` for the size of what
    was dropped.
    """
    if f.tail is None:
        return f
    if k < 1:
        raise ValueError("materialize at least one block")
    blocks = f.tail.blocks(k)
    return PiecewiseFn(f.segments + tuple(s for b in blocks for s in b), None, f.space)


def settle(f):
    """Peel tail blocks into the head until the head ends before the tail."""
    if f.tail is None:
        return f
    head = list(f.segments)
    tail = f.tail
    end = max((s.end for s in head), default=Fraction(0))
    while tail is not None and tail.origin < end:
        block, tail = tail.advance()
        head.extend(block)
        end = max(end, max(s.end for s in block))
    return PiecewiseFn(tuple(head), tail, f.space)


def restrict(f, hi):
    """``f`` times the indicator of ``[0, hi)``."""
    hi = to_rational(hi, "hi")
    g = f
    if f.tail is not None:
        k = 1 if f.tail.origin >= hi else math.ceil((hi - f.tail.origin) / f.tail.period) + 1
        g = materialize_tail(f, k)
    segs = [c for c in (s.clipped(Fraction(0), hi) for s in g.segments) if c is not None]
    return PiecewiseFn(tuple(segs), None, f.space)


def breakpoints(f, blocks=0):
    """Sorted distinct breakpoints of the head and of the first ``blocks`` tail blocks."""
    g = materialize_tail(f, blocks) if f.tail is not None and blocks else f
    pts = set()
    for s in g.segments:
        pts.add(s.start)
        if s.end != INF:
            pts.add(s.end)
    return sorted(pts)


def continuity_defects(f, blocks=4):
    """Breakpoints where the left and right limits differ by more than
    ``EPS_CONT * (1 + local scale)``; returns ``[(t, left, right), ...]``.

    Jumps at the end of the materialized range are not reported for tails.
    """
    g = materialize_tail(f, blocks) if f.tail is not None else f
    out = []
    last = support_end(g)
    for t in breakpoints(g):
        if t == 0:
            continue
        if f.tail is not None and t == last:
            continue
        left = evaluate(g, t, "left")
        right = evaluate(g, t, "right")
        if abs(left - right) > EPS_CONT * (1.0 + max(abs(left), abs(right))):
            out.append((t, left, right))
    return out


def is_continuous(f, blocks=4):
    return not continuity_defects(f, blocks)
