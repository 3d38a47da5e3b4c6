"""Weighted backward shifts ``T`` on Lp(0, inf) and C0[0, inf), their powers and
right inverses.

Bounded kind:    (T x)(t) = w x(t + a),        |w| > 1
Unbounded kind:  (T x)(t) = w**t x(t + a),     w > 1 real

Everything acts exactly on the segment algebra of :mod:`shiftchaos.piecewise`;
weights are carried as rational exponents of ``w`` so that ``T S x == x`` holds
structurally.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .piecewise import (
    INF,
    PiecewiseFn,
    Segment,
    Space,
    add,
    continuity_defects,
    evaluate,
    restrict,
    settle,
    shift_left,
    shift_right,
    to_rational,
    weight,
)


class InvalidSpec(ValueError):
    pass


class NotInDomain(ValueError):
    pass


class NotEventuallyZero(ValueError):
    pass


class ContinuityViolation(ValueError):
    pass


class IndexTooSmall(ValueError):
    pass


_COMPLEX_RE = re.compile(
    r"^\s*(?P<re>[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)?"
    r"\s*(?:(?P<sign>[+-])\s*(?P<im>(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)?\s*[ij])?\s*$"
)


def parse_complex(text) -> complex:
    """Read ``"2"``, ``"1.5-0.5i"``, ``"2i"`` or ``"3+1j"``."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    if isinstance(text, (list, tuple)):
        return complex(float(text[0]), float(text[1]))
    s = str(text).strip().replace(" ", "")
    if s.endswith(("i", "j")) and not any(ch in s[1:] for ch in "+-"):
        body = s[:-1]
        body = "1" if body in ("", "+") else "-1" if body == "-" else body
        return complex(0.0, float(body))
    m = _COMPLEX_RE.match(s)
    if not m or (m.group("re") is None and m.group("sign") is None):
        raise ValueError(f"cannot parse complex number {text!r}")
    re_part = float(m.group("re") or 0.0)
    im_part = 0.0
    if m.group("sign"):
        im_part = float(m.group("im") or 1.0) * (-1 if m.group("sign") == "-" else 1)
    return complex(re_part, im_part)


@dataclass(frozen=True)
class ShiftSpec:
    space: Space
    kind: str
    w: complex
    a: Fraction

    def __post_init__(self):
        space = Space.parse(self.space)
        if self.kind not in ("bounded", "unbounded"):
            raise InvalidSpec(f"kind must be 'bounded' or 'unbounded', got {self.kind!r}")
        w = parse_complex(self.w)
        if not (math.isfinite(w.real) and math.isfinite(w.imag)):
            raise InvalidSpec("w must be finite")
        if self.kind == "bounded" and not abs(w) > 1:
            raise InvalidSpec(f"bounded kind needs |w| > 1, got |w| = {abs(w):g}")
        if self.kind == "unbounded" and not (w.imag == 0 and w.real > 1):
            raise InvalidSpec(f"unbounded kind needs real w > 1, got {w}")
        try:
            a = to_rational(self.a, "a")
        except (ValueError, TypeError) as exc:
            raise InvalidSpec(str(exc)) from exc
        if a <= 0:
            raise InvalidSpec("step a must be positive")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "a", a)

    @property
    def bounded(self):
        return self.kind == "bounded"

    @property
    def log_w(self):
        """``ln|w|``."""
        return math.log(abs(self.w))

    def to_dict(self):
        return {
            "space": str(self.space),
            "kind": self.kind,
            "w": [self.w.real, self.w.imag],
            "a": f"{self.a.numerator}/{self.a.denominator}",
        }

    @classmethod
    def from_dict(cls, d):
        return cls(Space.parse(d["space"]), d["kind"], parse_complex(d["w"]), d["a"])


@dataclass(frozen=True)
class DomainVerdict:
    in_domain: bool
    witness: str

    def __bool__(self):
        return self.in_domain


# ------------------------------------------------------------ domain


def _segment_verdict(spec, s, n):
    if s.curvature < 0:
        return True, f"segment at {s.start} decays log-quadratically"
    if s.curvature > 0:
        return False, f"segment at {s.start} grows log-quadratically"
    if s.gamma == 0 and s.base == spec.w:
        net = s.B + n
        return net < 0, f"segment at {s.start}: w-exponent rate {s.B} + {n} = {net}"
    if s.gamma == 0 and s.trivial_weight:
        return False, f"segment at {s.start}: constant times w^({n}t) does not decay"
    net = s.rate.real + n * spec.log_w
    return net < 0, f"segment at {s.start}: log-rate {s.rate.real:.17g} + {n}*ln w = {net:.17g}"


def _tail_verdict(spec, tail, n):
    if tail.count is not None:
        return True, "tail has finitely many blocks"
    w = complex(spec.w)
    if tail.weight_base == w or (tail.alpha == 0 and tail.beta == 0):
        alpha = tail.alpha + n
        beta = tail.beta + n * tail.period
        if alpha < 0:
            return True, f"tail block weights decay like w^(-{-alpha} j^2 L/2)"
        if alpha > 0:
            return False, "tail block weights grow quadratically in the exponent"
        rate = math.log(abs(tail.ratio)) + float(beta) * spec.log_w if tail.ratio else -math.inf
        return rate < 0, f"tail block ratio log = {rate:.17g}"
    lwb = math.log(abs(tail.weight_base))
    slope = float(tail.alpha) * lwb
    if slope < 0:
        return True, "tail block weights decay log-quadratically"
    if slope > 0:
        return False, "tail block weights grow log-quadratically"
    if tail.ratio == 0:
        return True, "tail ratio is zero"
    rate = math.log(abs(tail.ratio)) + float(tail.beta) * lwb + n * float(tail.period) * spec.log_w
    return rate < 0, f"tail block ratio log = {rate:.17g}"


def in_domain(spec: ShiftSpec, f: PiecewiseFn, n: int = 1) -> DomainVerdict:
    """Whether ``T**n f`` lies in the space, decided from the exponent laws."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if spec.bounded or n == 0:
        return DomainVerdict(True, "bounded operator" if spec.bounded else "n = 0")
    if f.is_finite:
        return DomainVerdict(True, "eventually zero")
    for s in f.segments:
        if s.end == INF:
            ok, why = _segment_verdict(spec, s, n)
            if not ok:
                return DomainVerdict(False, why)
    if f.tail is not None:
        ok, why = _tail_verdict(spec, f.tail, n)
        if not ok:
            return DomainVerdict(False, why)
    return DomainVerdict(True, "all unbounded pieces decay after weighting")


def _require_domain(spec, f, n):
    verdict = in_domain(spec, f, n)
    if not verdict:
        raise NotInDomain(verdict.witness)


# ------------------------------------------------------------ T and its powers


def apply(spec: ShiftSpec, f: PiecewiseFn) -> PiecewiseFn:
    return apply_power(spec, f, 1)


def apply_power(spec: ShiftSpec, f: PiecewiseFn, n: int) -> PiecewiseFn:
    """Closed form of ``T**n``:
    bounded ``w**n f(t + na)``, unbounded ``w**(nt + (n-1)na/2) f(t + na)``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return f
    _require_domain(spec, f, n)
    g = shift_left(f, n * spec.a)
    if spec.bounded:
        return weight(g, spec.w, 0, n)
    return weight(g, spec.w, n, Fraction(n - 1) * n * spec.a / 2)


def apply_sequential(spec, f, n):
    """``T`` applied ``n`` times one step at a time."""
    for _ in range(n):
        f = apply(spec, f)
    return f


# ------------------------------------------------------------ right inverses


def _require_finite(f):
    if not f.is_finite:
        raise NotEventuallyZero("right inverse is defined on eventually-zero functions")


def _ramp_block(spec, f, n):
    """Transitional piece of ``S**n`` in C0: the ramp ``f(0)/a * tau`` built by the
    first application, carried through the remaining ``n - 1`` steps."""
    f0 = evaluate(f, Fraction(0))
    if f0 == 0:
        return None
    a = spec.a
    lo = (n - 1) * a
    seg = Segment(lo, lo + a, c=f0 / float(a), poly=(0.0, 1.0))
    if spec.bounded:
        return seg.weighted(spec.w, 0, -n)
    return seg.weighted(spec.w, -(n - 1), Fraction(n - 1) * n * a / 2) if n > 1 else seg


def right_inverse(spec: ShiftSpec, f: PiecewiseFn) -> PiecewiseFn:
    return right_inverse_power(spec, f, 1)


def right_inverse_power(spec: ShiftSpec, f: PiecewiseFn, n: int) -> PiecewiseFn:
    """Closed form of ``S**n`` with ``T S = I`` on eventually-zero functions.

    Lp: bounded ``w**-n f(t - na)``, unbounded ``w**(-nt + n(n+1)a/2) f(t - na)``.
    C0 additionally carries the ramp block on ``[(n-1)a, na)`` that keeps the
    result continuous at 0.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    _require_finite(f)
    if n == 0:
        return f
    a = spec.a
    g = shift_right(f, n * a)
    if spec.bounded:
        g = weight(g, spec.w, 0, -n)
    else:
        g = weight(g, spec.w, -n, Fraction(n) * (n + 1) * a / 2)
    if spec.space.is_c0:
        block = _ramp_block(spec, f, n)
        if block is not None:
            g = add(g, PiecewiseFn((block,), None, g.space))
    return g


def right_inverse_sequential(spec, f, n):
    for _ in range(n):
        f = right_inverse(spec, f)
    return f


def s_power_bound(spec: ShiftSpec, f_norm: float, f0: complex, n: int) -> float:
    """Upper bound on ``||S**n f||`` from ``||f||`` and ``f(0)``.

    Lp and the tail part in C0 obey ``w**(-n(n-1)a/2) ||f||`` (``|w|**-n ||f||``
    for the bounded kind). The C0 ramp block adds
    ``|f(0)| * max_s s * w**(-(n-1)a((n-2)/2 + s))`` over ``s`` in ``[0, 1]``.
    """
    if spec.bounded:
        return abs(spec.w) ** (-n) * f_norm
    a = float(spec.a)
    lw = spec.log_w
    main = math.exp(-lw * n * (n - 1) * a / 2) * f_norm
    if not spec.space.is_c0 or f0 == 0 or n == 0:
        return main
    beta = (n - 1) * a * lw
    peak = math.exp(-1.0) / beta if beta > 1 else math.exp(-beta)
    ramp = abs(f0) * math.exp(-lw * (n - 1) * (n - 2) * a / 2) * peak
    return max(main, ramp)


def s_power_bound_simple(spec, n):
    """The factor ``w**(-n(n-1)a/2)`` (``|w|**-n`` bounded)."""
    if spec.bounded:
        return abs(spec.w) ** (-n)
    return math.exp(-spec.log_w * n * (n - 1) * float(spec.a) / 2)


# ------------------------------------------------------------ kernels, witnesses


def kernel_element(spec: ShiftSpec, N: int, profile: PiecewiseFn) -> PiecewiseFn:
    """``profile`` restricted to ``[0, N a)``; lies in ``ker T**N``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if not profile.is_finite:
        raise NotEventuallyZero("kernel profiles must be eventually zero")
    f = restrict(profile, N * spec.a).with_space(spec.space)
    if spec.space.is_c0:
        bad = continuity_defects(f)
        if bad:
            t, left, right = bad[0]
            raise ContinuityViolation(f"jump at t={t}: {left} -> {right}")
    return f


@dataclass(frozen=True)
class UnboundednessWitness:
    fn: PiecewiseFn
    lower_bound: float
    n: int
    m: int
    threshold: str
    bound_form: str

    def __iter__(self):
        return iter((self.fn, self.lower_bound))


def unboundedness_witness(spec: ShiftSpec, n: int, m: int) -> UnboundednessWitness:
    """Unit-norm ``e_m`` with ``||T**n e_m|| >= lower_bound`` growing in ``m``.

    Lp: ``e_m`` is the indicator of ``[m, m+1)``, needs ``m >= na``, bound
    ``w**(n(m - na) + (n-1)na/2)``.
    C0: ``e_m`` is 1 on ``[0, ma)`` and ``w**(-(t - ma)**2)`` after, needs
    ``m >= n``, bound ``w**(n(ma - na) + (n-1)na/2)`` (value at ``t = ma - na``).
    """
    if spec.bounded:
        raise InvalidSpec("bounded shifts have no unboundedness witness")
    if n < 1:
        raise ValueError("n must be >= 1")
    a = spec.a
    half = Fraction(n - 1) * n * a / 2
    if spec.space.is_c0:
        if m < n:
            raise IndexTooSmall(f"C0 witness needs m >= n, got m={m}, n={n}")
        ma = m * a
        segs = (Segment(0, ma), Segment(ma, INF, base=spec.w, C=-1))
        expo = n * (ma - n * a) + half
        form = "w^(n(ma-na)+(n-1)na/2)"
        threshold = "m >= n"
    else:
        if m < n * a:
            raise IndexTooSmall(f"Lp witness needs m >= n a, got m={m}, n a={n * a}")
        segs = (Segment(m, m + 1),)
        expo = n * (m - n * a) + half
        form = "w^(n(m-na)+(n-1)na/2)"
        threshold = "m >= n a"
    bound = math.exp(spec.log_w * float(expo))
    return UnboundednessWitness(PiecewiseFn(segs, None, spec.space), bound, n, m, threshold, form)
