"""L_p and sup norms of :class:`~shiftchaos.piecewise.PiecewiseFn` with error bounds.

Constant and pure-exponential pieces integrate in closed form, everything else
goes through adaptive 15-point Gauss-Legendre. Geometric tails are summed in
closed form when their blocks are disjoint scaled translates; other tails are
truncated and the dropped blocks bounded by a log-concave majorant.

``err_bound`` values are analytic/heuristic certificates, not outward-rounded
enclosures.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import brentq, minimize_scalar
from scipy.special import erfcx

from . import _kernels
from .piecewise import (
    INF,
    PiecewiseFn,
    Space,
    add,
    exp_scale,
    materialize_tail,
    pack,
    settle,
)

DEFAULT_TOL = 1e-10
MAX_DEPTH = 40
MAX_PANELS = 200_000
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(15)
_EPS = float(np.finfo(float).eps)

CLOSED_FORM = "ClosedForm"
QUADRATURE = "Quadrature"
TAIL_SERIES = "TailSeries"
SAMPLED = "Sampled"


class DivergentNorm(ArithmeticError):
    """The norm is infinite (tail or unbounded piece does not decay)."""


class ToleranceNotMet(ArithmeticError):
    """Adaptive quadrature ran out of depth before reaching the tolerance."""


@dataclass(frozen=True)
class NormResult:
    value: float
    err_bound: float
    method: str

    def __post_init__(self):
        if self.err_bound < 0:
            raise ValueError("err_bound must be nonnegative")

    @property
    def upper(self):
        return self.value + self.err_bound

    def to_dict(self):
        return {"value": self.value, "err_bound": self.err_bound, "method": self.method}


# ------------------------------------------------------------ helpers


def _intervals(segments):
    """Elementary intervals ``(u, v, active)`` on which the active set is fixed."""
    pts = sorted({s.start for s in segments} | {s.end for s in segments})
    for u, v in zip(pts, pts[1:]):
        active = [s for s in segments if s.start <= u and s.end >= v]
        if active:
            yield u, v, active


def _sum_crossings(packed, lo, hi, samples=97):
    """Zeros of a sum of overlapping pieces inside ``(lo, hi)``, where ``|f|**p``
    has a kink. Only sums with a common phase can cross zero robustly; those are
    rotated to real values and bracketed on Chebyshev-spaced samples."""
    x = 0.5 * (lo + hi) - 0.5 * (hi - lo) * np.cos(np.linspace(0.0, math.pi, samples))
    x[-1] = np.nextafter(hi, -np.inf)
    v = _kernels.eval_segments(x, *packed)
    big = np.abs(v).max()
    if big == 0:
        return []
    turn = np.exp(-1j * np.angle(v[np.argmax(np.abs(v))]))
    r = v * turn
    if np.abs(r.imag).max() > 1e-12 * big:
        return []

    def real_part(t):
        return float((_kernels.eval_segments(np.array([t]), *packed)[0] * turn).real)

    out = []
    sign = np.sign(r.real)
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        out.append(brentq(real_part, x[i], x[i + 1], xtol=1e-15))
    return out


def _packed_open(active):
    s0, s1, k0, k1, k2, poly = pack(active)
    s1[:] = np.inf
    return s0, s1, k0, k1, k2, poly


def _real_roots(poly, lo, hi):
    """Real roots of an ascending complex polynomial strictly inside (lo, hi)."""
    coefs = np.asarray(poly, dtype=complex)
    # leading terms below rounding level of the rest act as zeros
    scale = np.abs(coefs).max(initial=0.0)
    keep = np.nonzero(np.abs(coefs) > 1e-14 * scale)[0]
    if keep.size == 0 or keep[-1] < 1:
        return []
    coefs = coefs[: keep[-1] + 1]
    out = []
    with np.errstate(all="ignore"):
        roots = npoly.polyroots(coefs)
    for r in roots:
        if not np.isfinite(r):
            continue
        if abs(r.imag) <= 1e-9 * (1.0 + abs(r.real)) and lo < r.real < hi:
            x = r.real
            for _ in range(3):
                d = npoly.polyval(x, npoly.polyder(coefs))
                if d == 0:
                    break
                x = x - (npoly.polyval(x, coefs) / d).real
            if lo < x < hi and abs(npoly.polyval(x, coefs)) <= 1e-8 * np.abs(coefs).sum():
                out.append(x)
    return sorted(out)


def _root_to_norm(total, err, p):
    value = total ** (1.0 / p) if total > 0 else 0.0
    hi = (total + err) ** (1.0 / p)
    lo = max(total - err, 0.0) ** (1.0 / p)
    return value, max(hi - value, value - lo) + 4 * _EPS * value


def _exp_integral(p, rho, tu, tv):
    """``int_tu^tv exp(p*rho*tau) dtau``; ``tv`` may be inf."""
    b = p * rho
    if tv == INF:
        if b >= 0:
            raise DivergentNorm("non-decaying unbounded segment")
        return math.exp(b * tu) / (-b)
    h = tv - tu
    x = b * h
    if abs(x) < 1e-5:
        # series keeps full precision for tiny (even subnormal) rates
        return math.exp(b * tu) * h * (1 + x / 2 + x * x / 6 + x * x * x / 24)
    return math.exp(b * tu) * math.expm1(x) / b


def _gauss_tail(p, rho, kappa, tu):
    """``int_tu^inf exp(p*(rho*tau + kappa*tau**2)) dtau`` for ``kappa < 0``."""
    q = -p * kappa
    b = p * rho
    y = -(b - 2 * q * tu) / (2 * math.sqrt(q))
    log_ex = math.log(2.0) + y * y if y < -25 else math.log(erfcx(y))
    return math.exp(-q * tu * tu + b * tu + math.log(0.5 * math.sqrt(math.pi / q)) + log_ex)


def _closed_piece(s, u, v, p):
    """Closed-form ``int_u^v |s|^p`` or ``None`` when not available."""
    if len(s.poly) != 1:
        return None
    tu = float(u - s.start)
    tv = INF if v == INF else float(v - s.start)
    mag = abs(s.scale * s.poly[0]) ** p
    if s.curvature == 0:
        return mag * _exp_integral(p, s.rate.real, tu, tv)
    if v == INF:
        if s.curvature > 0:
            raise DivergentNorm("log-quadratic segment grows")
        return mag * _gauss_tail(p, s.rate.real, s.curvature, tu)
    return None


def _adaptive(lo, hi, packed, p, abs_tol):
    """Breadth-first adaptive Gauss-Legendre for ``int_lo^hi |f|^p``."""
    span = hi - lo
    lo_a, hi_a = np.array([lo]), np.array([hi])
    coarse = _kernels.panel_abs_p(lo_a, hi_a, _NODES, _WEIGHTS, *packed, p)
    parts, err = [], 0.0
    for _ in range(MAX_DEPTH + 1):
        mid = 0.5 * (lo_a + hi_a)
        n = lo_a.size
        fine = _kernels.panel_abs_p(
            np.concatenate([lo_a, mid]), np.concatenate([mid, hi_a]), _NODES, _WEIGHTS, *packed, p
        )
        fl, fr = fine[:n], fine[n:]
        refined = fl + fr
        diff = np.abs(coarse - refined)
        ok = diff <= np.maximum(abs_tol * (hi_a - lo_a) / span, 1e-14 * np.abs(refined))
        parts.extend(refined[ok].tolist())
        err += float(diff[ok].sum())
        if ok.all():
            return math.fsum(parts), err
        bad = ~ok
        lo_a = np.concatenate([lo_a[bad], mid[bad]])
        hi_a = np.concatenate([mid[bad], hi_a[bad]])
        coarse = np.concatenate([fl[bad], fr[bad]])
        if lo_a.size > MAX_PANELS:
            break
    raise ToleranceNotMet(f"quadrature did not converge on [{lo}, {hi}]")


# ------------------------------------------------------------ finite support


def _finite_lp(segments, p, tol):
    closed, quad = [], []
    for u, v, active in _intervals(segments):
        if len(active) == 1:
            val = _closed_piece(active[0], u, v, p)
            if val is not None:
                closed.append(val)
                continue
        if v == INF:
            if len(active) == 1 and active[0].curvature > 0:
                raise DivergentNorm("log-quadratic segment grows")
            if len(active) == 1 and active[0].curvature < 0:
                s = active[0]
                quad.append((u, u + _gauss_cutoff(s, u, p), [s], True))
                continue
            raise NotImplementedError("overlapping unbounded segments")
        quad.append((u, v, active, False))

    pieces = []
    for u, v, active, gauss in quad:
        packed = _packed_open(active)
        lo, hi = float(u), float(v)
        cuts = [lo, hi]
        if len(active) == 1:
            s = active[0]
            off = float(s.start)
            cuts = [lo] + [r + off for r in _real_roots(s.poly, lo - off, hi - off)] + [hi]
        elif not gauss:
            cuts = [lo] + _sum_crossings(packed, lo, hi) + [hi]
        for a, b in zip(cuts, cuts[1:]):
            if b > a:
                pieces.append((a, b, packed, gauss))

    est = math.fsum(closed)
    if pieces:
        lo_a = np.array([x[0] for x in pieces])
        hi_a = np.array([x[1] for x in pieces])
        for i, (a, b, packed, _) in enumerate(pieces):
            est += float(_kernels.panel_abs_p(lo_a[i : i + 1], hi_a[i : i + 1], _NODES, _WEIGHTS, *packed, p)[0])
    abs_tol = 0.5 * tol * p * max(est, 1e-300) ** ((p - 1.0) / p)
    share = abs_tol / max(len(pieces), 1)

    total_parts = list(closed)
    err = 2 * _EPS * math.fsum(closed)
    for a, b, packed, gauss in pieces:
        val, e = _adaptive(a, b, packed, p, share)
        total_parts.append(val)
        err += e + 2 * _EPS * val
        if gauss:
            err += _GAUSS_DROP * max(val, 1e-300)
    total = math.fsum(total_parts)
    value, nerr = _root_to_norm(total, err, p)
    return NormResult(value, nerr, QUADRATURE if pieces else CLOSED_FORM)


_GAUSS_DROP = 1e-17


def _gauss_cutoff(s, u, p):
    """Length after ``u`` beyond which a decaying Gaussian piece is negligible."""
    rho, kap = s.rate.real, s.curvature
    tu = float(u - s.start)
    # exponent p*(rho*tau + kap*tau^2) falls 45 below its maximum on [tu, inf)
    peak = max(tu, -rho / (2 * kap))
    top = p * (rho * peak + kap * peak * peak)
    tau = peak
    step = 1.0
    while p * (rho * tau + kap * tau * tau) > top - 45.0:
        tau += step
        step *= 1.5
    return tau - tu


# ------------------------------------------------------------ sup norm pieces


def _seg_sup(s, u, v):
    """Analytic supremum of ``|s|`` over ``[u, v)`` (left limit at ``v``)."""
    tu = float(u - s.start)
    tv = INF if v == INF else float(v - s.start)
    rho, kap = s.rate.real, s.curvature
    P = np.asarray(s.poly, dtype=complex)
    peak = np.abs(P).max(initial=0.0)
    if peak > 0:
        # stationary points do not depend on the scale of P; a power of two is exact
        e = math.frexp(peak)[1]
        P = np.ldexp(P.real, -e) + 1j * np.ldexp(P.imag, -e)
    if tv == INF and kap == 0 and rho > 0:
        raise DivergentNorm("growing unbounded segment")
    Q = npoly.polymul(P, P.conj()).real
    G = npoly.polyadd(npoly.polyadd(2 * rho * Q, 4 * kap * npoly.polymulx(Q)), npoly.polyder(Q))
    hi = tv if tv != INF else max(tu, -rho / (2 * kap) if kap < 0 else tu) + 1e6
    cands = [tu] + ([tv] if tv != INF else [])
    cands += _real_roots(G.astype(complex), tu, hi)

    def mag(x):
        acc = 0j
        for c in reversed(s.poly):
            acc = acc * x + c
        return abs(s.scale) * math.exp(rho * x + kap * x * x) * abs(acc)

    best = max(mag(x) for x in cands)
    return best, 1e-13 * best


def _sampled_sup(active, u, v):
    if v == INF:
        raise NotImplementedError("overlapping unbounded segments")
    packed = _packed_open(active)
    lo, hi = float(u), float(v)
    t = np.linspace(lo, hi, 257)
    vals = np.abs(_kernels.eval_segments(t, *packed))
    best = float(vals.max())
    order = np.argsort(vals)[::-1][:4]

    def neg(x):
        return -abs(_kernels.eval_segments(np.array([x]), *packed)[0])

    for i in order:
        a, b = t[max(i - 1, 0)], t[min(i + 1, t.size - 1)]
        if b <= a:
            continue
        res = minimize_scalar(neg, bounds=(a, b), method="bounded", options={"xatol": 1e-13})
        best = max(best, -float(res.fun))
    return best, 1e-12 * (1.0 + best)


def _finite_sup(segments):
    best, err, method = 0.0, 0.0, CLOSED_FORM
    for u, v, active in _intervals(segments):
        if len(active) == 1:
            m, e = _seg_sup(active[0], u, v)
        else:
            m, e = _sampled_sup(active, u, v)
            method = SAMPLED
        if m > best:
            best = m
        err = max(err, e)
    return NormResult(best, err, method)


# ------------------------------------------------------------ tails


def _log_abs(z):
    return math.log(abs(z)) if z != 0 else -math.inf


def _tail_log_majorant(tail, j):
    """log of the factor bounding ``||block j|| / ||block 0||``."""
    lw = math.log(abs(tail.weight_base))
    slope = float(tail.alpha) * lw
    t_star = tail.origin + j * tail.period + (tail.width if slope > 0 else 0)
    expo = j * tail.alpha * t_star - tail.alpha * tail.period * j * (j - 1) / 2 + j * tail.beta
    lr = _log_abs(tail.ratio) if j else 0.0
    return j * lr + float(expo) * lw


def tail_majorant_sum(tail, k, base_norm):
    """Upper bound on ``sum_{j>=k} ||block j||`` given ``||block 0|| <= base_norm``."""
    if tail.count is not None and k >= tail.count:
        return 0.0
    if base_norm == 0:
        return 0.0
    if tail.ratio == 0 and k >= 1:
        return 0.0
    slope = float(tail.alpha) * math.log(abs(tail.weight_base))
    if slope > 0 and tail.count is None:
        raise DivergentNorm("tail weight grows faster than any block decay")
    lb = math.log(base_norm)
    terms = []
    j = k
    while True:
        if tail.count is not None and j >= tail.count:
            return math.fsum(terms)
        lm = _tail_log_majorant(tail, j) + lb
        terms.append(math.exp(lm))
        ln = _tail_log_majorant(tail, j + 1) + lb
        rho = math.exp(ln - lm) if lm > -math.inf else 0.0
        if slope <= 0 and rho < 1 and (slope == 0 or rho < 0.5 or terms[-1] == 0):
            if tail.count is not None:
                # finite tails: geometric bound is still an upper bound
                pass
            return math.fsum(terms) + math.exp(ln) / (1.0 - rho)
        if slope == 0 and rho >= 1 and tail.count is None:
            raise DivergentNorm(f"tail block ratio {rho:.6g} >= 1")
        j += 1
        if j - k > 100_000:
            raise DivergentNorm("tail majorant does not settle")


def _space(space):
    return Space.parse(space)


def norm(f, space, tol=DEFAULT_TOL):
    """Norm of ``f`` in ``space`` (``"Lp:<p>"``, ``"C0"`` or a :class:`Space`)."""
    space = _space(space)
    if space.is_c0:
        return sup_norm(f, tol)
    return lp_norm(f, space.p, tol)


def tail_remainder_bound(f, k, space):
    """Bound on the norm of everything past the first ``k`` tail blocks."""
    if f.tail is None:
        return 0.0
    base = PiecewiseFn(f.tail.base, None, f.space)
    return tail_majorant_sum(f.tail, k, norm(base, space).upper)


def materialize_with_bound(f, k, space):
    """``(materialize_tail(f, k), tail_remainder_bound(f, k, space))``."""
    return materialize_tail(f, k), tail_remainder_bound(f, k, space)


def _tail_ratio(tail):
    lw = math.log(abs(tail.weight_base))
    return abs(tail.ratio) * math.exp(float(tail.beta) * lw)


def _truncate_for(g, space, tol):
    tail = g.tail
    base_norm = norm(PiecewiseFn(tail.base), space).upper
    k = 1
    while True:
        rem = tail_majorant_sum(tail, k, base_norm)
        if rem <= tol or (tail.count is not None and k >= tail.count):
            return k, rem
        k += 1
        if k > 100_000:
            raise ToleranceNotMet("tail needs too many blocks")


def lp_norm(f, p=2.0, tol=DEFAULT_TOL):
    """``||f||_p`` with a certified absolute error (floored at a few ulps of the value)."""
    p = float(p)
    if not p >= 1:
        raise ValueError("p must be >= 1")
    if f.tail is None:
        return _finite_lp(f.segments, p, tol)
    g = settle(f)
    tail = g.tail
    if tail is None:
        return _finite_lp(g.segments, p, tol)
    if tail.count is None and tail.alpha == 0 and tail.width <= tail.period:
        q = _tail_ratio(tail)
        if q >= 1:
            raise DivergentNorm(f"geometric tail ratio {q:.6g} >= 1")
        h = _finite_lp(g.segments, p, tol / 2) if g.segments else NormResult(0.0, 0.0, CLOSED_FORM)
        b = _finite_lp(tail.base, p, tol / 2)
        scale = (1.0 - q**p) ** (-1.0 / p)
        value = (h.value**p + (b.value * scale) ** p) ** (1.0 / p)
        err = h.err_bound + b.err_bound * scale + 4 * _EPS * value
        return NormResult(value, err, TAIL_SERIES)
    k, rem = _truncate_for(g, Space("Lp", p), tol / 2)
    r = _finite_lp(materialize_tail(g, k).segments, p, tol / 2)
    return NormResult(r.value, r.err_bound + rem, TAIL_SERIES)


def sup_norm(f, tol=DEFAULT_TOL):
    """``sup_t |f(t)|``; per-segment maxima from the stationarity condition of the
    log-modulus, overlaps by sampling and bounded refinement."""
    if f.tail is None:
        return _finite_sup(f.segments)
    g = settle(f)
    tail = g.tail
    if tail is None:
        return _finite_sup(g.segments)
    if tail.count is None and tail.alpha == 0 and tail.width <= tail.period:
        q = _tail_ratio(tail)
        if q > 1:
            raise DivergentNorm(f"geometric tail ratio {q:.6g} > 1")
        h = _finite_sup(g.segments) if g.segments else NormResult(0.0, 0.0, CLOSED_FORM)
        b = _finite_sup(tail.base)
        return NormResult(max(h.value, b.value), max(h.err_bound, b.err_bound), TAIL_SERIES)
    k, rem = _truncate_for(g, Space("C0"), tol / 2)
    r = _finite_sup(materialize_tail(g, k).segments)
    return NormResult(r.value, r.err_bound + rem, TAIL_SERIES)


def distance(f, g, space, tol=DEFAULT_TOL):
    """``||f - g||`` in ``space``."""
    return norm(add(f, exp_scale(g, -1.0)), space, tol)


# ------------------------------------------------------------ independent oracle


def _oracle_cuts(ev, edges):
    """Sign changes of a real-valued integrand inside each ``(lo, hi)`` by sampling + bisection."""
    lo = np.asarray(edges[:-1])
    hi = np.asarray(edges[1:])
    frac = np.linspace(0.0, 1.0, 65)
    t = lo[:, None] + (hi - lo)[:, None] * frac[None, :]
    # left limit at the upper end: a crossing in the last gap still counts
    t[:, -1] = np.nextafter(hi, -np.inf)
    v = ev(t.ravel()).reshape(t.shape)
    cuts = []
    for row, vals in zip(t, v):
        # a constant phase can be rotated away; then crossings are real sign changes
        ref = vals[np.argmax(np.abs(vals))]
        if ref == 0:
            continue
        phase = np.exp(-1j * np.angle(ref))
        rot = vals * phase
        if np.abs(rot.imag).max() > 1e-12 * np.abs(rot).max():
            continue
        re = rot.real
        for i in range(row.size - 1):
            if re[i] == 0:
                # underflowed stretches are all zeros; only a crossing counts
                if 0 < i and re[i - 1] * re[i + 1] < 0:
                    cuts.append(float(row[i]))
            elif re[i] * re[i + 1] < 0:
                cuts.append(brentq(lambda x, ph=phase: (ev(np.array([x]))[0] * ph).real, row[i], row[i + 1],
                                   xtol=1e-15))
    return cuts


def _composite(ev, edges, panels, p):
    a = np.asarray(edges[:-1])
    h = (np.asarray(edges[1:]) - a) / panels
    mids = a[:, None] + h[:, None] * (np.arange(panels) + 0.5)[None, :]
    t = mids[:, :, None] + 0.5 * h[:, None, None] * _NODES[None, None, :]
    vals = np.abs(ev(t.ravel())).reshape(t.shape) ** p
    per_edge = 0.5 * h * (vals @ _WEIGHTS).sum(axis=1)
    return math.fsum(per_edge.tolist())


def oracle_lp_norm(f, p, panels=4, refine=10, blocks=60):
    """Brute-force composite Gauss-Legendre norm, independent of the closed forms.

    Tails are expanded to at least ``blocks`` blocks (more while the dropped
    part exceeds 1e-13); that part is bounded with the tail majorant and
    added to ``err_bound``. The estimate uses
    ``refine * panels`` panels per interval, and the error is the gap to the
    ``panels`` estimate.
    """
    p = float(p)
    rem = 0.0
    g = f
    if f.tail is not None:
        # extend past ``blocks`` until the dropped part is negligible
        while True:
            rem = tail_remainder_bound(f, blocks, Space("Lp", p))
            if rem <= 1e-13 or blocks >= 400:
                break
            blocks += 20
        g = materialize_tail(f, blocks)
    if any(s.end == INF for s in g.segments):
        raise NotImplementedError("oracle handles bounded supports only")
    pts = sorted({float(s.start) for s in g.segments} | {float(s.end) for s in g.segments})
    if len(pts) < 2:
        return NormResult(0.0, rem, QUADRATURE)
    packed = pack(g.segments)

    def ev(t):
        return _kernels.eval_segments(t, *packed)

    edges = sorted(set(pts) | set(_oracle_cuts(ev, pts)))
    coarse = _composite(ev, edges, panels, p)
    fine = _composite(ev, edges, panels * refine, p)
    value, err = _root_to_norm(fine, abs(coarse - fine) + 1e-14 * fine, p)
    return NormResult(value, err + rem, QUADRATURE)


def oracle_sup_norm(f, samples=4001, blocks=60):
    """Dense-sampling supremum including left limits at every breakpoint."""
    from .piecewise import breakpoints, evaluate, evaluate_many

    g = materialize_tail(f, blocks) if f.tail is not None else f
    rem = tail_remainder_bound(f, blocks, Space("C0")) if f.tail is not None else 0.0
    pts = [float(x) for x in breakpoints(g)]
    best = 0.0
    for a, b in zip(pts, pts[1:]):
        t = np.linspace(a, b, samples)[:-1]
        best = max(best, float(np.abs(evaluate_many(g, t)).max()))
    for x in breakpoints(g):
        if x > 0:
            best = max(best, abs(evaluate(g, x, "left")))
    return NormResult(best, rem, SAMPLED)
