"""Periodic points, eigenvectors and transitivity pairs for the four shifts.

Bounded kinds get exact geometric-tail objects. Unbounded kinds are series in
the right inverse ``S`` and are truncated after ``K`` blocks; for a truncated
series the defect is exactly the last block (times ``lambda`` for
eigenvectors), so ``K`` is the first count whose last-block majorant drops
below ``tol * ||x||``. Every residual is then measured, not assumed.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .norms import (
    NormResult,
    ToleranceNotMet,
    _tail_log_majorant,
    distance,
    norm,
)
from .operators import (
    ContinuityViolation,
    NotEventuallyZero,
    ShiftSpec,
    apply,
    apply_power,
    right_inverse_power,
    s_power_bound,
)
from .piecewise import (
    EPS_CONT,
    GeometricTail,
    PiecewiseFn,
    Segment,
    add,
    continuity_defects,
    evaluate,
    exp_scale,
    hat,
    indicator,
    restrict,
    support_end,
)

DEFAULT_TOL = 1e-9
MAX_BLOCKS = 500

CLOSED = "closed-form"
DERIVED = "derived-construction"


class NotInKernel(ValueError):
    pass


class LambdaOutOfDisk(ValueError):
    pass


class ProfileMismatch(ValueError):
    pass


class PeriodTooSmall(ValueError):
    pass


def modulus_position(lam, w, rel_tol=1e-12):
    """-1, 0, +1 for ``|lam|`` inside, on, or outside the circle of radius ``|w|``.

    ``|lam|**2 - |w|**2`` is formed exactly from the stored doubles; "on" means
    ``||lam| - |w|| <= rel_tol * |w|``.
    """
    lam, w = complex(lam), complex(w)
    diff = (Fraction(lam.real) ** 2 + Fraction(lam.imag) ** 2) - (
        Fraction(w.real) ** 2 + Fraction(w.imag) ** 2
    )
    band = rel_tol * abs(w) * (abs(lam) + abs(w))
    if abs(float(diff)) <= band:
        return 0
    return -1 if diff < 0 else 1


def _cplx(z):
    return [z.real, z.imag]


@dataclass(frozen=True)
class PeriodicPoint:
    fn: PiecewiseFn
    N: int
    residual: NormResult
    truncation_K: int | str
    spec: ShiftSpec
    tol: float
    relative_residual: float
    provenance: str

    def to_dict(self):
        return {
            "object": "periodic_point",
            "spec": self.spec.to_dict(),
            "N": self.N,
            "truncation_K": self.truncation_K,
            "tol": self.tol,
            "residual": self.residual.to_dict(),
            "relative_residual": self.relative_residual,
            "provenance": self.provenance,
            "fn": self.fn.to_dict(),
        }


@dataclass(frozen=True)
class EigenPair:
    lam: complex
    fn: PiecewiseFn
    residual: NormResult
    spec: ShiftSpec
    tol: float
    relative_residual: float
    truncation_K: int | str
    provenance: str

    @property
    def passes(self):
        return self.relative_residual <= 2 * self.tol

    def to_dict(self):
        return {
            "object": "eigenpair",
            "spec": self.spec.to_dict(),
            "lambda": _cplx(self.lam),
            "truncation_K": self.truncation_K,
            "tol": self.tol,
            "residual": self.residual.to_dict(),
            "relative_residual": self.relative_residual,
            "provenance": self.provenance,
            "fn": self.fn.to_dict(),
        }


@dataclass(frozen=True)
class TransitivityWitness:
    n: int
    z: PiecewiseFn
    distance: NormResult
    eps: float
    spec: ShiftSpec
    provenance: str

    def __iter__(self):
        return iter((self.n, self.z))

    def to_dict(self):
        return {
            "object": "transitivity_witness",
            "spec": self.spec.to_dict(),
            "n": self.n,
            "eps": self.eps,
            "distance": self.distance.to_dict(),
            "provenance": self.provenance,
            "z": self.z.to_dict(),
        }


# ------------------------------------------------------------ shared checks


def _check_kernel(spec, x, N):
    if not x.is_finite:
        raise NotEventuallyZero("x must be eventually zero")
    if x.is_zero:
        raise NotInKernel("x must be nonzero")
    if not apply_power(spec, x, N).is_zero:
        raise NotInKernel(f"T^{N} x != 0: support ends at {support_end(x)}, N a = {N * spec.a}")


def _rel(res, ref):
    return res.value / ref.value if ref.value > 0 else math.inf


def _series(spec, x, stride, ratio, count):
    """``sum_{k<count} ratio**k S**(k*stride) x`` as head + finite-count tail."""
    a = spec.a
    L = stride * a
    alpha = -stride
    beta = Fraction(stride) * (stride + 1) * a / 2
    if not spec.space.is_c0 or evaluate(x, Fraction(0)) == 0:
        if count == 1 or ratio == 0:
            return x
        tail = GeometricTail(x.segments, L, ratio, spec.w, alpha, beta, count)
        return PiecewiseFn((), tail, spec.space)
    # C0 with x(0) != 0: the first S**stride adds a ramp; later blocks start at 0
    if count == 1 or ratio == 0:
        return x
    first = exp_scale(right_inverse_power(spec, x, stride), ratio)
    tail = GeometricTail(first.segments, L, ratio, spec.w, alpha, beta, count - 1)
    return PiecewiseFn(x.segments, tail, spec.space)


def _block_majorant(spec, x, stride, ratio, j, x_norm):
    """Bound on ``||ratio**j S**(j*stride) x||``."""
    if j == 0:
        return x_norm
    tail = GeometricTail(x.segments, stride * spec.a, ratio, spec.w, -stride,
                         Fraction(stride) * (stride + 1) * spec.a / 2)
    main = math.exp(_tail_log_majorant(tail, j)) * x_norm
    if spec.space.is_c0:
        f0 = evaluate(x, Fraction(0))
        bound = s_power_bound(spec, x_norm, f0, j * stride)
        return max(main, abs(ratio) ** j * bound)
    return main


def _truncated(spec, x, stride, ratio, tol, defect_scale):
    """Minimal ``K`` with ``defect_scale * majorant(K-1) <= tol * ||x||``, then a
    measured residual; ``K`` grows until the measured relative residual passes."""
    x_norm = norm(x, spec.space).value
    K = 1
    while defect_scale * _block_majorant(spec, x, stride, ratio, K - 1, x_norm) > tol * x_norm:
        K += 1
        if K > MAX_BLOCKS:
            raise ToleranceNotMet(f"series needs more than {MAX_BLOCKS} blocks")
    return K


# ------------------------------------------------------------ periodic points


def default_kernel_profile(spec, N=1):
    """Unit indicator of ``[0, Na)`` in Lp, unit hat on ``[0, Na]`` in C0."""
    if spec.space.is_c0:
        return hat(0, N * spec.a, 1.0, space=spec.space)
    return indicator(0, N * spec.a, spec.space)


def _periodic_residual(spec, fn, N):
    res = distance(apply_power(spec, fn, N), fn, spec.space)
    ref = norm(fn, spec.space)
    return res, _rel(res, ref)


def periodic_point_bounded(spec: ShiftSpec, x: PiecewiseFn, N: int) -> PeriodicPoint:
    """``x_N = sum_k w**(-kN) x(t - kNa)`` as an exact geometric tail."""
    if not spec.bounded:
        raise ValueError("periodic_point_bounded needs a bounded spec")
    _check_kernel(spec, x, N)
    if spec.space.is_c0:
        bad = continuity_defects(x)
        if bad or evaluate(x, Fraction(0)) != 0:
            raise ContinuityViolation("C0 periodic blocks need a continuous x with x(0) = 0")
    tail = GeometricTail(x.segments, N * spec.a, 1.0, spec.w, 0, -N)
    fn = PiecewiseFn((), tail, spec.space)
    res, rel = _periodic_residual(spec, fn, N)
    return PeriodicPoint(fn, N, res, "closed-form", spec, 0.0, rel, CLOSED)


def periodic_point_unbounded(spec: ShiftSpec, x: PiecewiseFn, N: int, tol: float = DEFAULT_TOL) -> PeriodicPoint:
    """``x_N = sum_{k<K} S**(kN) x``; the defect ``T**N x_N - x_N`` is the last block."""
    if spec.bounded:
        raise ValueError("periodic_point_unbounded needs an unbounded spec")
    _check_kernel(spec, x, N)
    K = _truncated(spec, x, N, 1.0, tol, 1.0)
    while True:
        fn = _series(spec, x, N, 1.0, K)
        res, rel = _periodic_residual(spec, fn, N)
        if rel <= 2 * tol:
            break
        K += 1
        if K > MAX_BLOCKS:
            raise ToleranceNotMet(f"periodic residual {rel:g} above {2 * tol:g}")
    prov = DERIVED if spec.space.is_c0 else CLOSED
    return PeriodicPoint(fn, N, res, K, spec, tol, rel, prov)


def periodic_point(spec, x, N, tol=DEFAULT_TOL):
    if spec.bounded:
        return periodic_point_bounded(spec, x, N)
    return periodic_point_unbounded(spec, x, N, tol)


# ------------------------------------------------------------ eigenvectors


def _eigen_residual(spec, lam, fn):
    res = distance(apply(spec, fn), exp_scale(fn, lam), spec.space)
    ref = norm(fn, spec.space)
    return res, _rel(res, ref)


def _check_disk(spec, lam):
    if modulus_position(lam, spec.w) >= 0:
        raise LambdaOutOfDisk(f"|lambda| = {abs(lam):.17g} is not below |w| = {abs(spec.w):.17g}")


def eigenvector_bounded_lp(spec: ShiftSpec, lam: complex, x: PiecewiseFn | None = None) -> EigenPair:
    """``x_lambda = sum_k (lambda/w)**k x(t - ka)`` for ``x`` in ``ker T``."""
    lam = complex(lam)
    if not spec.bounded or spec.space.is_c0:
        raise ValueError("eigenvector_bounded_lp needs a bounded Lp spec")
    _check_disk(spec, lam)
    x = default_kernel_profile(spec) if x is None else x
    _check_kernel(spec, x, 1)
    if lam == 0:
        fn = x
    else:
        fn = PiecewiseFn((), GeometricTail(x.segments, spec.a, lam / spec.w), spec.space)
    res, rel = _eigen_residual(spec, lam, fn)
    return EigenPair(lam, fn, res, spec, DEFAULT_TOL, rel, "closed-form", CLOSED)


def exponential_profile(spec, lam):
    """``e**(c t)`` on ``[0, a)`` with ``c = Log(lambda/w) / a``."""
    # logs taken separately so tiny lambda does not underflow the quotient
    c = complex(math.log(abs(lam)) - math.log(abs(spec.w)), cmath.phase(lam) - cmath.phase(spec.w))
    c /= float(spec.a)
    return PiecewiseFn((Segment(0, spec.a, gamma=c),), None, spec.space)


def eigenvector_bounded_c0(spec: ShiftSpec, lam: complex, profile: PiecewiseFn | None = None) -> EigenPair:
    """Continuous eigenfunction built from a profile on ``[0, a]`` with
    ``profile(a) = (lambda/w) profile(0)``."""
    lam = complex(lam)
    if not spec.bounded or not spec.space.is_c0:
        raise ValueError("eigenvector_bounded_c0 needs a bounded C0 spec")
    _check_disk(spec, lam)
    a = spec.a
    if profile is None:
        profile = hat(0, a, 1.0, space=spec.space) if lam == 0 else exponential_profile(spec, lam)
    piece = restrict(profile, a)
    if piece.is_zero:
        raise ProfileMismatch("profile vanishes on [0, a)")
    inner = [d for d in continuity_defects(piece) if d[0] < a]
    if inner:
        raise ProfileMismatch(f"profile jumps at t={inner[0][0]}")
    q = lam / spec.w
    left = evaluate(piece, a, "left")
    right = q * evaluate(piece, Fraction(0))
    if abs(left - right) > EPS_CONT * (1.0 + max(abs(left), abs(right))):
        raise ProfileMismatch(f"profile(a-) = {left} but (lambda/w) profile(0) = {right}")
    if lam == 0:
        fn = piece.with_space(spec.space)
    else:
        fn = PiecewiseFn((), GeometricTail(piece.segments, a, q), spec.space)
    res, rel = _eigen_residual(spec, lam, fn)
    return EigenPair(lam, fn, res, spec, DEFAULT_TOL, rel, "closed-form", CLOSED)


def eigenvector_unbounded(spec: ShiftSpec, lam: complex, x: PiecewiseFn | None = None, tol: float = DEFAULT_TOL) -> EigenPair:
    """``x_lambda = sum_{k<K} lambda**k S**k x``; the defect is ``lambda**K S**(K-1) x``."""
    lam = complex(lam)
    if spec.bounded:
        raise ValueError("eigenvector_unbounded needs an unbounded spec")
    x = default_kernel_profile(spec) if x is None else x
    _check_kernel(spec, x, 1)
    K = 1 if lam == 0 else _truncated(spec, x, 1, lam, tol, abs(lam))
    while True:
        fn = _series(spec, x, 1, lam, K)
        res, rel = _eigen_residual(spec, lam, fn)
        if rel <= 2 * tol:
            break
        K += 1
        if K > MAX_BLOCKS:
            raise ToleranceNotMet(f"eigen residual {rel:g} above {2 * tol:g}")
    prov = DERIVED if spec.space.is_c0 else CLOSED
    return EigenPair(lam, fn, res, spec, tol, rel, K, prov)


def eigenvector(spec, lam, x=None, tol=DEFAULT_TOL):
    if not spec.bounded:
        return eigenvector_unbounded(spec, lam, x, tol)
    if spec.space.is_c0:
        return eigenvector_bounded_c0(spec, lam, x)
    return eigenvector_bounded_lp(spec, lam, x)


# ------------------------------------------------------------ transitivity


def _steps(spec, f):
    end = support_end(f)
    return math.ceil(end / spec.a)


def transitivity_witness(spec: ShiftSpec, x: PiecewiseFn, y: PiecewiseFn, eps: float, max_n: int = 2000) -> TransitivityWitness:
    """``z = x + S**n y`` with ``T**n z = y`` and ``||z - x|| = ||S**n y|| < eps``.

    Bounded kind: ``n >= ceil(max(supp x, supp y)/a)`` and ``||S**n y|| = |w|**-n ||y||``.
    Unbounded kind: ``n >= ceil(supp x / a)``, smallest ``n`` whose measured
    ``||S**n y||`` is below ``eps``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not (x.is_finite and y.is_finite):
        raise NotEventuallyZero("x and y must be eventually zero")
    x = x.with_space(spec.space)
    y = y.with_space(spec.space)
    if spec.bounded:
        n = max(_steps(spec, x), _steps(spec, y), 1)
        y_norm = norm(y, spec.space).value
        while abs(spec.w) ** (-n) * y_norm >= eps:
            n += 1
        prov = CLOSED
    else:
        n = max(_steps(spec, x), 1)
        while norm(right_inverse_power(spec, y, n), spec.space).value >= eps:
            n += 1
            if n > max_n:
                raise ToleranceNotMet("no admissible n found")
        prov = DERIVED
    tail = right_inverse_power(spec, y, n)
    z = add(x, tail)
    dist = distance(z, x, spec.space)
    return TransitivityWitness(n, z, dist, float(eps), spec, prov)


# ------------------------------------------------------------ density


def periodic_density_gap(spec: ShiftSpec, x: PiecewiseFn, N: int, tol: float = DEFAULT_TOL) -> NormResult:
    """``||x_N - x||`` for the period-``N`` point generated by ``x``."""
    if N < _steps(spec, x):
        raise PeriodTooSmall(f"N={N} below ceil(supp x / a)={_steps(spec, x)}")
    pp = periodic_point(spec, x, N, tol)
    return distance(pp.fn, x, spec.space)


def periodic_density_closed_form(spec, x_norm, N, p):
    """``||x_N - x||_p`` for the bounded kind: ``(|w|**(-pN) / (1 - |w|**(-pN)))**(1/p) ||x||``."""
    q = abs(spec.w) ** (-p * N)
    return (q / (1.0 - q)) ** (1.0 / p) * x_norm
