"""Verification suites: each yields :class:`~shiftchaos.report.Report` records."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import norms
from .constructions import (
    LambdaOutOfDisk,
    default_kernel_profile,
    eigenvector,
    periodic_density_closed_form,
    periodic_density_gap,
    periodic_point,
    transitivity_witness,
)
from .operators import (
    ShiftSpec,
    apply,
    apply_power,
    apply_sequential,
    in_domain,
    right_inverse,
    right_inverse_power,
    s_power_bound,
    s_power_bound_simple,
    unboundedness_witness,
)
from .piecewise import (
    GeometricTail,
    PiecewiseFn,
    Segment,
    evaluate,
    evaluate_many,
    exp_scale,
    indicator,
    materialize_tail,
    support_end,
)
from .report import Report
from .sampling import (
    random_continuous,
    random_finite,
    random_kernel,
    random_lambda,
    random_tail_fn,
    rng_for,
)
from .spectrum import CONTINUOUS, POINT, RESOLVENT, classify, gelfand_bound_check

SUITES = ("norms", "periodic", "eigen", "transitivity", "unbounded")
CLOSED = "closed-form"
DERIVED = "derived-construction"
ASSERTED = "theorem-asserted"


def _random_fn(rng, space, **kw):
    if space.is_c0:
        return random_continuous(rng, space=space, **kw)
    return random_finite(rng, space=space, **kw)


def unbounded_twin(spec):
    if not spec.bounded:
        return spec
    w = abs(spec.w)
    return ShiftSpec(spec.space, "unbounded", w, spec.a)


# ------------------------------------------------------------ norms


def suite_norms(spec, rng, tol):
    space = spec.space
    out = []
    box = indicator(0, 1, space)
    r = norms.norm(box, space)
    out.append(Report.make("norm.unit_box", spec, {"f": "indicator [0,1)"}, r, 1.0, 1e-14, "abs",
                           CLOSED, "unit-box-norm"))
    w_abs = abs(spec.w)
    step_box = indicator(0, spec.a, space)
    tail = GeometricTail(step_box.segments, spec.a, 1.0, w_abs, 0, -1)
    xN = PiecewiseFn((), tail, space)
    got = norms.norm(xN, space)
    if space.is_c0:
        expect = 1.0
    else:
        p = space.p
        expect = (float(spec.a) / (1.0 - w_abs ** (-p))) ** (1.0 / p)
    out.append(Report.make("norm.geometric_tail", spec, {"w": w_abs, "N": 1}, got, expect, 1e-10, "abs",
                           CLOSED, "periodic-point-norm-identity"))
    if not space.is_c0:
        orc = norms.oracle_lp_norm(xN, space.p)
        out.append(Report.make("norm.geometric_tail_vs_oracle", spec, {"w": w_abs, "N": 1}, got, orc.value,
                               got.err_bound + orc.err_bound + 1e-12, "abs", CLOSED,
                               "periodic-point-norm-identity"))
    for i in range(5):
        f = _random_fn(rng, space, complex_values=bool(i % 2))
        if space.is_c0:
            got = norms.sup_norm(f)
            orc = norms.oracle_sup_norm(f)
            # dense sampling can only undershoot the true supremum
            out.append(Report.make("norm.sup_vs_sampling", spec, {"draw": i}, orc.value,
                                   got.value + got.err_bound, 1e-12, "le", CLOSED, "sup-norm"))
        else:
            got = norms.lp_norm(f, space.p)
            orc = norms.oracle_lp_norm(f, space.p)
            out.append(Report.make("norm.lp_vs_oracle", spec, {"draw": i}, got, orc.value,
                                   got.err_bound + orc.err_bound, "abs", CLOSED, "lp-norm-quadrature"))
    f = random_tail_fn(rng, space=space)
    full = norms.norm(f, space)
    for K in (1, 5, 10):
        part = norms.norm(materialize_tail(f, K), space)
        bound = norms.tail_remainder_bound(f, K, space)
        out.append(Report.make("norm.tail_remainder", spec, {"K": K}, abs(full.value - part.value),
                               bound, full.err_bound + part.err_bound, "le", CLOSED,
                               "tail-remainder-majorant"))
    f, g, h = (_random_fn(rng, space) for _ in range(3))
    dfh = norms.distance(f, h, space).value
    dfg = norms.distance(f, g, space).value
    dgh = norms.distance(g, h, space).value
    out.append(Report.make("norm.triangle", spec, {}, dfh, dfg + dgh, 3 * norms.DEFAULT_TOL, "le",
                           CLOSED, "triangle-inequality"))
    c = complex(rng.normal(), rng.normal())
    out.append(Report.make("norm.homogeneity", spec, {"c": c}, norms.norm(exp_scale(f, c), space).value,
                           abs(c) * norms.norm(f, space).value, 1e-9, "rel", CLOSED, "homogeneity"))
    return out


# ------------------------------------------------------------ periodic


def suite_periodic(spec, rng, tol):
    out = []
    space = spec.space
    if spec.bounded:
        for N in (1, 2, 3, 4):
            x = default_kernel_profile(spec, N)
            pp = periodic_point(spec, x, N, tol)
            out.append(Report.make("periodic.residual", spec, {"N": N}, pp.residual, 0.0, 0.0, "abs",
                                   CLOSED, "periodic-point-geometric-tail"))
            xn = norms.norm(x, space).value
            got = norms.norm(pp.fn, space)
            if space.is_c0:
                expect = xn
            else:
                p = space.p
                expect = xn / (1.0 - abs(spec.w) ** (-p * N)) ** (1.0 / p)
            out.append(Report.make("periodic.norm_identity", spec, {"N": N}, got, expect, 1e-9, "abs",
                                   CLOSED, "periodic-point-norm-identity"))
            gap = periodic_density_gap(spec, x, N, tol)
            if not space.is_c0:
                out.append(Report.make("periodic.density_gap", spec, {"N": N}, gap,
                                       periodic_density_closed_form(spec, xn, N, space.p), 1e-9, "abs",
                                       CLOSED, "periodic-density-gap"))
        x = default_kernel_profile(spec, 1)
        seq = [periodic_density_gap(spec, x, N, tol).value for N in range(1, 9)]
        out.append(Report.make("periodic.density_monotone", spec, {"N": "1..8"},
                               float(all(b < a for a, b in zip(seq, seq[1:]))), 1.0, 0.0, "abs", CLOSED,
                               "periodic-density-gap"))
    else:
        for N in (1, 2, 3, 4):
            x = random_kernel(rng, spec, N)
            pp = periodic_point(spec, x, N, tol)
            prov = pp.provenance
            out.append(Report.make("periodic.series_residual", spec, {"N": N, "K": pp.truncation_K},
                                   pp.relative_residual, 2 * tol, 0.0, "le", prov, "periodic-point-series"))
            out.append(Report.make("periodic.series_blocks", spec, {"N": N}, pp.truncation_K, 12, 0.0, "le",
                                   prov, "periodic-point-series"))
    return out


# ------------------------------------------------------------ eigen


def suite_eigen(spec, rng, tol):
    out = []
    space = spec.space
    lams = [random_lambda(rng, spec) for _ in range(5)]
    if not spec.bounded:
        lams.append(10.0 + 0j)
    for lam in lams:
        ep = eigenvector(spec, lam, None, tol)
        out.append(Report.make("eigen.residual", spec, {"lambda": lam, "K": ep.truncation_K},
                               ep.relative_residual, 2 * tol, 0.0, "le", ep.provenance, "eigenvector"))
        if spec.bounded and not space.is_c0:
            x = default_kernel_profile(spec)
            p = space.p
            q = abs(lam / spec.w)
            expect = norms.norm(x, space).value / (1 - q**p) ** (1 / p)
            out.append(Report.make("eigen.norm_identity", spec, {"lambda": lam}, norms.norm(ep.fn, space),
                                   expect, 1e-9, "abs", CLOSED, "eigenvector-norm-identity"))
    if spec.bounded:
        for lam in (abs(spec.w) * 1j, 1.5 * abs(spec.w)):
            try:
                eigenvector(spec, lam, None, tol)
                refused = 0.0
            except LambdaOutOfDisk:
                refused = 1.0
            out.append(Report.make("eigen.refuses_outside_disk", spec, {"lambda": lam}, refused, 1.0, 0.0,
                                   "abs", ASSERTED, "point-spectrum-open-disk"))
        out.append(gelfand_bound_check(spec, samples=50, seed=int(rng.integers(1 << 31))))
    out.extend(_spectrum_reports(spec))
    return out


def _spectrum_reports(spec):
    out = []
    w = abs(spec.w)
    if spec.bounded:
        cases = [(0.5 * w, POINT), (w * 1j, CONTINUOUS), (-w, CONTINUOUS), (1.5 * w + 1j, RESOLVENT)]
    else:
        cases = [(17 - 5j, POINT), (0j, POINT)]
    for lam, want in cases:
        sc = classify(spec, lam, evidence=(want == POINT))
        ok = sc.cls == want and (sc.evidence is None or sc.evidence.passes)
        out.append(Report.make("spectrum.classify", spec, {"lambda": lam, "class": sc.cls}, float(ok), 1.0,
                               0.0, "abs", sc.provenance, "spectrum-classification"))
    return out


# ------------------------------------------------------------ transitivity


def suite_transitivity(spec, rng, tol):
    out = []
    space = spec.space
    for i in range(5):
        x = _random_fn(rng, space, span=2)
        y = _random_fn(rng, space, span=2)
        eps = float(10 ** rng.uniform(-6, -1))
        tw = transitivity_witness(spec, x, y, eps)
        out.append(Report.make("transitivity.distance", spec, {"draw": i, "n": tw.n, "eps": eps},
                               tw.distance, eps, 0.0, "le", tw.provenance, "transitivity-witness"))
        hit = apply_power(spec, tw.z, tw.n) == y.with_space(space)
        out.append(Report.make("transitivity.hits_target", spec, {"draw": i, "n": tw.n}, float(hit), 1.0, 0.0,
                               "abs", tw.provenance, "transitivity-witness"))
        if spec.bounded:
            expect = abs(spec.w) ** (-tw.n) * norms.norm(y, space).value
            out.append(Report.make("transitivity.distance_identity", spec, {"draw": i, "n": tw.n},
                                   tw.distance, expect, 1e-10, "abs", CLOSED, "transitivity-witness"))
    return out


# ------------------------------------------------------------ unbounded


def suite_unbounded(spec, rng, tol):
    U = unbounded_twin(spec)
    space = U.space
    out = []
    for i in range(5):
        f = _random_fn(rng, space, complex_values=bool(i % 2))
        same = apply(U, right_inverse(U, f)) == f
        out.append(Report.make("unbounded.right_inverse", U, {"draw": i}, float(same), 1.0, 0.0, "abs",
                               CLOSED, "right-inverse-identity"))
    for n in (2, 4, 6):
        f = _random_fn(rng, space)
        closed = apply_power(U, f, n)
        seq = apply_sequential(U, f, n)
        ts = np.linspace(0, float(support_end(f)) + 1, 97)
        a, b = evaluate_many(closed, ts), evaluate_many(seq, ts)
        err = float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))
        out.append(Report.make("unbounded.power_formula", U, {"n": n}, err, 0.0, 1e-12, "abs", CLOSED,
                               "power-formula"))
    for n in (1, 3, 6, 10):
        if space.is_c0:
            f = random_continuous(rng, space=space, zero_at_start=True)
            fn = norms.norm(f, space).value
            got = norms.norm(right_inverse_power(U, f, n), space).value
            out.append(Report.make("unbounded.s_decay", U, {"n": n, "f(0)": 0}, got,
                                   s_power_bound_simple(U, n) * fn * (1 + 1e-10), 0.0, "le", DERIVED,
                                   "right-inverse-decay"))
            f = random_continuous(rng, space=space)
            fn = norms.norm(f, space).value
            got = norms.norm(right_inverse_power(U, f, n), space).value
            out.append(Report.make("unbounded.s_decay_ramp_aware", U, {"n": n},
                                   got, s_power_bound(U, fn, evaluate(f, Fraction(0)), n) * (1 + 1e-10), 0.0,
                                   "le", DERIVED, "right-inverse-decay"))
        else:
            f = random_finite(rng, space=space)
            fn = norms.norm(f, space).value
            got = norms.norm(right_inverse_power(U, f, n), space).value
            out.append(Report.make("unbounded.s_decay", U, {"n": n}, got,
                                   s_power_bound_simple(U, n) * fn * (1 + 1e-10), 0.0, "le", CLOSED,
                                   "right-inverse-decay"))
    for n, m in ((1, 3), (2, 6), (3, 12)):
        wit = unboundedness_witness(U, n, m)
        got = norms.norm(apply_power(U, wit.fn, n), space)
        out.append(Report.make("unbounded.witness_growth", U, {"n": n, "m": m, "bound_form": wit.bound_form},
                               got, wit.lower_bound, 1e-9 * wit.lower_bound, "ge", CLOSED,
                               "unboundedness-witness"))
    w = U.w.real
    decays = PiecewiseFn((Segment(0, math.inf, base=w, B=-1),), None, space)
    faster = PiecewiseFn((Segment(0, math.inf, base=w, B=-2),), None, space)
    out.append(Report.make("unbounded.domain", U, {"f": "w^-t", "n": 1}, float(in_domain(U, decays, 1).in_domain),
                           0.0, 0.0, "abs", CLOSED, "domain-of-power"))
    out.append(Report.make("unbounded.domain", U, {"f": "w^-2t", "n": 1}, float(in_domain(U, faster, 1).in_domain),
                           1.0, 0.0, "abs", CLOSED, "domain-of-power"))
    out.extend(_spectrum_reports(U))
    return out


RUNNERS = {
    "norms": suite_norms,
    "periodic": suite_periodic,
    "eigen": suite_eigen,
    "transitivity": suite_transitivity,
    "unbounded": suite_unbounded,
}


def run(spec: ShiftSpec, suite="all", seed=0, tol=1e-9):
    """All reports of ``suite`` (or every suite) for ``spec``; deterministic in ``seed``."""
    names = SUITES if suite == "all" else (suite,)
    out = []
    for name in names:
        rng = rng_for([int(seed), SUITES.index(name)])
        out.extend(RUNNERS[name](spec, rng, tol))
    return out
