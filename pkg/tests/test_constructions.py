import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shiftchaos.constructions import (
    CLOSED,
    DERIVED,
    LambdaOutOfDisk,
    NotInKernel,
    PeriodTooSmall,
    ProfileMismatch,
    default_kernel_profile,
    eigenvector,
    eigenvector_bounded_c0,
    eigenvector_bounded_lp,
    eigenvector_unbounded,
    modulus_position,
    periodic_density_closed_form,
    periodic_density_gap,
    periodic_point,
    periodic_point_bounded,
    periodic_point_unbounded,
    transitivity_witness,
)
from shiftchaos.norms import distance, lp_norm, norm, oracle_lp_norm, sup_norm
from shiftchaos.operators import ContinuityViolation, ShiftSpec, apply, apply_power, right_inverse
from shiftchaos.piecewise import (
    PiecewiseFn,
    Segment,
    evaluate,
    evaluate_many,
    exp_scale,
    hat,
    indicator,
    is_continuous,
    materialize_tail,
    ramp,
    zero,
)
from shiftchaos.sampling import random_kernel, random_lambda, rng_for

from conftest import ALL_SPECS, continuous_fns, piecewise_fns


def spec_id(s):
    return f"{s.space}-{s.kind}-{s.w}-{s.a}"


class TestModulus:
    def test_three_way(self):
        assert modulus_position(1, 2) == -1
        assert modulus_position(2j, 2) == 0
        assert modulus_position(3, 2) == 1

    def test_band(self):
        assert modulus_position(2 * (1 + 1e-13), 2) == 0
        assert modulus_position(2 * (1 + 1e-9), 2) == 1

    @given(st.floats(0, 2 * math.pi))
    def test_rotation_invariant(self, theta):
        for r in (0.5, 2.0, 3.0):
            assert modulus_position(cmath.rect(r, theta), 2) == modulus_position(r, 2)


class TestPeriodicBounded:
    def test_steps_example(self, lp1_bounded):
        pp = periodic_point_bounded(lp1_bounded, indicator(0, 1, "Lp:1"), 1)
        assert [evaluate(pp.fn, t) for t in (0.5, 1.5, 2.5)] == [1, 0.5, 0.25]
        assert lp_norm(pp.fn, 1).value == pytest.approx(2.0, abs=1e-14)
        o = oracle_lp_norm(pp.fn, 1)
        assert abs(o.value - 2.0) <= o.err_bound + 1e-12
        assert pp.truncation_K == "closed-form" and pp.provenance == CLOSED

    def test_exact_fixed_point(self, lp1_bounded):
        pp = periodic_point_bounded(lp1_bounded, indicator(0, 2, "Lp:1"), 2)
        assert apply_power(lp1_bounded, pp.fn, 2) == pp.fn
        assert pp.residual.value == 0

    def test_density_examples(self, lp1_bounded):
        x = indicator(0, 1, "Lp:1")
        assert periodic_density_gap(lp1_bounded, x, 1).value == pytest.approx(1.0, abs=1e-13)
        assert periodic_density_gap(lp1_bounded, x, 4).value == pytest.approx(1 / 15, abs=1e-13)

    def test_density_monotone(self, lp1_bounded):
        x = indicator(0, 1, "Lp:1")
        seq = [periodic_density_gap(lp1_bounded, x, N).value for N in range(1, 13)]
        assert all(b < a for a, b in zip(seq, seq[1:]))
        assert seq[-1] < 1e-3

    @pytest.mark.parametrize("p", [1, 1.5, 2, 3])
    def test_density_closed_form(self, p):
        spec = ShiftSpec(f"Lp:{p}", "bounded", complex(0.6, -1.7), Fraction(1, 2))
        x = random_kernel(rng_for(int(p * 10)), spec, 3, complex_values=True)
        xn = norm(x, spec.space).value
        got = periodic_density_gap(spec, x, 3)
        assert got.value == pytest.approx(periodic_density_closed_form(spec, xn, 3, p), rel=1e-10)

    def test_period_too_small(self, lp1_bounded):
        with pytest.raises(PeriodTooSmall):
            periodic_density_gap(lp1_bounded, indicator(0, 3, "Lp:1"), 2)

    def test_not_in_kernel(self, lp1_bounded):
        with pytest.raises(NotInKernel):
            periodic_point(lp1_bounded, indicator(0, 2, "Lp:1"), 1)
        with pytest.raises(NotInKernel):
            periodic_point(lp1_bounded, zero("Lp:1"), 1)

    def test_c0_needs_zero_start(self, c0_bounded):
        pp = periodic_point(c0_bounded, hat(0, 1, space="C0"), 1)
        assert is_continuous(pp.fn)
        with pytest.raises(ContinuityViolation):
            periodic_point(c0_bounded, ramp(0, 1, 1, 0, "C0"), 1)


class TestPeriodicSeries:
    def test_example(self, lp1_unbounded):
        pp = periodic_point_unbounded(lp1_unbounded, indicator(0, 1, "Lp:1"), 1, 1e-10)
        # the last kept block k=9 has majorant 2**-36 < 1e-10; k=8 gives 2**-28
        assert pp.truncation_K == 10
        assert pp.relative_residual <= 2e-10

    def test_first_block(self, lp1_unbounded):
        pp = periodic_point_unbounded(lp1_unbounded, indicator(0, 1, "Lp:1"), 1)
        s = right_inverse(lp1_unbounded, indicator(0, 1, "Lp:1"))
        ts = np.linspace(1, 1.99, 7)
        assert np.allclose(evaluate_many(pp.fn, ts), 2 ** (-ts + 1), rtol=1e-14)
        assert np.allclose(evaluate_many(pp.fn, ts), evaluate_many(s, ts), rtol=1e-14)

    @pytest.mark.parametrize("spec", [s for s in ALL_SPECS if not s.bounded], ids=spec_id)
    @pytest.mark.parametrize("N", [1, 2, 3, 5, 8])
    def test_residual(self, spec, N):
        x = random_kernel(rng_for([N, 7]), spec, N)
        pp = periodic_point(spec, x, N, 1e-9)
        assert pp.relative_residual <= 2e-9
        assert pp.provenance == (DERIVED if spec.space.is_c0 else CLOSED)

    def test_to_dict(self, lp1_unbounded):
        d = periodic_point(lp1_unbounded, indicator(0, 1, "Lp:1"), 1).to_dict()
        assert d["object"] == "periodic_point" and d["truncation_K"] == 10


class TestEigenBounded:
    def test_lambda_zero(self, lp1_bounded):
        x = indicator(0, 1, "Lp:1")
        assert eigenvector(lp1_bounded, 0, x).fn == x

    def test_lambda_one(self, lp1_bounded):
        ep = eigenvector_bounded_lp(lp1_bounded, 1)
        ts = np.linspace(0, 9.9, 34)
        assert np.array_equal(evaluate_many(apply(lp1_bounded, ep.fn), ts), evaluate_many(ep.fn, ts))
        assert ep.residual.value <= 1e-15
        assert lp_norm(ep.fn, 1).value == pytest.approx(2.0, abs=1e-14)

    @pytest.mark.parametrize("lam", [2, 2j, -2, 3])
    def test_refuses(self, lp1_bounded, c0_bounded, lam):
        with pytest.raises(LambdaOutOfDisk):
            eigenvector(lp1_bounded, lam)
        with pytest.raises(LambdaOutOfDisk):
            eigenvector(c0_bounded, lam)

    def test_c0_default_profile(self, c0_bounded):
        ep = eigenvector_bounded_c0(c0_bounded, 1)
        for t in (0.0, 0.4, 1.0, 2.7):
            assert evaluate(ep.fn, t) == pytest.approx(2**-t, rel=1e-13)
        assert is_continuous(ep.fn)
        assert ep.passes

    def test_c0_lambda_zero(self, c0_bounded):
        ep = eigenvector_bounded_c0(c0_bounded, 0, hat(0, 1, space="C0"))
        assert evaluate(ep.fn, 1.5) == 0
        assert ep.relative_residual == 0

    def test_c0_profile_mismatch(self, c0_bounded):
        with pytest.raises(ProfileMismatch):
            eigenvector_bounded_c0(c0_bounded, 1, ramp(0, 1, 1, 0, "C0"))

    @pytest.mark.parametrize("spec", [s for s in ALL_SPECS if s.bounded], ids=spec_id)
    @given(u=st.floats(0, 0.999), theta=st.floats(-math.pi, math.pi))
    def test_residual(self, spec, u, theta):
        lam = cmath.rect(abs(spec.w) * u, theta)
        ep = eigenvector(spec, lam)
        assert ep.relative_residual <= 2e-9

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_norm_identity(self, p):
        spec = ShiftSpec(f"Lp:{p}", "bounded", 2, 1)
        lam = 1.3 - 0.4j
        ep = eigenvector(spec, lam)
        expect = (1 / (1 - abs(lam / 2) ** p)) ** (1 / p)
        assert norm(ep.fn, spec.space).value == pytest.approx(expect, rel=1e-12)


class TestEigenUnbounded:
    def test_lambda_zero(self, lp1_unbounded):
        x = indicator(0, 1, "Lp:1")
        assert eigenvector(lp1_unbounded, 0, x).fn == x

    def test_lambda_one(self, lp1_unbounded):
        ep = eigenvector_unbounded(lp1_unbounded, 1)
        ts = np.array([1.0, 1.5, 2.25, 3.5])
        k = np.floor(ts)
        assert np.allclose(evaluate_many(ep.fn, ts), 2 ** (-k * ts + k * (k + 1) / 2), rtol=1e-13)
        assert norm(ep.fn, "Lp:1").value >= 1.0

    @pytest.mark.parametrize("spec", [s for s in ALL_SPECS if not s.bounded], ids=spec_id)
    def test_lambda_ten(self, spec):
        ep = eigenvector(spec, 10)
        assert ep.passes and isinstance(ep.truncation_K, int)

    @pytest.mark.parametrize("spec", [s for s in ALL_SPECS if not s.bounded], ids=spec_id)
    @given(r=st.floats(0, 10), theta=st.floats(-math.pi, math.pi))
    def test_residual(self, spec, r, theta):
        ep = eigenvector(spec, cmath.rect(r, theta))
        assert ep.relative_residual <= 2e-9


class TestTransitivity:
    def test_example(self, lp1_bounded):
        x = indicator(0, 1, "Lp:1")
        tw = transitivity_witness(lp1_bounded, x, x, 0.2)
        n, z = tw
        assert n == 3
        assert z == (x + indicator(3, 4, "Lp:1", height=0.125)) or \
            np.allclose(evaluate_many(z, [0.5, 3.5, 2.5]), [1, 0.125, 0])
        assert tw.distance.value == pytest.approx(0.125, abs=1e-15)
        assert apply_power(lp1_bounded, z, 3) == x

    def test_zero_pair(self, lp1_bounded):
        tw = transitivity_witness(lp1_bounded, zero("Lp:1"), zero("Lp:1"), 0.1)
        assert tw.n == 1 and tw.z.is_zero

    def test_unbounded_example(self, lp1_unbounded):
        x = indicator(0, 1, "Lp:1")
        tw = transitivity_witness(lp1_unbounded, x, x, 0.01)
        assert tw.distance.value < 0.01
        assert apply_power(lp1_unbounded, tw.z, tw.n) == x
        assert tw.provenance == DERIVED
        # decay 2**(-n(n-1)/2) caps the search
        n_cap = 1 + math.ceil((1 + math.sqrt(1 + 8 * math.log2(100))) / 2)
        assert tw.n <= n_cap

    def test_bad_eps(self, lp1_bounded):
        with pytest.raises(ValueError):
            transitivity_witness(lp1_bounded, zero(), zero(), 0)

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=spec_id)
    @given(data=st.data(), eps=st.floats(1e-6, 0.5))
    def test_contract(self, spec, data, eps):
        if spec.space.is_c0:
            x, y = data.draw(continuous_fns(span=2)), data.draw(continuous_fns(span=2))
        else:
            x = data.draw(piecewise_fns(span=2, complex_values=True))
            y = data.draw(piecewise_fns(span=2, complex_values=True))
        tw = transitivity_witness(spec, x, y, eps)
        assert distance(tw.z, x, spec.space).value < eps
        assert apply_power(spec, tw.z, tw.n) == y.with_space(spec.space)
        if spec.bounded:
            expect = abs(spec.w) ** -tw.n * norm(y, spec.space).value
            assert tw.distance.value == pytest.approx(expect, abs=1e-10)
