import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shiftchaos.norms import norm, sup_norm
from shiftchaos.operators import (
    ContinuityViolation,
    IndexTooSmall,
    InvalidSpec,
    NotEventuallyZero,
    NotInDomain,
    ShiftSpec,
    apply,
    apply_power,
    apply_sequential,
    in_domain,
    kernel_element,
    parse_complex,
    right_inverse,
    right_inverse_power,
    right_inverse_sequential,
    s_power_bound,
    s_power_bound_simple,
    unboundedness_witness,
)
from shiftchaos.piecewise import (
    GeometricTail,
    PiecewiseFn,
    Segment,
    evaluate,
    evaluate_many,
    hat,
    indicator,
    is_continuous,
    ramp,
    support_end,
)

from conftest import ALL_SPECS, continuous_fns, piecewise_fns

RAMP_SUP_N3 = 0.132684461355760747133344339309  # mpmath, sup of S^3 (1 - t) at w=2, a=1
FOUR_OVER_LN2 = 5.77078016355585362943969872401


def spec_id(s):
    return f"{s.space}-{s.kind}-{s.w}-{s.a}"


def fn_for(spec, data, **kw):
    if spec.space.is_c0:
        return data.draw(continuous_fns(**kw))
    return data.draw(piecewise_fns(complex_values=True, **kw)).with_space(spec.space)


class TestSpec:
    def test_parse_complex(self):
        assert parse_complex("2") == 2
        assert parse_complex("1.5-0.5i") == complex(1.5, -0.5)
        assert parse_complex("2i") == 2j
        assert parse_complex("-3+1j") == complex(-3, 1)
        assert parse_complex([1, 2]) == complex(1, 2)

    @pytest.mark.parametrize("kind,w,a", [("bounded", 0.5, 1), ("bounded", 1j, 1), ("unbounded", 1j * 2, 1),
                                          ("unbounded", 1, 1), ("bounded", 2, 0), ("bounded", 2, -1),
                                          ("sideways", 2, 1)])
    def test_invalid(self, kind, w, a):
        with pytest.raises(InvalidSpec):
            ShiftSpec("Lp:2", kind, w, a)

    def test_round_trip(self):
        s = ShiftSpec("Lp:1.5", "bounded", complex(1, 2), Fraction(1, 3))
        assert ShiftSpec.from_dict(s.to_dict()) == s


class TestApply:
    def test_bounded_example(self, lp1_bounded):
        assert apply(lp1_bounded, indicator(1, 2)) == indicator(0, 1, height=2.0).with_space("Lp:1") or \
            np.allclose(evaluate_many(apply(lp1_bounded, indicator(1, 2)), [0.5, 1.5]), [2, 0])

    def test_unbounded_example(self, lp1_unbounded):
        g = apply(lp1_unbounded, indicator(1, 2))
        for t in (0.0, 0.3, 0.9):
            assert evaluate(g, t) == pytest.approx(2**t, rel=1e-15)
        assert evaluate(g, 1.2) == 0

    def test_kernel_annihilated(self, lp1_bounded):
        assert apply(lp1_bounded, indicator(0, 1)).is_zero

    def test_power_example_unbounded(self, lp1_unbounded):
        g = apply_power(lp1_unbounded, indicator(2, 3), 2)
        for t in (0.0, 0.5):
            assert evaluate(g, t) == pytest.approx(2 ** (2 * t + 1), rel=1e-15)

    def test_power_example_bounded(self):
        assert apply_power(ShiftSpec("Lp:2", "bounded", 3, 1), indicator(0, 2), 2).is_zero

    def test_power_zero_is_identity(self, lp1_bounded):
        f = indicator(0, 3)
        assert apply_power(lp1_bounded, f, 0) is f

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=spec_id)
    @given(data=st.data(), n=st.integers(1, 6))
    def test_power_law(self, spec, data, n):
        f = fn_for(spec, data)
        closed = apply_power(spec, f, n)
        seq = apply_sequential(spec, f, n)
        ts = np.linspace(0, float(support_end(f)) + 0.5, 53)
        a, b = evaluate_many(closed, ts), evaluate_many(seq, ts)
        assert np.all(np.abs(a - b) <= 1e-12 * np.maximum(1.0, np.abs(b)))

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=spec_id)
    @given(data=st.data(), n=st.integers(1, 3))
    def test_nilpotent_on_kernel(self, spec, data, n):
        f = data.draw(piecewise_fns(span=1, q=4 * n))
        prof = f if not spec.space.is_c0 else hat(0, 1)
        k = kernel_element(spec, n, _stretch(prof, n * spec.a))
        assert apply_power(spec, k, n).is_zero


def _stretch(f, span):
    from shiftchaos.sampling import _rescale

    return _rescale(f, span, f.space)


class TestRightInverse:
    def test_lp_example(self, lp1_bounded):
        g = right_inverse(ShiftSpec("Lp:1", "unbounded", 2, 1), indicator(0, 1))
        for t in (1.0, 1.5):
            assert evaluate(g, t) == pytest.approx(2 ** (-(t - 1)), rel=1e-15)
        assert evaluate(g, 0.5) == 0

    def test_c0_example(self, c0_unbounded):
        f = ramp(0, 1, 1, 0, "C0")
        g = right_inverse(c0_unbounded, f)
        assert is_continuous(g)
        for t in (0.0, 0.4, 0.9):
            assert evaluate(g, t) == pytest.approx(t, abs=1e-15)
        for t in (1.0, 1.25, 1.75):
            assert evaluate(g, t) == pytest.approx(2 ** (-(t - 1)) * (2 - t), rel=1e-14)

    def test_power_example(self):
        g = right_inverse_power(ShiftSpec("Lp:1", "unbounded", 2, 1), indicator(0, 1), 2)
        for t in (2.0, 2.6):
            assert evaluate(g, t) == pytest.approx(2 ** (-2 * t + 3), rel=1e-14)

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=spec_id)
    @given(data=st.data())
    def test_structural_identity(self, spec, data):
        f = fn_for(spec, data)
        assert apply(spec, right_inverse(spec, f)) == f

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=spec_id)
    @given(data=st.data(), n=st.integers(1, 5))
    def test_power_matches_sequential(self, spec, data, n):
        f = fn_for(spec, data)
        closed = right_inverse_power(spec, f, n)
        seq = right_inverse_sequential(spec, f, n)
        ts = np.linspace(0, float(support_end(closed)) + 0.5, 61)
        a, b = evaluate_many(closed, ts), evaluate_many(seq, ts)
        assert np.all(np.abs(a - b) <= 1e-12 * np.maximum(1.0, np.abs(b)))
        assert apply_power(spec, closed, n) == f

    def test_c0_continuity(self):
        spec = ShiftSpec("C0", "bounded", -3, 1)
        g = right_inverse_power(spec, ramp(0, 2, 1, 0, "C0"), 3)
        assert is_continuous(g)

    def test_rejects_tails(self, lp1_bounded):
        f = PiecewiseFn((), GeometricTail((Segment(0, 1),), 1, 0.5))
        with pytest.raises(NotEventuallyZero):
            right_inverse(lp1_bounded, f)


class TestDecay:
    @pytest.mark.parametrize("p", ["Lp:1", "Lp:2"])
    @given(f=piecewise_fns(complex_values=True), n=st.integers(1, 10))
    def test_lp_decay(self, p, f, n):
        spec = ShiftSpec(p, "unbounded", 2, 1)
        lhs = norm(right_inverse_power(spec, f, n), p).value
        assert lhs <= s_power_bound_simple(spec, n) * norm(f, p).value * (1 + 1e-10) + 1e-300

    @given(f=continuous_fns(zero_at_start=True), n=st.integers(1, 10))
    def test_c0_decay_when_zero_at_start(self, f, n):
        spec = ShiftSpec("C0", "unbounded", 2, 1)
        lhs = sup_norm(right_inverse_power(spec, f, n)).value
        assert lhs <= s_power_bound_simple(spec, n) * sup_norm(f).value * (1 + 1e-10)

    @given(f=continuous_fns(), n=st.integers(1, 10))
    def test_c0_ramp_aware_bound(self, f, n):
        spec = ShiftSpec("C0", "unbounded", 2, 1)
        lhs = sup_norm(right_inverse_power(spec, f, n)).value
        rhs = s_power_bound(spec, sup_norm(f).value, evaluate(f, 0), n)
        assert lhs <= rhs * (1 + 1e-10)

    def test_ramp_exceeds_simple_bound(self, c0_unbounded):
        g = right_inverse_power(c0_unbounded, ramp(0, 1, 1, 0, "C0"), 3)
        r = sup_norm(g)
        assert abs(r.value - RAMP_SUP_N3) <= r.err_bound + 1e-15
        assert r.value > s_power_bound_simple(c0_unbounded, 3)
        assert s_power_bound(c0_unbounded, 1.0, 1.0, 3) == pytest.approx(RAMP_SUP_N3, rel=1e-14)

    def test_bounded_factor(self, lp1_bounded):
        assert s_power_bound_simple(lp1_bounded, 3) == 0.125


class TestOperatorNorm:
    @pytest.mark.parametrize("spec", [s for s in ALL_SPECS if s.bounded], ids=spec_id)
    def test_attained(self, spec):
        a = spec.a
        f = hat(a, a + 1, space=spec.space) if spec.space.is_c0 else indicator(a, a + 1, spec.space)
        ratio = norm(apply(spec, f), spec.space).value / norm(f, spec.space).value
        assert ratio == pytest.approx(abs(spec.w), rel=1e-13)

    @pytest.mark.parametrize("spec", [s for s in ALL_SPECS if s.bounded], ids=spec_id)
    @given(data=st.data())
    def test_bounded_by_w(self, spec, data):
        f = fn_for(spec, data)
        n = norm(f, spec.space).value
        if n > 0:
            assert norm(apply(spec, f), spec.space).value <= abs(spec.w) * n * (1 + 1e-9) + 1e-12


class TestDomain:
    def test_finite_always(self, lp1_unbounded):
        assert in_domain(lp1_unbounded, indicator(0, 5), 7)

    def test_slow_decay_rejected(self, lp1_unbounded):
        f = PiecewiseFn((Segment(0, math.inf, gamma=-math.log(2)),))
        v = in_domain(lp1_unbounded, f, 1)
        assert not v and v.witness
        with pytest.raises(NotInDomain):
            apply(lp1_unbounded, f)

    def test_faster_decay_accepted(self, lp1_unbounded):
        f = PiecewiseFn((Segment(0, math.inf, gamma=-2 * math.log(2)),))
        assert in_domain(lp1_unbounded, f, 1)
        assert not in_domain(lp1_unbounded, f, 2)

    def test_exact_base_arithmetic(self, lp1_unbounded):
        f = PiecewiseFn((Segment(0, math.inf, base=2.0, B=-1),))
        assert not in_domain(lp1_unbounded, f, 1)
        g = PiecewiseFn((Segment(0, math.inf, base=2.0, B=-2),))
        assert in_domain(lp1_unbounded, g, 1)

    def test_gaussian_always(self, lp1_unbounded):
        f = PiecewiseFn((Segment(0, math.inf, base=2.0, C=-1),))
        assert in_domain(lp1_unbounded, f, 50)

    def test_bounded_everything(self, lp1_bounded):
        f = PiecewiseFn((Segment(0, math.inf, gamma=-0.01),))
        assert in_domain(lp1_bounded, f, 3)


class TestKernel:
    def test_restriction(self, lp1_bounded):
        assert kernel_element(lp1_bounded, 2, indicator(0, 5)) == indicator(0, 2).with_space("Lp:1")

    def test_c0_hat(self, c0_bounded):
        k = kernel_element(c0_bounded, 1, hat(0, 1))
        assert apply(c0_bounded, k).is_zero

    def test_c0_jump_rejected(self, c0_bounded):
        with pytest.raises(ContinuityViolation):
            kernel_element(c0_bounded, 1, indicator(0, 1))

    def test_bad_n(self, lp1_bounded):
        with pytest.raises(ValueError):
            kernel_element(lp1_bounded, 0, indicator(0, 1))


class TestWitness:
    def test_lp_example(self, lp1_unbounded):
        wit = unboundedness_witness(lp1_unbounded, 1, 3)
        f, bound = wit
        assert bound == pytest.approx(4.0)
        assert norm(f, "Lp:1").value == pytest.approx(1.0)
        assert norm(apply(lp1_unbounded, f), "Lp:1").value == pytest.approx(FOUR_OVER_LN2, rel=1e-13)

    def test_c0_example(self, c0_unbounded):
        f, bound = unboundedness_witness(c0_unbounded, 1, 2)
        assert bound == pytest.approx(2.0)
        g = apply(c0_unbounded, f)
        assert sup_norm(g).value >= abs(evaluate(g, 1)) - 1e-12 >= bound - 1e-12
        assert sup_norm(f).value == pytest.approx(1.0)

    def test_index_too_small(self, lp1_unbounded, c0_unbounded):
        with pytest.raises(IndexTooSmall):
            unboundedness_witness(lp1_unbounded, 3, 2)
        with pytest.raises(IndexTooSmall):
            unboundedness_witness(c0_unbounded, 3, 2)

    def test_bounded_refused(self, lp1_bounded):
        with pytest.raises(InvalidSpec):
            unboundedness_witness(lp1_bounded, 1, 3)
