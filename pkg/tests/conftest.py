from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from shiftchaos.operators import ShiftSpec
from shiftchaos.piecewise import PiecewiseFn, Segment

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

finite_floats = st.floats(min_value=-4, max_value=4, allow_nan=False, allow_infinity=False)


@st.composite
def piecewise_fns(draw, span=4, q=4, max_pieces=4, max_degree=2, complex_values=False, space=None):
    """Eventually-zero functions on the 1/q grid inside [0, span)."""
    cuts = sorted(draw(st.sets(st.integers(0, span * q), min_size=2, max_size=max_pieces + 1)))
    segs = []
    for lo, hi in zip(cuts, cuts[1:]):
        deg = draw(st.integers(0, max_degree))
        if complex_values:
            poly = tuple(complex(draw(finite_floats), draw(finite_floats)) for _ in range(deg + 1))
        else:
            poly = tuple(draw(finite_floats) for _ in range(deg + 1))
        gamma = draw(st.sampled_from([0.0, 0.0, -1.0, 0.5])) + draw(st.floats(-0.5, 0.5))
        segs.append(Segment(Fraction(lo, q), Fraction(hi, q), gamma=gamma, poly=poly))
    return PiecewiseFn(tuple(segs), None, space)


@st.composite
def continuous_fns(draw, span=4, q=4, max_knots=5, zero_at_start=False):
    cuts = sorted({0} | draw(st.sets(st.integers(1, span * q), min_size=1, max_size=max_knots)))
    vals = [draw(finite_floats) for _ in cuts]
    vals[-1] = 0.0
    if zero_at_start:
        vals[0] = 0.0
    segs = []
    for (lo, hi), (v0, v1) in zip(zip(cuts, cuts[1:]), zip(vals, vals[1:])):
        h = (hi - lo) / q
        bump = draw(st.sampled_from([0.0, draw(finite_floats)]))
        segs.append(Segment(Fraction(lo, q), Fraction(hi, q), poly=(v0, (v1 - v0) / h + bump * h, -bump)))
    return PiecewiseFn(tuple(segs), None, "C0")


@pytest.fixture
def lp1_bounded():
    return ShiftSpec("Lp:1", "bounded", 2, 1)


@pytest.fixture
def lp1_unbounded():
    return ShiftSpec("Lp:1", "unbounded", 2, 1)


@pytest.fixture
def c0_bounded():
    return ShiftSpec("C0", "bounded", 2, 1)


@pytest.fixture
def c0_unbounded():
    return ShiftSpec("C0", "unbounded", 2, 1)


ALL_SPECS = [
    ShiftSpec("Lp:1", "bounded", 2, 1),
    ShiftSpec("Lp:2", "bounded", complex(1.2, -1.1), Fraction(1, 2)),
    ShiftSpec("C0", "bounded", -3, 1),
    ShiftSpec("Lp:1", "unbounded", 2, 1),
    ShiftSpec("Lp:2", "unbounded", 1.5, Fraction(1, 2)),
    ShiftSpec("C0", "unbounded", 2, 1),
    ShiftSpec("C0", "unbounded", 3, Fraction(1, 4)),
]


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    order = sorted(results, key=lambda k: (int(str(k).rstrip("ab")), str(k)))
    for key in order:
        terminalreporter.write_line(results[key])
