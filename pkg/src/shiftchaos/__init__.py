"""Weighted backward shifts on Lp(0, inf) and C0[0, inf).

Exact piecewise exp-times-polynomial algebra, norms with error bounds, the
shift operators with powers and right inverses, periodic points, eigenvectors,
transitivity witnesses and spectrum classification.
"""
from ._kernels import BACKEND
from .constructions import (
    EigenPair,
    LambdaOutOfDisk,
    NotInKernel,
    PeriodicPoint,
    PeriodTooSmall,
    ProfileMismatch,
    TransitivityWitness,
    eigenvector,
    eigenvector_bounded_c0,
    eigenvector_bounded_lp,
    eigenvector_unbounded,
    periodic_density_gap,
    periodic_point,
    periodic_point_bounded,
    periodic_point_unbounded,
    transitivity_witness,
)
from .norms import (
    DivergentNorm,
    NormResult,
    ToleranceNotMet,
    distance,
    lp_norm,
    norm,
    sup_norm,
    tail_remainder_bound,
)
from .operators import (
    ContinuityViolation,
    DomainVerdict,
    IndexTooSmall,
    InvalidSpec,
    NotEventuallyZero,
    NotInDomain,
    ShiftSpec,
    apply,
    apply_power,
    in_domain,
    kernel_element,
    right_inverse,
    right_inverse_power,
    unboundedness_witness,
)
from .piecewise import (
    GeometricTail,
    IncommensurateStep,
    IncompatibleTails,
    PiecewiseFn,
    Segment,
    Space,
    add,
    evaluate,
    exp_scale,
    indicator,
    materialize_tail,
    shift_left,
    shift_right,
    support_end,
)
from .report import Report
from .spectrum import SpectrumClass, classify, gelfand_bound_check, spectrum_grid

__version__ = "0.1.0"
