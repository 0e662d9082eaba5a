"""Disturbance, measurement strength and orthogonality of quantum measurements."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .config import DEFAULT, STRICT, Tolerances
from .constructions import (
    BlockSpec,
    Fiducial,
    block_projective,
    computational_basis,
    degenerate_projective,
    hesse_sic,
    mub_complete,
    named_povm,
    projective_from_basis,
    random_povm,
    reflected_sic,
    sic_from_fiducial,
    tetrahedron_sic,
    trine,
)
from .linalg import OperatorBasis, hs_inner, psd_sqrt, standard_hermitian_basis, vectorize
from .majorization import (
    span_bound_check,
    ea_gram_spectrum,
    sqrt_overlap_gap,
    majorization_compare,
    ea_norm_comparison,
)
from .measures import (
    MeasureReport,
    brukner_zeilinger_information,
    closed_form_reference,
    decomposition_residual,
    disturbance,
    expected_skew_gain,
    luders_superoperator,
    measure_report,
    measurement_strength,
    orthogonality,
    skew_information,
    state_disturbance,
)
from .optimizer import (
    OptimizationConfig,
    OptimizationResult,
    PovmParameterization,
    conjecture_report,
    finite_difference_check,
    minimize,
    to_povm,
)
from .povm import (
    POVM,
    Classification,
    Effect,
    born_probabilities,
    classify,
    gram_sqrt,
    luders_channel_apply,
    luders_update,
    new_povm,
)
