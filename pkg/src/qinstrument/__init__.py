"""Discrete quantum measurements: instruments, their classification,
unitary dilations and simulation on finite-dimensional spaces."""
from .classify import (
    InstrumentClassification,
    Kind,
    OutcomeClassification,
    check_remark2,
    classify_instrument,
    classify_outcome,
)
from .dilation import DilationModel, dilate, extract_instrument, final_state, read_pointer
from .errors import *  # noqa: F401,F403
from .matcore import (
    DEFAULT_TOL,
    PolarFactors,
    SpectralDecomposition,
    extend_isometry,
    hermitian_eig,
    partial_trace_2,
    polar_factorize,
    positive_sqrt,
    range_projector,
    tensor,
)
from .measurement import (
    OutcomeDistribution,
    SelectiveOutcome,
    apply_nonselective,
    apply_selective,
    has_sharp_value,
    probabilities,
    sample_outcome,
    sharp_value_decomposition_check,
)
from .quantum_types import (
    DensityOperator,
    Instrument,
    Observable,
    Povm,
    StateVector,
    instrument_from_povm,
    luders_instrument,
    maximal_refinement,
    povm_of,
)

__version__ = "0.1.0"
