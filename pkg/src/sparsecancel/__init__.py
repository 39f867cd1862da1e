"""Sparse digital cancellation of receiver HD/IMD self-interference."""

__version__ = "0.1.0"

from .dictionary import (
    Dictionary,
    Factor,
    Model,
    TermDescriptor,
    build_dictionary,
    enumerate_terms,
    hd_term_count,
    imd_term_count,
)
from .distortion import DistortionSpec, ReceiveFrame, distort, hd_distortion, imd_distortion, make_frame
from .errors import (
    ConfigError,
    DegenerateColumnError,
    DegenerateInputError,
    InvalidArgumentError,
    SingularDictionaryError,
    SparseCancelError,
    UnderdeterminedError,
)
from .metrics import CancellationReport, make_report, reconstruct, residual_distortion_power
from .signal import awgn_block, fir_filter, generate_block, measure_power, set_power
from .solvers import (
    CholeskyState,
    LlsSolution,
    OmpSolution,
    cholesky_augment,
    lls_solve,
    omp_solve,
    omp_solve_reference,
)
