"""Multi-unitary 2x2 decomposition and limited-feedback MIMO precoding simulator."""

from .errors import DomainError, FormatError, SingularMatrixError
from .linalg import (
    SvdFactorization,
    conj_transpose,
    fro_norm,
    mat_inv,
    mat_mul,
    svd2x2,
)
from .decomposition import (
    GmudFactorization,
    GmudRotation,
    PhasePair,
    SpecialR,
    beam_alignment,
    beam_from_feedback,
    build_special_r,
    complete_orthonormal,
    gmud,
    phase_matrix,
    solve_rotations,
    steered_beams,
)
from .precoding import (
    SINR_CAP,
    GmudBeamParams,
    GridSpec,
    PrecodingMatrix,
    SinrReport,
    antenna_selection,
    expected_gamma,
    gmud_min_sinr,
    optimize_gmud,
    reg_inv,
)
from .feedback import (
    FeedbackBudget,
    GmudFeedback,
    RegInvFixedFeedback,
    RegInvSelectionFeedback,
    decode,
    encode,
    quantize_scalar,
    scheme_layout,
)
from .simulation import (
    BerCurve,
    BerPoint,
    ChannelSet,
    ReceiverInfo,
    SimConfig,
    crandn,
    demodulate,
    gen_channels,
    modulate,
    receive_detect,
    run_ber,
    transmit,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "FormatError",
    "SingularMatrixError",
    "SvdFactorization",
    "conj_transpose",
    "fro_norm",
    "mat_inv",
    "mat_mul",
    "svd2x2",
    "GmudFactorization",
    "GmudRotation",
    "PhasePair",
    "SpecialR",
    "beam_alignment",
    "beam_from_feedback",
    "build_special_r",
    "complete_orthonormal",
    "gmud",
    "phase_matrix",
    "solve_rotations",
    "steered_beams",
    "SINR_CAP",
    "GmudBeamParams",
    "GridSpec",
    "PrecodingMatrix",
    "SinrReport",
    "antenna_selection",
    "expected_gamma",
    "gmud_min_sinr",
    "optimize_gmud",
    "reg_inv",
    "FeedbackBudget",
    "GmudFeedback",
    "RegInvFixedFeedback",
    "RegInvSelectionFeedback",
    "decode",
    "encode",
    "quantize_scalar",
    "scheme_layout",
    "BerCurve",
    "BerPoint",
    "ChannelSet",
    "ReceiverInfo",
    "SimConfig",
    "crandn",
    "demodulate",
    "gen_channels",
    "modulate",
    "receive_detect",
    "run_ber",
    "transmit",
    "__version__",
]
