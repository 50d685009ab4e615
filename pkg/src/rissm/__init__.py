"""Link-level simulation and union-bound analysis of RIS-assisted spatial
modulation over Rayleigh fading."""

from .analytic import (
    abep_curve,
    abep_union_bound,
    cpep,
    mgf_gain_square,
    mgf_quadratic_form,
    pair_moments,
    upep_correct_antenna,
    upep_cross_antenna,
    xi_moments,
)
from .channel import (
    FadingChannel,
    PhaseErrorSpec,
    RisProfile,
    align_phases,
    apply_phase_error,
    composite_gain,
    composite_gains,
    phase_residual_pdf,
    sample_fading,
)
from .modem import (
    Constellation,
    Scheme,
    SmSymbol,
    build_constellation,
    hamming_distance,
    ml_detect,
    sm_demap,
    sm_map,
)
from .montecarlo import BerCurve, SimConfig, simulate_curve, simulate_point
from .quadrature import gcq_nodes, integrate_reference, q_function

__version__ = "0.1.0"

__all__ = [
    "abep_curve",
    "abep_union_bound",
    "cpep",
    "mgf_gain_square",
    "mgf_quadratic_form",
    "pair_moments",
    "upep_correct_antenna",
    "upep_cross_antenna",
    "xi_moments",
    "FadingChannel",
    "PhaseErrorSpec",
    "RisProfile",
    "align_phases",
    "apply_phase_error",
    "composite_gain",
    "composite_gains",
    "phase_residual_pdf",
    "sample_fading",
    "Constellation",
    "Scheme",
    "SmSymbol",
    "build_constellation",
    "hamming_distance",
    "ml_detect",
    "sm_demap",
    "sm_map",
    "BerCurve",
    "SimConfig",
    "simulate_curve",
    "simulate_point",
    "gcq_nodes",
    "integrate_reference",
    "q_function",
]
