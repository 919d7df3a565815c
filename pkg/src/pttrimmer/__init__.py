"""PT-symmetric optical trimmer: spectra, PT-phase checks and single-photon dynamics."""

__version__ = "0.1.0"

from .core import PhaseClass, SystemParams, build_hamiltonian, classify_phase
from .dynamics import (
    broken_minima_time,
    evolve_closed_broken,
    evolve_closed_symmetric,
    oscillation_period,
    peak_active_occupation,
    reconstruct_beta,
    sample_trajectory,
)
from .eigen import Spectrum, TrimmerSpectralData, char_poly, eig, roots_aberth, trimmer_spectrum
from .oracle import IntegratorConfig, compare_trajectories, propagate_expm, propagate_rk4
from .ptcheck import apply_pt, localization_weight, phase_diagram_row, pt_residual
from .state import AmplitudeState, Method, Site, Trajectory

__all__ = [
    "AmplitudeState", "IntegratorConfig", "Method", "PhaseClass", "Site", "Spectrum",
    "SystemParams", "Trajectory", "TrimmerSpectralData", "apply_pt", "broken_minima_time",
    "build_hamiltonian", "char_poly", "classify_phase", "compare_trajectories", "eig",
    "evolve_closed_broken", "evolve_closed_symmetric", "localization_weight",
    "oscillation_period", "peak_active_occupation", "phase_diagram_row", "propagate_expm",
    "propagate_rk4", "pt_residual", "reconstruct_beta", "roots_aberth", "sample_trajectory",
    "trimmer_spectrum",
]
