"""PT operator, eigenstate symmetry test and supermode localization."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import PhaseClass, SystemParams, classify_phase
from .eigen import TrimmerSpectralData, trimmer_spectrum
from .errors import DimensionError, ParameterError, PhaseMismatchError

PT_THRESHOLD = 1e-8


@dataclass(frozen=True)
class PtCheckResult:
    phase_angle: float
    residual: float
    symmetric: bool


def apply_pt(v) -> np.ndarray:
    """Mirror the passive and active cavities, then complex-conjugate."""
    v = np.asarray(v, dtype=complex)
    if v.shape != (3,):
        raise DimensionError(f"PT acts on 3-vectors, got shape {v.shape}")
    return np.conj(v[::-1])


def pt_residual(v, threshold: float = PT_THRESHOLD) -> PtCheckResult:
    """Distance of ``PT v`` from ``v`` up to the best global phase.

    For unit ``v`` the minimizing phase is ``arg <v|PT v>`` and the
    residual is ``||PT v - exp(i phi) v||``.
    """
    v = np.asarray(v, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ParameterError("PT residual of the zero vector is undefined")
    v = v / norm
    image = apply_pt(v)
    overlap = np.vdot(v, image)
    phi = cmath.phase(overlap) if overlap != 0 else 0.0
    if phi <= -math.pi:
        phi += 2 * math.pi
    residual = float(np.linalg.norm(image - cmath.exp(1j * phi) * v))
    return PtCheckResult(phi, residual, residual <= threshold)


def localization_weight(spec_data: TrimmerSpectralData) -> float:
    """``|a+|``: passive-cavity weight of the long-lifetime supermode relative to the active one."""
    return abs(spec_data.a_plus)


def pt_angles(params: SystemParams) -> tuple[float, float]:
    """Phase angles ``(theta1, theta2)`` of the symmetric-phase eigenstates.

    Two-argument arctangents keep the quadrant right for
    ``gamma/sqrt(2) < j < gamma``, where ``j^2 - gamma^2 < 0``.
    """
    if classify_phase(params) is not PhaseClass.SYMMETRIC:
        raise PhaseMismatchError("theta angles are defined in the symmetric phase only")
    g, j = params.gamma, params.j
    big_delta = math.sqrt(2 * j * j - g * g)
    return math.atan2(g * big_delta, j * j - g * g), math.atan2(big_delta, g)


@dataclass(frozen=True)
class PhaseRow:
    params: SystemParams
    phase: PhaseClass
    eigenvalues: np.ndarray
    abs_a_plus: float
    pt: tuple

    @property
    def pt_residuals(self) -> tuple:
        return tuple(r.residual for r in self.pt)


def phase_diagram_row(params: SystemParams, threshold: float = PT_THRESHOLD) -> PhaseRow:
    """Phase, spectrum ``(E0, E+, E-)``, ``|a+|`` and PT checks for one coupling."""
    spectrum, data = trimmer_spectrum(params)
    checks = tuple(pt_residual(v, threshold) for v in spectrum.eigenvectors)
    return PhaseRow(params, classify_phase(params), spectrum.eigenvalues,
                    localization_weight(data), checks)
