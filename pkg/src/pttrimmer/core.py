"""System parameters, the trimmer Hamiltonian and PT-phase classification.

Three cavities share the resonance ``omega``. Cavity -1 (passive) loses
photons at rate ``gamma``, cavity +1 (active) gains at the same rate and
the central cavity 0 is neutral. Nearest neighbours couple with ``j``.
Everything is expressed in units of ``gamma`` by default.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

#: Relative width of the exceptional-point guard band on 2 j^2 - gamma^2.
EP_RELATIVE_BAND = 1e-9


class PhaseClass(enum.Enum):
    SYMMETRIC = "Symmetric"
    BROKEN = "Broken"
    EXCEPTIONAL_POINT = "ExceptionalPoint"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SystemParams:
    """Balanced trimmer configuration ``(omega, gamma, j)``.

    ``gamma`` is the common loss/gain rate; only the balanced case is
    representable. ``gamma = 0`` is accepted as the Hermitian limit.
    """

    omega: float = 5.0
    gamma: float = 1.0
    j: float = 5.0

    def __post_init__(self):
        for name in ("omega", "gamma", "j"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or isinstance(value, bool):
                raise ParameterError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.gamma < 0:
            raise ParameterError(f"gamma must be nonnegative, got {self.gamma}")
        if self.j < 0:
            raise ParameterError(f"j must be nonnegative, got {self.j}")

    @property
    def discriminant(self) -> float:
        """``2 j^2 - gamma^2``; its sign decides the PT phase."""
        return 2.0 * self.j**2 - self.gamma**2

    @property
    def exceptional_j(self) -> float:
        """Coupling at the exceptional point, ``gamma / sqrt(2)``."""
        return self.gamma / math.sqrt(2.0)


def hamiltonian_matrix(omega: float, gamma: float, j: float) -> np.ndarray:
    """Return the 3x3 single-excitation Hamiltonian for arbitrary real inputs.

    Unlike :func:`build_hamiltonian` this accepts a negative ``gamma``,
    which swaps the roles of the passive and active cavities.
    """
    return np.array(
        [
            [omega - 1j * gamma, j, 0.0],
            [j, omega, j],
            [0.0, j, omega + 1j * gamma],
        ],
        dtype=complex,
    )


def build_hamiltonian(params: SystemParams) -> np.ndarray:
    """Tridiagonal matrix with diagonal ``(w - i g, w, w + i g)`` and couplings ``j``."""
    if not isinstance(params, SystemParams):
        raise ParameterError(f"expected SystemParams, got {type(params).__name__}")
    return hamiltonian_matrix(params.omega, params.gamma, params.j)


def default_ep_band(gamma: float) -> float:
    return EP_RELATIVE_BAND * gamma**2


def classify_phase_values(gamma: float, j: float, eps_ep: float | None = None) -> PhaseClass:
    """Classify the PT phase from raw (possibly signed) ``gamma`` and ``j``."""
    if eps_ep is None:
        eps_ep = default_ep_band(gamma)
    elif not eps_ep > 0:
        raise ParameterError(f"eps_ep must be positive, got {eps_ep}")
    disc = 2.0 * j * j - gamma * gamma
    if disc > eps_ep:
        return PhaseClass.SYMMETRIC
    if disc < -eps_ep:
        return PhaseClass.BROKEN
    return PhaseClass.EXCEPTIONAL_POINT


def classify_phase(params: SystemParams, eps_ep: float | None = None) -> PhaseClass:
    """Symmetric above ``j = gamma/sqrt(2)``, Broken below, EP inside the band.

    The guard band ``eps_ep`` applies to ``2 j^2 - gamma^2`` and defaults
    to ``1e-9 * gamma^2``.
    """
    return classify_phase_values(params.gamma, params.j, eps_ep)


def classify_phase_grid(gamma: float, j_values, eps_ep: float | None = None) -> np.ndarray:
    """Vectorized :func:`classify_phase` returning an object array of PhaseClass."""
    if eps_ep is None:
        eps_ep = default_ep_band(gamma)
    elif not eps_ep > 0:
        raise ParameterError(f"eps_ep must be positive, got {eps_ep}")
    j_values = np.asarray(j_values, dtype=float)
    disc = 2.0 * j_values * j_values - gamma * gamma
    out = np.full(j_values.shape, PhaseClass.EXCEPTIONAL_POINT, dtype=object)
    out[disc > eps_ep] = PhaseClass.SYMMETRIC
    out[disc < -eps_ep] = PhaseClass.BROKEN
    return out
