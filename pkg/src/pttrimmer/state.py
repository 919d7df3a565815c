"""Single-photon amplitude states and sampled trajectories."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError


class Site(enum.Enum):
    """Cavity in which the photon starts."""

    PASSIVE = "passive"
    ACTIVE = "active"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, value) -> "Site":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ParameterError(f"initial site must be 'passive' or 'active', got {value!r}") from None


class Method(enum.Enum):
    CLOSED_FORM = "closed_form"
    RK4 = "rk4"
    MATRIX_EXP = "matrix_exp"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        aliases = {"closed": cls.CLOSED_FORM, "expm": cls.MATRIX_EXP}
        key = str(value).lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ParameterError(f"unknown propagation method {value!r}") from None


@dataclass(frozen=True)
class AmplitudeState:
    """Amplitudes on the passive (alpha), central (beta) and active (xi) cavities."""

    alpha: complex
    beta: complex
    xi: complex

    @classmethod
    def initial(cls, site) -> "AmplitudeState":
        site = Site.parse(site)
        return cls(1.0 + 0j, 0j, 0j) if site is Site.PASSIVE else cls(0j, 0j, 1.0 + 0j)

    @classmethod
    def from_array(cls, values) -> "AmplitudeState":
        values = np.asarray(values, dtype=complex)
        if values.shape != (3,):
            raise DimensionError(f"expected 3 amplitudes, got shape {values.shape}")
        return cls(complex(values[0]), complex(values[1]), complex(values[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta, self.xi], dtype=complex)

    @property
    def probabilities(self) -> tuple[float, float, float]:
        return abs(self.alpha) ** 2, abs(self.beta) ** 2, abs(self.xi) ** 2

    @property
    def total(self) -> float:
        return sum(self.probabilities)


@dataclass(frozen=True)
class Trajectory:
    """Amplitudes sampled on a time grid.

    ``amplitudes`` has shape ``(len(times), 3)`` with columns
    ``(alpha, beta, xi)``.
    """

    times: np.ndarray
    amplitudes: np.ndarray
    initial_site: Site
    method: Method

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if times.ndim != 1 or amps.shape != (times.size, 3):
            raise DimensionError(f"amplitudes shape {amps.shape} does not match {times.size} times")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ParameterError("trajectory times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "initial_site", Site.parse(self.initial_site))
        object.__setattr__(self, "method", Method.parse(self.method))

    def __len__(self):
        return self.times.size

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def total_occupation(self) -> np.ndarray:
        return self.probabilities.sum(axis=1)

    @property
    def states(self) -> list[AmplitudeState]:
        return [AmplitudeState.from_array(row) for row in self.amplitudes]

    def state(self, index: int) -> AmplitudeState:
        return AmplitudeState.from_array(self.amplitudes[index])


def uniform_grid(t_max: float, n_points: int) -> np.ndarray:
    if n_points < 2:
        raise ParameterError(f"need at least 2 grid points, got {n_points}")
    if not t_max > 0:
        raise ParameterError(f"t_max must be positive, got {t_max}")
    return np.linspace(0.0, t_max, n_points)
