"""Closed-form single-photon dynamics in both PT phases.

All amplitudes carry the global factor ``exp(-i w t)``; the routines
below work with the rotating-frame envelope ``g(t)`` of the outer-cavity
amplitudes and its exact time derivative. The central amplitude follows
from the passive-cavity equation of motion,

    beta = (i d(alpha)/dt - (w - i g) alpha) / j = i exp(-i w t) (g' + gamma g) / j,

which holds for either initial site.

Functions whose names end in ``_values`` accept a signed ``gamma`` so the
gamma -> -gamma mirror relations can be evaluated directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PhaseClass, SystemParams, build_hamiltonian, classify_phase_values
from .errors import (
    ExceptionalPointError,
    OverflowGuardError,
    ParameterError,
    PhaseMismatchError,
)
from .oracle import IntegratorConfig, expm_trajectory, propagate_rk4
from .state import AmplitudeState, Method, Site, Trajectory, uniform_grid

#: Largest delta * t for which cosh/sinh are evaluated.
HYPERBOLIC_CAP = 700.0
#: Couplings below this (in units of gamma) have no finite minima time.
MINIMA_J_GUARD = 1e-6


@dataclass(frozen=True)
class DerivedParams:
    """Phase-dependent frequencies and initial phases.

    ``big_delta``, ``phi1`` and ``phi2`` exist only in the symmetric
    phase, ``small_delta`` only in the broken one; reading the wrong one
    raises :class:`PhaseMismatchError`.
    """

    phase: PhaseClass
    _big_delta: float | None = None
    _small_delta: float | None = None
    _phi1: float | None = None
    _phi2: float | None = None

    def _get(self, value, name, phase):
        if value is None:
            raise PhaseMismatchError(f"{name} is only defined in the {phase.value} phase (here: {self.phase.value})")
        return value

    @property
    def big_delta(self) -> float:
        return self._get(self._big_delta, "big_delta", PhaseClass.SYMMETRIC)

    @property
    def small_delta(self) -> float:
        return self._get(self._small_delta, "small_delta", PhaseClass.BROKEN)

    @property
    def phi1(self) -> float:
        return self._get(self._phi1, "phi1", PhaseClass.SYMMETRIC)

    @property
    def phi2(self) -> float:
        return self._get(self._phi2, "phi2", PhaseClass.SYMMETRIC)


def derived_values(gamma: float, j: float) -> DerivedParams:
    phase = classify_phase_values(gamma, j)
    if phase is PhaseClass.SYMMETRIC:
        big = math.sqrt(2 * j * j - gamma * gamma)
        return DerivedParams(phase, _big_delta=big,
                             _phi1=math.atan2(big * gamma, j * j - gamma * gamma),
                             _phi2=2 * math.atan2(big, gamma))
    if phase is PhaseClass.BROKEN:
        return DerivedParams(phase, _small_delta=math.sqrt(gamma * gamma - 2 * j * j))
    return DerivedParams(phase)


def derived_params(params: SystemParams) -> DerivedParams:
    return derived_values(params.gamma, params.j)


def _require_phase(gamma, j, wanted):
    phase = classify_phase_values(gamma, j)
    if phase is PhaseClass.EXCEPTIONAL_POINT:
        raise ExceptionalPointError(
            "parameters lie inside the exceptional-point band; use method='rk4' or 'matrix_exp'"
        )
    if phase is not wanted:
        raise PhaseMismatchError(f"expected the {wanted.value} phase, parameters are {phase.value}")
    return derived_values(gamma, j)


def _times(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ParameterError("closed forms are defined for t >= 0")
    return t


def _symmetric_envelopes(gamma, j, site, t):
    d = _require_phase(gamma, j, PhaseClass.SYMMETRIC)
    big, phi1 = d.big_delta, d.phi1
    amp = 2 * j * j / big**2
    sin_half = np.sin(big * t / 2)
    if site is Site.PASSIVE:
        g_alpha = amp * np.cos((big * t + phi1) / 2) ** 2
        dg_alpha = -0.5 * amp * big * np.sin(big * t + phi1)
        g_xi = -amp * sin_half**2
    else:
        g_alpha = -amp * sin_half**2
        dg_alpha = -0.5 * amp * big * np.sin(big * t)
        g_xi = amp * np.cos((big * t - phi1) / 2) ** 2
    return g_alpha, dg_alpha, g_xi


def _broken_envelopes(gamma, j, site, t):
    d = _require_phase(gamma, j, PhaseClass.BROKEN)
    small = d.small_delta
    if np.any(small * t > HYPERBOLIC_CAP):
        raise OverflowGuardError(
            f"delta*t exceeds {HYPERBOLIC_CAP:g}; evaluate in the log domain instead"
        )
    ch, sh = np.cosh(small * t), np.sinh(small * t)
    d2 = small * small
    outer = -2 * j * j * np.sinh(small * t / 2) ** 2 / d2
    if site is Site.PASSIVE:
        g_alpha = -(j * j + (j * j - gamma * gamma) * ch + gamma * small * sh) / d2
        dg_alpha = -((j * j - gamma * gamma) * sh + gamma * small * ch) / small
        g_xi = outer
    else:
        g_alpha = outer
        dg_alpha = -j * j * sh / small
        g_xi = -(j * j + (j * j - gamma * gamma) * ch - gamma * small * sh) / d2
    return g_alpha, dg_alpha, g_xi


def _assemble(omega, gamma, j, t, g_alpha, dg_alpha, g_xi):
    phase = np.exp(-1j * omega * t)
    if j == 0:
        g_beta = np.zeros_like(g_alpha)
    else:
        g_beta = 1j * (dg_alpha + gamma * g_alpha) / j
    return np.stack([phase * g_alpha, phase * g_beta, phase * g_xi], axis=-1)


def _pin_initial(values, t, site):
    # Round-off in cos^2(phi1/2) etc. must not leak into the t = 0 state.
    values[t == 0] = AmplitudeState.initial(site).as_array()
    return values


def symmetric_values(omega, gamma, j, site, t) -> np.ndarray:
    """Symmetric-phase amplitudes, shape ``t.shape + (3,)``; ``gamma`` may be negative."""
    t = _times(t)
    site = Site.parse(site)
    values = _assemble(omega, gamma, j, t, *_symmetric_envelopes(gamma, j, site, t))
    return _pin_initial(values, t, site)


def broken_values(omega, gamma, j, site, t) -> np.ndarray:
    """Broken-phase amplitudes, shape ``t.shape + (3,)``; ``gamma`` may be negative."""
    t = _times(t)
    site = Site.parse(site)
    values = _assemble(omega, gamma, j, t, *_broken_envelopes(gamma, j, site, t))
    return _pin_initial(values, t, site)


def closed_form_values(omega, gamma, j, site, t) -> np.ndarray:
    """Dispatch to the closed form of whichever phase ``(gamma, j)`` is in."""
    phase = classify_phase_values(gamma, j)
    if phase is PhaseClass.SYMMETRIC:
        return symmetric_values(omega, gamma, j, site, t)
    if phase is PhaseClass.BROKEN:
        return broken_values(omega, gamma, j, site, t)
    raise ExceptionalPointError(
        "no closed form at the exceptional point; use method='rk4' or 'matrix_exp'"
    )


def evolve_closed_symmetric(params: SystemParams, initial_site, t: float) -> AmplitudeState:
    """Amplitudes at time ``t`` in the PT-symmetric phase (periodic, frequency ``Delta``)."""
    values = symmetric_values(params.omega, params.gamma, params.j, initial_site, float(t))
    return AmplitudeState.from_array(values)


def evolve_closed_broken(params: SystemParams, initial_site, t: float) -> AmplitudeState:
    """Amplitudes at time ``t`` in the broken phase (hyperbolic growth with rate ``delta``)."""
    values = broken_values(params.omega, params.gamma, params.j, initial_site, float(t))
    return AmplitudeState.from_array(values)


def reconstruct_beta(params: SystemParams, alpha_value: complex, alpha_derivative: complex) -> complex:
    """Central-cavity amplitude from the passive-cavity equation of motion."""
    if params.j == 0:
        raise ParameterError("beta cannot be reconstructed from alpha when j = 0")
    w, g = params.omega, params.gamma
    return (1j * alpha_derivative - (w - 1j * g) * alpha_value) / params.j


def alpha_derivative_values(omega, gamma, j, site, t) -> np.ndarray:
    """Exact ``d alpha / dt`` of the closed forms."""
    t = _times(t)
    site = Site.parse(site)
    phase = classify_phase_values(gamma, j)
    envelopes = _symmetric_envelopes if phase is PhaseClass.SYMMETRIC else _broken_envelopes
    g_alpha, dg_alpha, _ = envelopes(gamma, j, site, t)
    return np.exp(-1j * omega * t) * (dg_alpha - 1j * omega * g_alpha)


def peak_active_occupation(params: SystemParams) -> float:
    """Maximum of ``|xi|^2`` after an active-cavity start: ``(2 j^2 / (2 j^2 - g^2))^2``."""
    _require_phase(params.gamma, params.j, PhaseClass.SYMMETRIC)
    j2 = params.j**2
    return (2 * j2 / (2 * j2 - params.gamma**2)) ** 2


def broken_minima_time(params: SystemParams) -> float:
    """Time at which the passive and central occupations are simultaneously minimal.

    Passive-cavity start, broken phase. Both amplitudes vanish there.
    Returns ``inf`` for couplings below ``MINIMA_J_GUARD * gamma``.
    """
    d = _require_phase(params.gamma, params.j, PhaseClass.BROKEN)
    g, j = params.gamma, params.j
    if j < MINIMA_J_GUARD * g:
        return math.inf
    small = d.small_delta
    ratio = g * small / (g * g - j * j)
    if ratio >= 1.0:
        return math.inf
    return math.atanh(ratio) / small


def oscillation_period(params: SystemParams) -> float:
    """Period ``2 pi / Delta`` of the symmetric-phase occupations."""
    d = _require_phase(params.gamma, params.j, PhaseClass.SYMMETRIC)
    return 2 * math.pi / d.big_delta


def printed_beta_values(omega, gamma, j, site, t) -> np.ndarray:
    """Central amplitude from the uncorrected closed forms.

    Kept for diagnostics only. The symmetric-phase version carries a
    ``2 j^2 / Delta^2`` prefactor that is off by ``sqrt(2)`` at ``gamma = 0``
    and the broken-phase version has the opposite overall sign to the
    equations of motion; :func:`closed_form_values` does not use them.
    """
    t = _times(t)
    site = Site.parse(site)
    phase_factor = np.exp(-1j * omega * t)
    phase = classify_phase_values(gamma, j)
    if phase is PhaseClass.SYMMETRIC:
        d = derived_values(gamma, j)
        big, phi2 = d.big_delta, d.phi2
        sign = -1.0 if site is Site.PASSIVE else 1.0
        return (2j * j * j * phase_factor / big**2) * np.sin(big * t / 2) * np.sin((big * t + sign * phi2) / 2)
    if phase is PhaseClass.BROKEN:
        small = derived_values(gamma, j).small_delta
        sign = -1.0 if site is Site.PASSIVE else 1.0
        bracket = gamma * np.cosh(small * t) - gamma + sign * small * np.sinh(small * t)
        return -1j * j * phase_factor / small**2 * bracket
    raise ExceptionalPointError("no printed closed form at the exceptional point")


def sample_trajectory(params: SystemParams, initial_site="passive", t_max: float = 10.0,
                      n_points: int = 2001, method="closed_form",
                      config: IntegratorConfig | None = None) -> Trajectory:
    """Amplitudes on a uniform grid over ``[0, t_max]`` by the chosen method."""
    site = Site.parse(initial_site)
    method = Method.parse(method)
    times = uniform_grid(t_max, n_points)
    initial = AmplitudeState.initial(site)
    if method is Method.CLOSED_FORM:
        amps = closed_form_values(params.omega, params.gamma, params.j, site, times)
        return Trajectory(times, amps, site, method)
    m = build_hamiltonian(params)
    if method is Method.RK4:
        return propagate_rk4(m, initial, times, config, initial_site=site)
    return expm_trajectory(m, initial, times, config, initial_site=site)
