"""Numerical propagation of the single-photon Schrodinger equation.

Two independent routes, fixed-step RK4 and a scaling-and-squaring
matrix exponential, serve as ground truth for the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DivergenceError, GridMismatchError, ParameterError
from .state import AmplitudeState, Method, Site, Trajectory

DIVERGENCE_CAP = 1e12


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-4
    method: Method = Method.RK4
    taylor_tol: float = 1e-14

    def __post_init__(self):
        if not self.dt > 0:
            raise ParameterError(f"dt must be positive, got {self.dt}")
        if not 0 < self.taylor_tol < 1e-6:
            raise ParameterError(f"taylor_tol must lie in (0, 1e-6), got {self.taylor_tol}")
        object.__setattr__(self, "method", Method.parse(self.method))


def _matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def _initial_vector(initial, n):
    if isinstance(initial, AmplitudeState):
        psi = initial.as_array()
    else:
        psi = np.asarray(initial, dtype=complex)
    if psi.shape != (n,):
        raise DimensionError(f"initial state has shape {psi.shape}, expected ({n},)")
    return psi


def _guess_site(psi):
    return Site.ACTIVE if abs(psi[-1]) > abs(psi[0]) else Site.PASSIVE


def propagate_rk4(m, initial, t_grid, config: IntegratorConfig | None = None,
                  initial_site=None) -> Trajectory:
    """Integrate ``d psi/dt = -i m psi`` with classical RK4 onto ``t_grid``.

    Each output interval is split into ``ceil(spacing / dt)`` equal
    substeps, so the effective step never exceeds ``config.dt``.
    """
    config = config or IntegratorConfig()
    m = _matrix(m)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1 or t_grid[0] != 0:
        raise ParameterError("t_grid must be a 1-D grid starting at 0")
    if np.any(np.diff(t_grid) <= 0):
        raise ParameterError("t_grid must be strictly increasing")
    psi = _initial_vector(initial, m.shape[0])
    a = -1j * m

    out = np.empty((t_grid.size, m.shape[0]), dtype=complex)
    out[0] = psi
    for k in range(1, t_grid.size):
        span = t_grid[k] - t_grid[k - 1]
        n_sub = max(1, math.ceil(span / config.dt - 1e-9))
        h = span / n_sub
        for _ in range(n_sub):
            k1 = a @ psi
            k2 = a @ (psi + 0.5 * h * k1)
            k3 = a @ (psi + 0.5 * h * k2)
            k4 = a @ (psi + h * k3)
            psi = psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(psi)) or np.linalg.norm(psi) > DIVERGENCE_CAP:
            raise DivergenceError(f"state norm exceeded {DIVERGENCE_CAP:g} at t = {t_grid[k]:g}")
        out[k] = psi
    site = initial_site if initial_site is not None else _guess_site(out[0])
    return Trajectory(t_grid, out, site, Method.RK4)


def expm(a, tol: float = 1e-14) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a truncated Taylor series.

    The scaled matrix has 1-norm at most 0.5; Taylor terms are summed until
    the next term is below ``tol`` relative to the partial sum.
    """
    a = _matrix(a)
    n = a.shape[0]
    norm = float(np.linalg.norm(a, 1))
    squarings = 0
    if norm > 0.5:
        squarings = int(math.ceil(math.log2(norm / 0.5)))
    scaled = a / (2.0**squarings)

    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, 60):
        term = term @ scaled / k
        result = result + term
        if np.linalg.norm(term, 1) <= tol * np.linalg.norm(result, 1):
            break
    for _ in range(squarings):
        result = result @ result
    return result


def propagator(m, t: float, config: IntegratorConfig | None = None) -> np.ndarray:
    """``U(t) = exp(-i m t)``."""
    config = config or IntegratorConfig(method=Method.MATRIX_EXP)
    if t < 0:
        raise ParameterError(f"t must be nonnegative, got {t}")
    return expm(-1j * _matrix(m) * t, config.taylor_tol)


def propagate_expm(m, initial, t: float, config: IntegratorConfig | None = None) -> AmplitudeState:
    """Exact propagation ``U(t) psi0`` for a three-cavity state."""
    m = _matrix(m)
    psi = _initial_vector(initial, m.shape[0])
    return AmplitudeState.from_array(propagator(m, t, config) @ psi)


def expm_trajectory(m, initial, t_grid, config: IntegratorConfig | None = None,
                    initial_site=None) -> Trajectory:
    """Matrix-exponential propagation evaluated independently at each grid time."""
    m = _matrix(m)
    t_grid = np.asarray(t_grid, dtype=float)
    psi = _initial_vector(initial, m.shape[0])
    out = np.empty((t_grid.size, m.shape[0]), dtype=complex)
    for k, t in enumerate(t_grid):
        out[k] = psi if t == 0 else propagator(m, t, config) @ psi
    site = initial_site if initial_site is not None else _guess_site(psi)
    return Trajectory(t_grid, out, site, Method.MATRIX_EXP)


def compare_trajectories(a: Trajectory, b: Trajectory) -> float:
    """Largest amplitude difference over all times and cavities."""
    if a.times.shape != b.times.shape or not np.allclose(a.times, b.times, rtol=0, atol=1e-12):
        raise GridMismatchError("trajectories are sampled on different time grids")
    return float(np.max(np.abs(a.amplitudes - b.amplitudes)))


def convergence_order(m, initial, t_end: float, dts=(1e-3, 5e-4, 2.5e-4)) -> tuple[float, list[float]]:
    """Empirical RK4 order against the matrix exponential at ``t_end``.

    Returns the least-squares slope of log(error) against log(dt) and the
    individual errors.
    """
    exact = propagate_expm(m, initial, t_end).as_array()
    errors = []
    for dt in dts:
        traj = propagate_rk4(m, initial, np.array([0.0, t_end]), IntegratorConfig(dt=dt))
        errors.append(float(np.linalg.norm(traj.amplitudes[-1] - exact)))
    slope = np.polyfit(np.log(dts), np.log(errors), 1)[0]
    return float(slope), errors
