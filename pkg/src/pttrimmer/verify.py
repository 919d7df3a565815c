"""Invariant suite behind ``pttrimmer verify``.

Each check records what it measured and the tolerance it was held to.
Informational entries document known discrepancies of the printed
closed forms; they are always populated and never fail the run.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .core import PhaseClass, SystemParams, build_hamiltonian, classify_phase, classify_phase_grid
from .dynamics import (
    broken_minima_time,
    broken_values,
    closed_form_values,
    oscillation_period,
    peak_active_occupation,
    printed_beta_values,
    sample_trajectory,
    symmetric_values,
)
from .eigen import eig, trimmer_spectrum
from .oracle import IntegratorConfig, compare_trajectories, convergence_order, propagate_rk4
from .ptcheck import pt_residual
from .state import AmplitudeState, Site, uniform_grid


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    tolerance: float
    comparison: str = "<="
    informational: bool = False
    details: dict = field(default_factory=dict)

    def as_dict(self):
        out = asdict(self)
        out["measured"] = _finite_or_str(self.measured)
        out["tolerance"] = _finite_or_str(self.tolerance)
        return out


def _finite_or_str(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _upper(name, measured, tol, scale, **details):
    tol = tol * scale
    return Check(name, bool(measured <= tol), float(measured), tol, "<=", details=details)


def _lower(name, measured, bound, **details):
    return Check(name, bool(measured >= bound), float(measured), bound, ">=", details=details)


def match_error(values, reference) -> float:
    """Smallest max relative deviation over all pairings of two eigenvalue lists."""
    reference = list(reference)
    best = math.inf
    for perm in itertools.permutations(values):
        err = max(abs(a - b) / max(1.0, abs(b)) for a, b in zip(perm, reference))
        best = min(best, err)
    return best


def check_ep_location(gamma, scale, n=1_000_000):
    j = np.linspace(0.7070, 0.7072, n) * gamma
    labels = classify_phase_grid(gamma, j)
    decided = labels[labels != PhaseClass.EXCEPTIONAL_POINT]
    flips = int(np.sum(decided[1:] != decided[:-1]))
    first_sym = j[np.argmax(labels == PhaseClass.SYMMETRIC)]
    last_broken = j[len(labels) - 1 - np.argmax(labels[::-1] == PhaseClass.BROKEN)]
    location = 0.5 * (first_sym + last_broken)
    offset = abs(location / gamma - 1 / math.sqrt(2))
    step = (j[1] - j[0]) / gamma
    check = _upper("ep_location", offset, 2 * step + 1e-9, scale,
                   transitions=flips, broken_below=bool(decided[0] == PhaseClass.BROKEN))
    check.passed = check.passed and flips == 1 and decided[0] == PhaseClass.BROKEN
    return check


def check_spectrum_oracle(params, scale):
    analytic, _ = trimmer_spectrum(params)
    numeric = eig(build_hamiltonian(params))
    err = match_error(numeric.eigenvalues, analytic.eigenvalues)
    return _upper("spectrum_oracle", err, 1e-9, scale,
                  max_residual=float(np.nanmax(numeric.residuals)))


def check_defective_at_ep(gamma):
    spec = eig(build_hamiltonian(SystemParams(5.0 * gamma, gamma, gamma / math.sqrt(2))))
    flagged = spec.defective
    details = {}
    if flagged:
        d = spec.defects[0]
        details = {"algebraic": d.algebraic, "geometric": d.geometric, "rank": d.rank}
    return Check("defective_flag_at_ep", flagged, float(len(spec.defects)), 1.0, ">=", details=details)


def check_closed_vs_rk4(params, site, t_max, n_points, scale):
    closed = sample_trajectory(params, site, t_max, n_points, "closed_form")
    rk4 = sample_trajectory(params, site, t_max, n_points, "rk4", IntegratorConfig(dt=1e-4))
    return _upper(f"closed_vs_rk4_{site}", compare_trajectories(closed, rk4), 1e-6, scale,
                  j=params.j, t_max=t_max)


def check_gamma_flip(params, scale, n_times=100, seed=0):
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, 10.0 / params.gamma, n_times)
    w, g, j = params.omega, params.gamma, params.j
    # Negating gamma mirrors the chain: (alpha, beta, xi)(-gamma) = (xi', beta', alpha')(gamma).
    flipped = closed_form_values(w, -g, j, Site.PASSIVE, t)
    active = closed_form_values(w, g, j, Site.ACTIVE, t)
    err = float(np.max(np.abs(flipped - active[:, ::-1])))
    return _upper("gamma_flip", err, 1e-10, scale, phase=str(classify_phase(params)))


def check_pt_clusters(gamma, scale):
    symmetric_j = (1.0, 2.0, 5.0)
    broken_j = (0.1, 0.3, 0.5)
    worst_sym, worst_e0, least_broken = 0.0, 0.0, math.inf
    for j in symmetric_j + broken_j:
        spec, _ = trimmer_spectrum(SystemParams(5.0 * gamma, gamma, j * gamma))
        res = [pt_residual(v).residual for v in spec.eigenvectors]
        worst_e0 = max(worst_e0, res[0])
        if j in symmetric_j:
            worst_sym = max(worst_sym, *res[1:])
        else:
            least_broken = min(least_broken, *res[1:])
    return [
        _upper("pt_residual_symmetric", worst_sym, 1e-10, scale),
        _upper("pt_residual_e0", worst_e0, 1e-10, scale),
        _lower("pt_residual_broken", least_broken, 0.1),
    ]


PEAK_GRID_POINTS = 2001


def check_peak(params, n_points, scale):
    # The 1e-4 tolerance assumes at least a 2001-point grid over [0, 10/gamma].
    t_max = 10.0 / params.gamma
    n_points = max(n_points, PEAK_GRID_POINTS)
    traj = sample_trajectory(params, Site.ACTIVE, t_max, n_points, "closed_form")
    measured = float(traj.probabilities[:, 2].max())
    expected = peak_active_occupation(params)
    return _upper("peak_active_occupation", abs(measured - expected), 1e-4, scale,
                  measured_peak=measured, formula=expected)


def numeric_minimum(f, t_max, n_grid=20001):
    """Grid search followed by bounded Brent refinement."""
    grid = np.linspace(0.0, t_max, n_grid)
    values = f(grid)
    k = int(np.argmin(values))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, n_grid - 1)]
    res = minimize_scalar(lambda s: float(f(np.array(s))), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.x)


def interior_minimum(grid, values) -> float:
    """Grid location of the lowest strict interior local minimum.

    The central amplitude starts at zero, so the endpoint is excluded.
    """
    inner = (values[1:-1] <= values[:-2]) & (values[1:-1] <= values[2:])
    idx = np.flatnonzero(inner) + 1
    if idx.size == 0:
        return math.nan
    return float(grid[idx[np.argmin(values[idx])]])


def check_broken_minima(params, scale):
    t_star = broken_minima_time(params)
    w, g, j = params.omega, params.gamma, params.j
    t_max = max(10.0 / g, 2.0 * t_star) if math.isfinite(t_star) else 10.0 / g
    # |alpha| rather than |alpha|^2: the minimum is a double zero of alpha,
    # so |alpha|^2 is quartic there and too flat to locate to 1e-6.
    t_alpha = numeric_minimum(lambda t: np.abs(broken_values(w, g, j, Site.PASSIVE, t)[..., 0]), t_max)
    grid = np.linspace(0.0, t_max, 20001)
    beta_sq = np.abs(broken_values(w, g, j, Site.PASSIVE, grid)[:, 1]) ** 2
    t_beta = interior_minimum(grid, beta_sq)
    return [
        _upper("broken_minima_alpha", abs(t_alpha - t_star), 1e-6, scale, t_star=t_star, numeric=t_alpha),
        _upper("broken_minima_beta", abs(t_beta - t_star), 1e-3, scale, t_star=t_star, numeric=t_beta),
    ]


def check_unitarity_and_period(params, scale):
    j = params.j
    t = np.linspace(0.0, 20.0 / j, 4001)
    checks = []
    for site in Site:
        amps = symmetric_values(params.omega, 0.0, j, site, t)
        total = np.sum(np.abs(amps) ** 2, axis=-1)
        checks.append(_upper(f"unitarity_{site}", float(np.max(np.abs(total - 1.0))), 1e-10, scale))
    period = oscillation_period(params)
    shifted = symmetric_values(params.omega, 0.0, j, Site.PASSIVE, t + period)
    base = symmetric_values(params.omega, 0.0, j, Site.PASSIVE, t)
    err = float(np.max(np.abs(np.abs(shifted) ** 2 - np.abs(base) ** 2)))
    checks.append(_upper("probability_period", err, 1e-9, scale, period=period,
                         expected=2 * math.pi / (math.sqrt(2) * j)))
    return checks


def check_rk4_order(scale):
    m = build_hamiltonian(SystemParams(5.0, 1.0, 5.0))
    order, errors = convergence_order(m, AmplitudeState.initial(Site.PASSIVE), 10.0)
    return _upper("rk4_order", abs(order - 4.0), 0.3, scale, order=order, errors=errors)


def check_growth_rate(gamma, scale):
    params = SystemParams(5.0 * gamma, gamma, 0.5 * gamma)
    t = np.linspace(0.0, 10.0 / gamma, 1001)
    traj = propagate_rk4(build_hamiltonian(params), AmplitudeState.initial(Site.PASSIVE), t,
                         IntegratorConfig(dt=1e-3 / gamma))
    window = t >= 8.0 / gamma
    slope = np.polyfit(t[window], np.log(np.linalg.norm(traj.amplitudes[window], axis=1)), 1)[0]
    expected = math.sqrt(gamma**2 - 2 * params.j**2)
    return _upper("broken_growth_rate", abs(slope / expected - 1.0), 0.01, scale,
                  slope=float(slope), expected=expected)


def printed_beta_symmetric_report(j):
    """Printed symmetric-phase beta against exact propagation at gamma = 0."""
    params = SystemParams(0.0, 0.0, j)
    t = uniform_grid(2 * math.pi / (math.sqrt(2) * j), 2001)
    oracle = sample_trajectory(params, Site.PASSIVE, t[-1], t.size, "matrix_exp").amplitudes[:, 1]
    printed = printed_beta_values(0.0, 0.0, j, Site.PASSIVE, t)
    deviation = float(np.max(np.abs(printed - oracle)))
    return Check("printed_beta_symmetric_gamma0", True, deviation, 1 / math.sqrt(2) - 0.5, "~=",
                 informational=True,
                 details={"expected_max": 1 / math.sqrt(2) - 0.5,
                          "note": "printed prefactor gives |beta|^2 = sin^2/4, exact is sin^2/2"})


def printed_beta_broken_report(params):
    """Sign of printed broken-phase beta relative to the equations of motion at small t."""
    t = np.array([1e-3 / params.gamma])
    w, g, j = params.omega, params.gamma, params.j
    printed = complex(printed_beta_values(w, g, j, Site.PASSIVE, t)[0])
    oracle = sample_trajectory(params, Site.PASSIVE, float(t[0]), 2, "matrix_exp").amplitudes[1, 1]
    ratio = printed / oracle
    return Check("printed_beta_broken_sign", True, float(ratio.real), -1.0, "~=",
                 informational=True,
                 details={"ratio_imag": float(ratio.imag), "t": float(t[0]),
                          "small_t_expected": "beta ~ -i j t"})


def run_suite(params: SystemParams, t_max: float = 10.0, n_points: int = 2001,
              tolerance_scale: float = 1.0) -> dict:
    """Run every applicable check and return a JSON-ready report."""
    s = tolerance_scale
    gamma_ref = params.gamma if params.gamma > 0 else 1.0
    phase = classify_phase(params)
    checks = [check_ep_location(gamma_ref, s)]
    if params.j > 0:
        checks.append(check_spectrum_oracle(params, s))
    checks.append(check_defective_at_ep(gamma_ref))
    checks += check_pt_clusters(gamma_ref, s)

    if phase is not PhaseClass.EXCEPTIONAL_POINT:
        for site in Site:
            checks.append(check_closed_vs_rk4(params, site, t_max, n_points, s))
        if params.gamma > 0:
            checks.append(check_gamma_flip(params, s))
    if phase is PhaseClass.SYMMETRIC and params.gamma > 0:
        checks.append(check_peak(params, n_points, s))
    broken = params if phase is PhaseClass.BROKEN and params.j > 0 else SystemParams(5.0 * gamma_ref, gamma_ref, 0.5 * gamma_ref)
    checks += check_broken_minima(broken, s)
    if params.gamma == 0 and params.j > 0:
        checks += check_unitarity_and_period(params, s)
    checks.append(check_rk4_order(s))
    checks.append(check_growth_rate(gamma_ref, s))

    checks.append(printed_beta_symmetric_report(params.j if params.j > 0 else 1.0))
    checks.append(printed_beta_broken_report(broken))

    failures = [c.name for c in checks if not c.informational and not c.passed]
    return {
        "params": asdict(params),
        "t_max": t_max,
        "n_points": n_points,
        "tolerance_scale": tolerance_scale,
        "passed": not failures,
        "failures": failures,
        "checks": [c.as_dict() for c in checks],
    }
