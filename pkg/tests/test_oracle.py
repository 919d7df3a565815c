import math

import numpy as np
import pytest
from scipy.linalg import expm as scipy_expm

from pttrimmer.core import SystemParams, build_hamiltonian, hamiltonian_matrix
from pttrimmer.errors import DimensionError, DivergenceError, GridMismatchError, ParameterError
from pttrimmer.oracle import (
    IntegratorConfig,
    compare_trajectories,
    convergence_order,
    expm,
    expm_trajectory,
    propagate_expm,
    propagate_rk4,
    propagator,
)
from pttrimmer.state import AmplitudeState, Method, Site, Trajectory
from pttrimmer.verify import printed_beta_broken_report, printed_beta_symmetric_report


def test_expm_against_scipy(rng):
    for scale in (1e-3, 1.0, 30.0):
        a = scale * (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        ref = scipy_expm(a)
        assert np.max(np.abs(expm(a) - ref)) <= 1e-12 * max(1.0, np.abs(ref).max())


def test_expm_known_values():
    np.testing.assert_array_equal(expm(np.zeros((2, 2))), np.eye(2))
    rot = expm(np.array([[0, -math.pi / 2], [math.pi / 2, 0]]))
    np.testing.assert_allclose(rot, [[0, -1], [1, 0]], atol=1e-14)


def test_expm_rejects_non_square():
    with pytest.raises(DimensionError):
        expm(np.ones((2, 3)))


def test_decoupled_passive_cavity_decays():
    m = hamiltonian_matrix(5, 1, 0)
    for t in (0.5, 3.0):
        state = propagate_expm(m, AmplitudeState.initial("passive"), t)
        assert state.alpha == pytest.approx(np.exp(-5j * t - t), abs=1e-14)
        assert state.beta == 0 and state.xi == 0


def test_hermitian_propagator_is_unitary():
    u = propagator(build_hamiltonian(SystemParams(5, 0, 1.3)), 17.0)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(3), atol=1e-12)


def test_propagator_negative_time():
    with pytest.raises(ParameterError):
        propagator(np.eye(3), -1.0)


def test_rk4_matches_expm_at_long_time(sym_params):
    m = build_hamiltonian(sym_params)
    traj = propagate_rk4(m, AmplitudeState.initial("passive"), [0.0, 10.0])
    ref = propagate_expm(m, AmplitudeState.initial("passive"), 10.0).as_array()
    assert np.max(np.abs(traj.amplitudes[-1] - ref)) < 1e-8


def test_rk4_substeps_respect_dt(broken_params):
    m = build_hamiltonian(broken_params)
    grid = np.array([0.0, 0.05, 1.0])
    coarse = propagate_rk4(m, [1, 0, 0], grid, IntegratorConfig(dt=0.5))
    fine = propagate_rk4(m, [1, 0, 0], grid, IntegratorConfig(dt=1e-3))
    ref = expm_trajectory(m, [1, 0, 0], grid)
    assert compare_trajectories(fine, ref) < 1e-10
    assert compare_trajectories(coarse, ref) > compare_trajectories(fine, ref)
    assert coarse.initial_site is Site.PASSIVE and coarse.method is Method.RK4


def test_convergence_order_is_four(sym_params):
    order, errors = convergence_order(build_hamiltonian(sym_params), [0, 0, 1], 1.0)
    assert abs(order - 4) < 0.3
    assert errors[0] > errors[1] > errors[2]


def test_divergence_is_reported():
    m = np.diag([0, 0, 30j])  # -i m gives exp(30 t) on the last site
    with pytest.raises(DivergenceError):
        propagate_rk4(m, [0, 0, 1], [0.0, 1.0, 2.0], IntegratorConfig(dt=1e-2))


@pytest.mark.parametrize("grid", [[0.0, 1.0, 1.0], [0.5, 1.0], [[0.0, 1.0]]])
def test_bad_grids(grid):
    with pytest.raises(ParameterError):
        propagate_rk4(np.eye(3), [1, 0, 0], grid)


def test_wrong_initial_shape():
    with pytest.raises(DimensionError):
        propagate_rk4(np.eye(3), [1, 0], [0.0, 1.0])


def test_grid_mismatch():
    a = Trajectory(np.array([0.0, 1.0]), np.zeros((2, 3)), "passive", "rk4")
    b = Trajectory(np.array([0.0, 2.0]), np.zeros((2, 3)), "passive", "rk4")
    with pytest.raises(GridMismatchError):
        compare_trajectories(a, b)


@pytest.mark.parametrize("kwargs", [{"dt": 0}, {"dt": -1e-3}, {"taylor_tol": 0.1}, {"method": "euler"}])
def test_integrator_config_validation(kwargs):
    with pytest.raises(ParameterError):
        IntegratorConfig(**kwargs)


def test_printed_symmetric_beta_deviation():
    # At gamma = 0 the printed prefactor is 1/2 where sqrt(2)/... gives 1/sqrt(2):
    # max |printed - true| = 1/sqrt(2) - 1/2.
    report = printed_beta_symmetric_report(1.0)
    assert report.informational
    assert report.measured == pytest.approx(1 / math.sqrt(2) - 0.5, abs=1e-3)


def test_printed_broken_beta_sign(broken_params):
    report = printed_beta_broken_report(broken_params)
    assert report.informational
    assert report.measured == pytest.approx(-1, abs=1e-9)
    assert abs(report.details["ratio_imag"]) < 1e-9
