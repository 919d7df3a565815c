import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pttrimmer.core import PhaseClass, SystemParams, build_hamiltonian
from pttrimmer.eigen import trimmer_spectrum
from pttrimmer.errors import DimensionError, ParameterError, PhaseMismatchError
from pttrimmer.ptcheck import (
    apply_pt,
    localization_weight,
    phase_diagram_row,
    pt_angles,
    pt_residual,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)
vectors = st.tuples(finite, finite, finite, finite, finite, finite).map(
    lambda x: np.array([x[0] + 1j * x[1], x[2] + 1j * x[3], x[4] + 1j * x[5]])
)


def test_apply_pt_mirrors_and_conjugates():
    np.testing.assert_array_equal(apply_pt([1, 2j, 3 + 1j]), [3 - 1j, -2j, 1])


@pytest.mark.parametrize("shape", [(2,), (4,), (3, 1)])
def test_apply_pt_shape(shape):
    with pytest.raises(DimensionError):
        apply_pt(np.ones(shape))


@given(vectors)
def test_pt_is_an_involution(v):
    np.testing.assert_array_equal(apply_pt(apply_pt(v)), v)


@given(vectors)
def test_pt_preserves_norm(v):
    assert np.linalg.norm(apply_pt(v)) == pytest.approx(np.linalg.norm(v), rel=1e-15, abs=0)


@given(vectors, st.floats(-math.pi, math.pi))
def test_residual_is_phase_invariant(v, phase):
    if np.linalg.norm(v) < 1e-6:
        return
    a = pt_residual(v).residual
    b = pt_residual(np.exp(1j * phase) * v).residual
    assert a == pytest.approx(b, abs=1e-12)
    assert 0 <= a <= 2 + 1e-12


def test_zero_vector_rejected():
    with pytest.raises(ParameterError):
        pt_residual(np.zeros(3))


def test_pt_eigenvector_of_hand_built_state():
    # PT v = v exactly for (1, 2, 1) and a global phase maps the phase onto phi.
    r = pt_residual(np.array([1, 2, 1], dtype=complex))
    assert r.residual == 0 and r.phase_angle == 0 and r.symmetric
    r = pt_residual(np.exp(0.3j) * np.array([1, 2, 1]))
    assert r.phase_angle == pytest.approx(-0.6, abs=1e-15)
    assert r.residual < 1e-15


def test_symmetric_phase_angles(sym_params):
    spec, _ = trimmer_spectrum(sym_params)
    e0, ep, em = (pt_residual(v) for v in spec.eigenvectors)
    assert all(r.symmetric for r in (e0, ep, em))
    assert abs(e0.phase_angle) == pytest.approx(math.pi, abs=1e-12)
    # atan2(gamma * Delta, j^2 - gamma^2) with Delta = 7, j^2 - gamma^2 = 24
    assert ep.phase_angle == pytest.approx(math.atan(7 / 24), abs=1e-12)
    assert em.phase_angle == pytest.approx(-ep.phase_angle, abs=1e-12)


def test_broken_phase_residual_is_large():
    p = SystemParams(5, 1, 0.1)
    spec, _ = trimmer_spectrum(p)
    assert pt_residual(spec.eigenvectors[0]).symmetric
    values, vecs = np.linalg.eig(build_hamiltonian(p))
    for e in spec.eigenvalues[1:]:
        k = int(np.argmin(np.abs(values - e)))
        assert pt_residual(vecs[:, k]).residual > 0.5


def test_pt_angles(sym_params):
    theta1, theta2 = pt_angles(sym_params)
    assert theta1 == pytest.approx(math.atan(7 / 24), abs=1e-15)
    assert theta2 == pytest.approx(math.atan(7), abs=1e-15)


def test_pt_angle_quadrant_between_ep_and_gamma():
    # j^2 - gamma^2 < 0 puts theta1 in the second quadrant.
    p = SystemParams(5, 1, 0.9)
    theta1, _ = pt_angles(p)
    assert math.pi / 2 < theta1 < math.pi
    ep = pt_residual(trimmer_spectrum(p)[0].eigenvectors[1])
    assert ep.phase_angle == pytest.approx(theta1, abs=1e-12)


def test_pt_angles_need_symmetric_phase(broken_params):
    with pytest.raises(PhaseMismatchError):
        pt_angles(broken_params)


def test_localization_weight_values():
    assert localization_weight(trimmer_spectrum(SystemParams(5, 1, 0.5))[1]) == pytest.approx(3 - 2 * math.sqrt(2), abs=1e-14)
    # a+ ~ -j^2 / (2 gamma^2) for small j
    assert localization_weight(trimmer_spectrum(SystemParams(5, 1, 1e-3))[1]) == pytest.approx(5e-7, rel=1e-5)


def test_phase_diagram_rows(sym_params, broken_params):
    row = phase_diagram_row(sym_params)
    assert row.phase is PhaseClass.SYMMETRIC
    assert max(row.pt_residuals) < 1e-12
    assert row.abs_a_plus == pytest.approx(1, abs=1e-12)

    row = phase_diagram_row(broken_params)
    assert row.phase is PhaseClass.BROKEN
    assert row.pt_residuals[0] < 1e-12
    assert min(row.pt_residuals[1:]) > 0.5
    assert not row.pt[1].symmetric


def test_ep_row_is_labelled():
    row = phase_diagram_row(SystemParams(5, 1, 1 / math.sqrt(2)))
    assert row.phase is PhaseClass.EXCEPTIONAL_POINT
    assert np.all(np.abs(row.eigenvalues - 5) < 1e-7)
