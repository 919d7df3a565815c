"""Trimmer spectrum in closed form, plus a small dense eigensolver.

The closed form gives ``E0 = w`` and ``E+- = w +- sqrt(2 j^2 - g^2)``
with eigenvectors ``(-1, -i g/j, 1)`` and ``(a+-, b+-, 1)``. The
numerical route (characteristic polynomial -> Aberth roots -> inverse
iteration) shares no code with it and is used as an independent check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .core import SystemParams, build_hamiltonian
from .errors import ConvergenceError, DegenerateConfigurationError, DimensionError

ROOT_TOL = 1e-12
VECTOR_TOL = 1e-10
MAX_ITER = 200
MAX_DIM = 16

# Fixed irrational offset for the Aberth starting circle.
_ANGLE_OFFSET = 0.4 * (math.sqrt(5.0) - 1.0)
# Relative singular-value cutoff used when measuring rank(H - E I).
_RANK_RTOL = 1e-7


@dataclass(frozen=True)
class Defect:
    """A coalesced eigenvalue whose eigenvectors do not span its multiplicity."""

    eigenvalue: complex
    algebraic: int
    geometric: int
    rank: int


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with matched unit eigenvectors and residuals.

    For a defective cluster only ``geometric`` eigenvectors exist; the
    remaining slots hold ``None`` (and a NaN residual) and the cluster is
    listed in ``defects``.
    """

    eigenvalues: np.ndarray
    eigenvectors: tuple
    residuals: np.ndarray
    defects: tuple = field(default=())

    @property
    def defective(self) -> bool:
        return bool(self.defects)

    def __len__(self):
        return len(self.eigenvalues)


@dataclass(frozen=True)
class TrimmerSpectralData:
    a_plus: complex
    a_minus: complex
    b_plus: complex
    b_minus: complex
    delta_sq: float


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Normalize ``v`` and rotate it so its last nonzero entry is real positive."""
    v = np.asarray(v, dtype=complex)
    peak = np.max(np.abs(v)) if v.size else 0.0
    if peak == 0 or not np.isfinite(peak):
        raise ValueError("cannot normalize a zero or non-finite vector")
    v = v / peak  # avoids overflow in the norm for huge inverse-iteration steps
    v = v / np.linalg.norm(v)
    tiny = 1e-14
    nonzero = np.flatnonzero(np.abs(v) > tiny)
    pivot = v[nonzero[-1]] if nonzero.size else v[-1]
    return v * (abs(pivot) / pivot)


def _residual(m, value, v):
    return float(np.linalg.norm(m @ v - value * v))


def trimmer_spectrum(params: SystemParams) -> tuple[Spectrum, TrimmerSpectralData]:
    """Closed-form eigensystem ordered as ``(E0, E+, E-)``.

    In the broken phase the square root is the principal complex root, so
    ``E+`` is the amplified (long-lifetime) supermode.
    """
    w, g, j = params.omega, params.gamma, params.j
    if j == 0:
        raise DegenerateConfigurationError("j = 0 decouples the cavities; use eig() instead")
    delta_sq = 2.0 * j * j - g * g
    root = cmath.sqrt(delta_sq)
    a_plus = (j * j - g * g - 1j * g * root) / (j * j)
    a_minus = (j * j - g * g + 1j * g * root) / (j * j)
    b_plus = (-1j * g + root) / j
    b_minus = (-1j * g - root) / j
    if delta_sq < 0 and g > 0:
        # gamma - delta cancels for small j; use gamma - delta = 2 j^2 / (gamma + delta).
        small = root.imag
        a_plus = complex(-2 * j * j / (g + small) ** 2)
        b_plus = -2j * j / (g + small)

    values = np.array([w, w + root, w - root], dtype=complex)
    raw = [
        np.array([-1.0, -1j * g / j, 1.0]),
        np.array([a_plus, b_plus, 1.0]),
        np.array([a_minus, b_minus, 1.0]),
    ]
    vectors = tuple(fix_phase(v) for v in raw)
    m = build_hamiltonian(params)
    residuals = np.array([_residual(m, e, v) for e, v in zip(values, vectors)])
    data = TrimmerSpectralData(a_plus, a_minus, b_plus, b_minus, delta_sq)
    return Spectrum(values, vectors, residuals), data


def _as_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionError(f"expected a nonempty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def char_poly(m) -> np.ndarray:
    """Monic characteristic polynomial, highest degree first (Faddeev-LeVerrier).

    >>> char_poly(np.eye(2)).real
    array([ 1., -2.,  1.])
    """
    m = _as_square(m)
    n = m.shape[0]
    if n > MAX_DIM:
        raise DimensionError(f"char_poly is meant for n <= {MAX_DIM}, got {n}")
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    identity = np.eye(n, dtype=complex)
    aux = np.zeros_like(m)
    for k in range(1, n + 1):
        aux = m @ aux + coeffs[k - 1] * identity
        coeffs[k] = -np.trace(m @ aux) / k
    return coeffs


def _horner(coeffs, z):
    """Value and derivative of the polynomial at ``z``."""
    p = coeffs[0]
    dp = 0j
    for c in coeffs[1:]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _backward_scale(coeffs, z):
    az = abs(z)
    s = 0.0
    for c in coeffs:
        s = s * az + abs(c)
    return s


def _taylor_shift(coeffs, center):
    """Coefficients of ``p(x + center)`` by repeated synthetic division."""
    c = np.array(coeffs, dtype=complex)
    n = len(c) - 1
    for i in range(n):
        for k in range(1, n + 1 - i):
            c[k] += center * c[k - 1]
    return c


def _initial_guesses(coeffs):
    n = len(coeffs) - 1
    center = -coeffs[1] / (n * coeffs[0])
    shifted = _taylor_shift(coeffs, center)
    ratios = [abs(shifted[k] / shifted[0]) ** (1.0 / k) for k in range(1, n + 1)]
    radius = 2.0 * max(ratios) if max(ratios) > 0 else 1.0
    angles = 2.0 * math.pi * np.arange(n) / n + _ANGLE_OFFSET
    return center + radius * np.exp(1j * angles)


def roots_aberth(coeffs, tol: float = ROOT_TOL, max_iter: int = MAX_ITER) -> np.ndarray:
    """All complex roots of a polynomial by Aberth-Ehrlich iteration.

    Convergence is judged by the backward error ``|p(z)| / sum |c_k||z|^k``.
    Each root gets one Newton polishing step afterwards, kept only if it
    lowers ``|p|``.

    >>> np.sort_complex(roots_aberth([1, 0, 1]))
    array([0.-1.j, 0.+1.j])
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.ndim != 1 or coeffs.size < 2:
        raise ValueError("need a polynomial of degree >= 1")
    if coeffs[0] == 0:
        raise ValueError("leading coefficient must be nonzero")
    coeffs = coeffs / coeffs[0]
    n = coeffs.size - 1
    if n == 1:
        return np.array([-coeffs[1]])

    z = _initial_guesses(coeffs)
    done = np.zeros(n, dtype=bool)
    for _ in range(max_iter):
        for i in range(n):
            if done[i]:
                continue
            p, dp = _horner(coeffs, z[i])
            if abs(p) <= tol * _backward_scale(coeffs, z[i]):
                done[i] = True
                continue
            ratio = p / dp if dp != 0 else p
            repulsion = sum(1.0 / (z[i] - z[k]) for k in range(n) if k != i and z[i] != z[k])
            z[i] -= ratio / (1.0 - ratio * repulsion)
        if done.all():
            break
    else:
        raise ConvergenceError(f"Aberth iteration did not converge in {max_iter} sweeps", best=z.copy())

    for i in range(n):
        p, dp = _horner(coeffs, z[i])
        if dp == 0:
            continue
        candidate = z[i] - p / dp
        if abs(_horner(coeffs, candidate)[0]) < abs(p):
            z[i] = candidate
    return z


def eigenvector_inverse_iteration(m, eigenvalue: complex, tol: float = VECTOR_TOL,
                                  max_iter: int = 50) -> np.ndarray:
    """Unit eigenvector for an approximate eigenvalue by shifted inverse iteration.

    Converged once ``||m v - eigenvalue v|| <= tol * max(1, ||m||_1)``.
    If ``m - eigenvalue I`` is exactly singular the shift is nudged by a
    tiny amount relative to ``||m||``.
    """
    m = _as_square(m)
    n = m.shape[0]
    scale = max(1.0, float(np.linalg.norm(m, 1)))
    shifted = m - eigenvalue * np.eye(n)
    v = np.ones(n, dtype=complex) / math.sqrt(n)
    best, best_res = v, math.inf
    nudge = 1e-14 * scale
    for _ in range(max_iter):
        try:
            w = np.linalg.solve(shifted, v)
        except np.linalg.LinAlgError:
            shifted = shifted - nudge * (1 + 1j) * np.eye(n)
            nudge *= 10
            continue
        if not np.all(np.isfinite(w)) or not np.any(w):
            shifted = shifted - nudge * (1 + 1j) * np.eye(n)
            nudge *= 10
            continue
        v = fix_phase(w)
        res = _residual(m, eigenvalue, v)
        if res < best_res:
            best, best_res = v, res
        if res <= tol * scale:
            return v
    raise ConvergenceError(
        f"inverse iteration stalled at residual {best_res:.3e} > {tol:.1e}", best=best
    )


def _clusters(values, radius):
    """Group values whose chained pairwise distance is within ``radius``."""
    n = len(values)
    labels = list(range(n))

    def find(i):
        while labels[i] != i:
            labels[i] = labels[labels[i]]
            i = labels[i]
        return i

    for i in range(n):
        for k in range(i + 1, n):
            if abs(values[i] - values[k]) <= radius:
                labels[find(i)] = find(k)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def measured_rank(m, value) -> int:
    """Numerical rank of ``m - value I``, with the cutoff scaled by ``||m||``."""
    m = _as_square(m)
    s = np.linalg.svd(m - value * np.eye(m.shape[0]), compute_uv=False)
    cutoff = _RANK_RTOL * max(1.0, float(np.linalg.norm(m, 2)))
    return int(np.sum(s > cutoff))


def _cluster_center(coeffs, values):
    """Center of a k-fold cluster, polished as a root of the (k-1)th derivative."""
    k = len(values)
    center = complex(np.mean(values))
    deriv = np.polyder(coeffs, k - 1)
    if len(deriv) < 2:
        return center
    for _ in range(5):
        p, dp = _horner(deriv, center)
        if dp == 0:
            break
        step = p / dp
        center -= step
        if abs(step) <= 1e-16 * max(1.0, abs(center)):
            break
    return center


def eig(m, tol: float = ROOT_TOL, vector_tol: float = VECTOR_TOL,
        max_iter: int = MAX_ITER) -> Spectrum:
    """Eigen-decomposition via characteristic polynomial, Aberth and inverse iteration.

    Near-coincident roots are grouped; a group whose ``m - E I`` has
    nullity smaller than the group size is reported as a :class:`Defect`
    rather than padded with duplicate eigenvectors.
    """
    m = _as_square(m)
    n = m.shape[0]
    if n > MAX_DIM:
        raise DimensionError(f"eig is meant for n <= {MAX_DIM}, got {n}")
    coeffs = char_poly(m)
    roots = roots_aberth(coeffs, tol=tol, max_iter=max_iter)
    order = np.lexsort((roots.imag, roots.real))
    roots = roots[order]

    scale = max(1.0, float(np.max(np.abs(roots))))
    # Multiple roots are only resolved to about tol**(1/k); group generously
    # and let the measured rank decide whether the group is really defective.
    groups = _clusters(roots, 10.0 * tol ** (1.0 / 3.0) * scale)

    values = roots.astype(complex)
    vectors: list = [None] * n
    residuals = np.full(n, np.nan)
    defects = []
    for group in groups:
        if len(group) == 1:
            i = group[0]
            vectors[i] = eigenvector_inverse_iteration(m, values[i], vector_tol)
            values[i] = _rayleigh(m, values[i], vectors[i])
            residuals[i] = _residual(m, values[i], vectors[i])
            continue
        separate = _separate_vectors(m, values[group], vector_tol)
        if separate is not None:
            for i, vec in zip(group, separate):
                vectors[i] = vec
                residuals[i] = _residual(m, values[i], vec)
            continue
        center = _cluster_center(coeffs, values[group])
        rank = measured_rank(m, center)
        nullity = n - rank
        for i in group:
            values[i] = center
        found = _null_vectors(m, center, min(nullity, len(group)))
        for slot, vec in zip(group, found):
            vectors[slot] = vec
            residuals[slot] = _residual(m, center, vec)
        if nullity < len(group):
            defects.append(Defect(complex(center), len(group), nullity, rank))
    return Spectrum(values, tuple(vectors), residuals, tuple(defects))


def _rayleigh(m, value, v):
    """Rayleigh quotient of a unit vector, kept only if it lowers the residual."""
    refined = complex(np.vdot(v, m @ v))
    return refined if _residual(m, refined, v) < _residual(m, value, v) else value


def _separate_vectors(m, values, tol):
    """Eigenvectors for close roots, or None if they are not independent."""
    try:
        vecs = [eigenvector_inverse_iteration(m, value, tol) for value in values]
    except ConvergenceError:
        return None
    # Roots split from a Jordan block by rounding give nearly parallel
    # vectors; a genuinely repeated eigenvalue gives an O(1) angle.
    s = np.linalg.svd(np.array(vecs), compute_uv=False)
    if s[-1] < 1e-3 * s[0]:
        return None
    return vecs


def _null_vectors(m, value, count):
    """Right singular vectors of ``m - value I`` for the smallest singular values."""
    _, _, vh = np.linalg.svd(m - value * np.eye(m.shape[0]))
    return [fix_phase(vh[-(k + 1)].conj()) for k in range(count)]
