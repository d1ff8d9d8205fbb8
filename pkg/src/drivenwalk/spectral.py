"""Spectral decomposition of the walk unitary and the injection phase laws.

The walk unitary U has eigenvalues exp(i w_j); the phases w_j are the
eigenfrequencies, stored sorted ascending and wrapped to (-pi, pi]. The
transform matrix T maps physical amplitudes to eigenmode amplitudes,
b = T a, with T unitary and U = T^dag diag(exp(i w)) T.

Driving the walk with per-step phase phi splits the modes by their mismatch
delta_j = phi - w_j (wrapped). A matched mode (delta = 0) accumulates
amplitude linearly, so its intensity grows as t^2; a mismatched mode
oscillates between 0 and |beta|^2 / sin^2(delta/2). Both laws have closed
forms below, used as independent oracles against the simulated recursion.

The decomposition itself uses the complex Schur form, which for a normal
matrix is diagonal and hands back an orthonormal eigenbasis even inside
degenerate eigenspaces (plain eigensolvers do not guarantee that).
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import NumericalIntegrityError, UndefinedGapError
from .state import AmplitudeState

__all__ = [
    "EigenDecomposition",
    "MismatchProfile",
    "eigendecompose",
    "to_eigenbasis",
    "from_eigenbasis",
    "mismatch_profile",
    "matched_injection_phase",
    "matched_mode_index",
    "analytic_mode_intensity",
    "analytic_displacement_amplitude",
    "spectral_gap",
    "frequency_cluster",
    "subspace_projection",
    "wrap_phase",
    "MATCHED_DELTA_EPS",
    "RECONSTRUCTION_TOL",
]

# Mismatches below this switch the oscillation law to its quadratic limit;
# the sin^2 ratio loses precision there while the limit is exact.
MATCHED_DELTA_EPS = 1e-9

RECONSTRUCTION_TOL = 1e-8

# Frequencies closer than this are treated as one degenerate cluster.
DEGENERACY_TOL = 1e-9


def wrap_phase(x):
    """Wrap angles to the half-open interval (-pi, pi]."""
    w = np.mod(np.asarray(x, dtype=np.float64) + np.pi, 2.0 * np.pi) - np.pi
    w = np.where(w == -np.pi, np.pi, w)
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(w)
    return w


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenfrequencies and the physical-to-eigenmode transform.

    ``frequencies`` is sorted ascending in (-pi, pi]. Row j of ``transform``
    is the conjugated j-th eigenvector, so ``transform @ a`` gives the
    eigenmode amplitudes of a physical vector a.
    """

    frequencies: np.ndarray
    transform: np.ndarray

    @property
    def size(self) -> int:
        return self.frequencies.shape[0]

    def eigenvector(self, j: int) -> np.ndarray:
        """Eigenvector j as a physical-basis column."""
        return self.transform[j].conj()

    def reconstruct(self) -> np.ndarray:
        """T^dag diag(exp(i w)) T, which must reproduce the input unitary."""
        phases = np.exp(1j * self.frequencies)
        return (self.transform.conj().T * phases) @ self.transform


def _as_dense(operator) -> np.ndarray:
    matrix = getattr(operator, "matrix", operator)
    if sp.issparse(matrix):
        matrix = matrix.toarray()
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    return matrix


def eigendecompose(operator) -> EigenDecomposition:
    """Decompose a walk operator (or raw unitary matrix).

    Frequencies come back sorted ascending. Within a degenerate eigenspace
    the returned basis is one valid orthonormal choice; only subspace totals
    are basis independent there. The reconstruction residual is verified and
    a failure raises :class:`NumericalIntegrityError` with the residual.
    """
    u = _as_dense(operator)
    schur_t, schur_z = sla.schur(u, output="complex")
    omega = wrap_phase(np.angle(np.diag(schur_t)))
    order = np.argsort(omega, kind="stable")
    decomp = EigenDecomposition(
        frequencies=np.ascontiguousarray(omega[order]),
        transform=np.ascontiguousarray(schur_z[:, order].conj().T),
    )
    residual = float(np.abs(decomp.reconstruct() - u).max())
    if residual > RECONSTRUCTION_TOL:
        raise NumericalIntegrityError(
            "eigendecomposition failed to reconstruct the operator", residual)
    return decomp


def _amplitudes(state) -> np.ndarray:
    if isinstance(state, AmplitudeState):
        return state.amplitudes
    return np.asarray(state, dtype=np.complex128)


def to_eigenbasis(state, decomp: EigenDecomposition) -> np.ndarray:
    """Eigenmode amplitudes b = T a. Unitary, so it preserves total intensity."""
    return decomp.transform @ _amplitudes(state)


def from_eigenbasis(b, decomp: EigenDecomposition) -> np.ndarray:
    """Physical amplitudes a = T^dag b."""
    return decomp.transform.conj().T @ np.asarray(b, dtype=np.complex128)


@dataclass(frozen=True)
class MismatchProfile:
    """Per-mode phase mismatch and coupling for one injection choice.

    deltas[j] = wrap(phi - w_j); couplings[j] is the eigenbasis image of the
    base injection vector.
    """

    phi: float
    deltas: np.ndarray
    couplings: np.ndarray


def mismatch_profile(decomp: EigenDecomposition, phi: float,
                     base: np.ndarray) -> MismatchProfile:
    base = np.asarray(base, dtype=np.complex128)
    if base.shape != (decomp.size,):
        raise ValueError(f"base vector must have length {decomp.size}")
    deltas = wrap_phase(phi - decomp.frequencies)
    return MismatchProfile(phi=float(phi), deltas=deltas,
                           couplings=decomp.transform @ base)


def matched_mode_index(decomp: EigenDecomposition, base: np.ndarray,
                       rel_tol: float = 1e-9) -> int:
    """Index of the mode the injection couples to most strongly.

    Couplings within ``rel_tol`` of the maximum count as tied; the smallest
    index (lowest frequency) wins, which keeps the choice deterministic when
    symmetry makes several couplings exactly equal.
    """
    strength = np.abs(decomp.transform @ np.asarray(base, dtype=np.complex128))
    top = strength.max()
    if top == 0.0:
        raise ValueError("injection vector couples to no eigenmode")
    return int(np.flatnonzero(strength >= (1.0 - rel_tol) * top)[0])


def matched_injection_phase(decomp: EigenDecomposition, j: int) -> float:
    """Per-step injection phase that phase-matches eigenmode j.

    Under this package's conventions (injection base * exp(i phi k) at step
    k, eigenvalues exp(i w_j)) the matched phase is exactly w_j: the driven
    recursion gives b_j(t) = beta_j e^{i w_j (t+1)} sum_k e^{i (phi - w_j) k},
    and the sum accumulates constructively iff phi = w_j.
    """
    return float(decomp.frequencies[j])


def analytic_mode_intensity(beta, delta, t):
    """Closed-form intensity of one eigenmode after t driven steps.

    Matched (|delta| < MATCHED_DELTA_EPS): t^2 |beta|^2. Otherwise the
    oscillation law |beta|^2 sin^2(t delta / 2) / sin^2(delta / 2). ``t`` may
    be an integer or an array of integers.
    """
    t = np.asarray(t, dtype=np.float64)
    amp2 = abs(beta) ** 2
    if abs(delta) < MATCHED_DELTA_EPS:
        out = amp2 * t * t
    else:
        s = np.sin(0.5 * delta)
        out = amp2 * np.sin(0.5 * t * delta) ** 2 / (s * s)
    if out.ndim == 0:
        return float(out)
    return out


def analytic_displacement_amplitude(alpha, delta, t):
    """Accumulated displacement of one eigenmode, with its global phase.

    Injecting alpha e^{i delta k} for t steps is a single displacement of

        alpha (1 - P^t) / (1 - P),   P = e^{i delta}

    (t alpha in the matched limit) times a physically unobservable global
    phase factor exp(i |alpha|^2 G), G = sum_{n=1}^{t-1} sum_{k=1}^{n}
    sin(k delta). Returns (amplitude, G). The squared magnitude of the
    amplitude equals :func:`analytic_mode_intensity` for the same inputs.
    """
    t = int(t)
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    alpha = complex(alpha)
    if abs(delta) < MATCHED_DELTA_EPS:
        return t * alpha, 0.0
    p = np.exp(1j * delta)
    amplitude = alpha * (1.0 - p ** t) / (1.0 - p)
    if t < 2:
        return amplitude, 0.0
    # inner sum: sum_{k=1}^{n} sin(k delta) = Im[ p (1 - p^n) / (1 - p) ]
    n = np.arange(1, t)
    inner = (p * (1.0 - p ** n) / (1.0 - p)).imag
    global_phase = abs(alpha) ** 2 * float(inner.sum())
    return amplitude, global_phase


def spectral_gap(decomp: EigenDecomposition, reference: float) -> float:
    """Wrapped distance from ``reference`` to the nearest distinct frequency.

    Frequencies within DEGENERACY_TOL of the reference are its own multiplet
    and do not count. Raises :class:`UndefinedGapError` when nothing is left.
    """
    dist = np.abs(wrap_phase(decomp.frequencies - reference))
    dist = dist[dist > DEGENERACY_TOL]
    if dist.size == 0:
        raise UndefinedGapError(
            f"every eigenfrequency coincides with reference {reference}")
    return float(dist.min())


def frequency_cluster(decomp: EigenDecomposition, reference: float,
                      tol: float = DEGENERACY_TOL) -> np.ndarray:
    """Indices of all frequencies within ``tol`` of ``reference`` (wrapped)."""
    return np.flatnonzero(np.abs(wrap_phase(decomp.frequencies - reference)) <= tol)


def subspace_projection(decomp: EigenDecomposition, indices,
                        vector: np.ndarray) -> np.ndarray:
    """Physical-basis projection of ``vector`` onto selected eigenvectors.

    Basis independent within a degenerate cluster, which makes it the right
    tool for questions about degenerate eigenspaces as a whole.
    """
    rows = decomp.transform[np.asarray(indices, dtype=np.intp)]
    return rows.conj().T @ (rows @ np.asarray(vector, dtype=np.complex128))
