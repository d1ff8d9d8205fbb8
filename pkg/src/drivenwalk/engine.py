"""Step and coin operators, their composition, and driven time evolution.

One driven step acts as

    a_t = U . (a_{t-1} + alpha_t),    U = S . C

where C applies the per-vertex coin blocks, S is the shift permutation and
alpha_t is the coherent injection added at step t (t = 1, 2, ...). The
injection is displaced into the state before the coin, so the per-step order
is inject, coin, shift. A schedule with per-step phase phi injects
alpha_t = base * exp(i phi t); matching phi to an eigenfrequency of U makes
that eigenmode accumulate amplitude linearly in t (see
:func:`drivenwalk.spectral.matched_injection_phase`).

Hard-boundary lines reuse the cyclic shift. That representation is exact as
long as no amplitude crosses the seam, which reflecting end coins guarantee;
runs monitor the two seam modes and refuse to continue silently if they ever
carry amplitude.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.sparse as sp

from . import kernels
from .coins import CoinAssignment
from .errors import NumericalIntegrityError
from .lattice import Line, Topology, Torus2D
from .state import AmplitudeState

__all__ = [
    "WalkOperator",
    "InjectionSchedule",
    "RunRecord",
    "build_coin_operator",
    "build_step_operator",
    "step_permutation",
    "wrap_watch_modes",
    "compose_walk_operator",
    "make_walk_operator",
    "injection_vector",
    "evolve_step",
    "driven_step",
    "run_driven_walk",
    "SPARSE_THRESHOLD",
    "UNITARITY_TOL",
]

# Dense matrices below this mode count, CSR above. The shift-coin product has
# at most coin_dim nonzeros per row, so sparse wins quickly.
SPARSE_THRESHOLD = 1000

UNITARITY_TOL = 1e-10

_WRAP_TOL = 1e-12


def step_permutation(topology: Topology, flip_flop: bool = False) -> np.ndarray:
    """Shift permutation as a scatter map: mode m moves to dest[m].

    Lines shift R modes to x+1 and L modes to x-1 (mod n). The torus moves
    L/R along -x/+x and U/D along +y/-y; with ``flip_flop`` the coin is
    swapped (L<->R, U<->D) after the move.
    """
    n_modes = topology.mode_count
    dest = np.zeros(n_modes, dtype=np.int64)
    if isinstance(topology, Line):
        n = topology.n
        swap = (1, 0) if flip_flop else (0, 1)
        for x in range(n):
            dest[x * 2 + 0] = ((x + 1) % n) * 2 + swap[0]
            dest[x * 2 + 1] = ((x - 1) % n) * 2 + swap[1]
    elif isinstance(topology, Torus2D):
        nx, ny = topology.nx, topology.ny
        moves = ((-1, 0), (1, 0), (0, 1), (0, -1))  # L, R, U, D
        swap = (1, 0, 3, 2) if flip_flop else (0, 1, 2, 3)
        for y in range(ny):
            for x in range(nx):
                v = y * nx + x
                for c, (dx, dy) in enumerate(moves):
                    v2 = ((y + dy) % ny) * nx + (x + dx) % nx
                    dest[v * 4 + c] = v2 * 4 + swap[c]
    else:
        raise TypeError(f"unsupported topology {type(topology).__name__}")
    return dest


def wrap_watch_modes(topology: Topology) -> np.ndarray:
    """Modes whose post-coin amplitude would cross the seam of a hard line.

    The shift wraps (R, n-1) to (R, 0) and (L, 0) to (L, n-1); on a hard
    boundary both must stay empty. Empty array for every other topology.
    """
    if isinstance(topology, Line) and topology.boundary == "hard":
        return np.array([(topology.n - 1) * 2 + 0, 0 * 2 + 1], dtype=np.int64)
    return np.zeros(0, dtype=np.int64)


def build_coin_operator(topology: Topology, coins: CoinAssignment):
    """Block-diagonal coin matrix, one block per vertex.

    Dense ndarray below SPARSE_THRESHOLD modes, CSR above.
    """
    if coins.topology != topology:
        raise ValueError("coin assignment was built for a different topology")
    blocks = coins.blocks
    if topology.mode_count > SPARSE_THRESHOLD:
        return sp.block_diag(list(blocks), format="csr", dtype=np.complex128)
    n, d = topology.mode_count, topology.coin_dim
    out = np.zeros((n, n), dtype=np.complex128)
    for v in range(topology.vertex_count):
        out[v * d : (v + 1) * d, v * d : (v + 1) * d] = blocks[v]
    return out


def build_step_operator(topology: Topology, flip_flop: bool = False):
    """Shift permutation as a matrix: column m has its 1 in row dest[m]."""
    dest = step_permutation(topology, flip_flop)
    n = topology.mode_count
    if n > SPARSE_THRESHOLD:
        data = np.ones(n)
        return sp.csr_matrix((data, (dest, np.arange(n))), shape=(n, n), dtype=np.complex128)
    out = np.zeros((n, n), dtype=np.complex128)
    out[dest, np.arange(n)] = 1.0
    return out


def _max_abs(matrix) -> float:
    if sp.issparse(matrix):
        return float(np.abs(matrix.data).max()) if matrix.nnz else 0.0
    return float(np.abs(matrix).max())


class WalkOperator:
    """Single-step unitary U = S . C.

    Structured operators (built by :func:`make_walk_operator`) carry the coin
    blocks and the shift permutation, which the evolution kernels consume
    without ever materializing U. Operators wrapped from explicit matrices
    via :func:`compose_walk_operator` evolve by matrix-vector products.
    """

    def __init__(self, topology=None, coins=None, flip_flop=False,
                 blocks=None, dest=None, matrix=None):
        if blocks is None and matrix is None:
            raise ValueError("need either structured data or an explicit matrix")
        self.topology = topology
        self.coins = coins
        self.flip_flop = bool(flip_flop)
        self.blocks = blocks
        self.dest = dest
        self._given_matrix = matrix
        if blocks is not None:
            self._src = np.argsort(dest)

    @property
    def is_structured(self) -> bool:
        return self.blocks is not None

    @property
    def mode_count(self) -> int:
        if self.blocks is not None:
            return self.blocks.shape[0] * self.blocks.shape[1]
        return self._given_matrix.shape[0]

    @cached_property
    def matrix(self):
        """The unitary as a matrix (dense under SPARSE_THRESHOLD modes)."""
        if self._given_matrix is not None:
            return self._given_matrix
        coin = build_coin_operator(self.topology, self.coins)
        if sp.issparse(coin):
            return coin[self._src, :].tocsr()
        return coin[self._src, :]

    def dense(self) -> np.ndarray:
        m = self.matrix
        return m.toarray() if sp.issparse(m) else m

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """One application of U to a raw amplitude vector."""
        if self.blocks is not None:
            v_count, d = self.blocks.shape[0], self.blocks.shape[1]
            coined = np.einsum(
                "vij,vj->vi", self.blocks, amplitudes.reshape(v_count, d)
            ).ravel()
            return coined[self._src]
        return self.matrix @ amplitudes


def compose_walk_operator(step, coin, topology=None, coins=None,
                          flip_flop=False) -> WalkOperator:
    """Multiply explicit step and coin matrices into a walk operator.

    The product is checked for unitarity; a residual above 1e-10 raises
    :class:`NumericalIntegrityError` rather than returning a silently broken
    operator.
    """
    u = step @ coin
    n = u.shape[0]
    if sp.issparse(u):
        residual = _max_abs(u @ u.conj().T - sp.identity(n, format="csr"))
    else:
        residual = _max_abs(u @ u.conj().T - np.eye(n))
    if residual > UNITARITY_TOL:
        raise NumericalIntegrityError("composed operator is not unitary", residual)
    return WalkOperator(topology=topology, coins=coins, flip_flop=flip_flop, matrix=u)


def make_walk_operator(topology: Topology, coins: CoinAssignment,
                       flip_flop: bool = False) -> WalkOperator:
    """Structured walk operator from a topology and a coin assignment.

    Unitarity holds by construction here: every coin block is unitary
    (enforced by CoinAssignment) and the shift is a permutation.
    """
    if coins.topology != topology:
        raise ValueError("coin assignment was built for a different topology")
    dest = step_permutation(topology, flip_flop)
    return WalkOperator(topology=topology, coins=coins, flip_flop=flip_flop,
                        blocks=coins.blocks, dest=dest)


def injection_vector(topology: Topology, vertex, weights: dict,
                     amplitude: float = 1.0) -> np.ndarray:
    """Injection base vector localized at one vertex.

    ``weights`` maps coin labels to complex weights; each is scaled by
    ``amplitude``. Unlisted coins stay empty.
    """
    base = np.zeros(topology.mode_count, dtype=np.complex128)
    v = topology.vertex_index(vertex)
    d = topology.coin_dim
    for label, w in weights.items():
        base[v * d + topology.coin_index(label)] = amplitude * complex(w)
    return base


@dataclass(frozen=True)
class InjectionSchedule:
    """Per-step coherent injection.

    Step k (1-based) injects ``base * exp(i * phase_per_step * k)`` unless
    ``explicit_override`` supplies the per-step vectors directly.
    """

    base: np.ndarray
    steps: int
    phase_per_step: float = 0.0
    explicit_override: Optional[np.ndarray] = None

    def __post_init__(self):
        base = np.ascontiguousarray(self.base, dtype=np.complex128)
        object.__setattr__(self, "base", base)
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")
        if self.explicit_override is not None:
            ex = np.ascontiguousarray(self.explicit_override, dtype=np.complex128)
            if ex.shape != (self.steps, base.shape[0]):
                raise ValueError(
                    f"explicit override must have shape {(self.steps, base.shape[0])}, "
                    f"got {ex.shape}"
                )
            object.__setattr__(self, "explicit_override", ex)

    @classmethod
    def constant(cls, base, steps) -> "InjectionSchedule":
        return cls(base=base, steps=steps, phase_per_step=0.0)

    @classmethod
    def phased(cls, base, phase_per_step, steps) -> "InjectionSchedule":
        return cls(base=base, steps=steps, phase_per_step=float(phase_per_step))

    @classmethod
    def from_vectors(cls, vectors) -> "InjectionSchedule":
        vectors = np.ascontiguousarray(vectors, dtype=np.complex128)
        return cls(base=np.zeros(vectors.shape[1], dtype=np.complex128),
                   steps=vectors.shape[0], explicit_override=vectors)

    def amplitude_at(self, k: int) -> np.ndarray:
        """Injection vector added at step k (1-based)."""
        if not 1 <= k <= self.steps:
            raise IndexError(f"step {k} outside schedule of {self.steps} steps")
        if self.explicit_override is not None:
            return self.explicit_override[k - 1]
        return self.base * np.exp(1j * self.phase_per_step * k)


@dataclass(frozen=True)
class RunRecord:
    """Time series produced by a driven run.

    Row t-1 of each array describes the state after step t. Eigenmode
    intensities are present only when the run was given a decomposition to
    project onto. ``wrap_leakage`` is the largest amplitude magnitude seen on
    the seam modes of a hard-boundary line (0.0 elsewhere).
    """

    vertex_intensity: np.ndarray
    mode_intensity: np.ndarray
    final_state: AmplitudeState
    eigenmode_intensity: Optional[np.ndarray] = None
    wrap_leakage: float = 0.0


def evolve_step(state: AmplitudeState, operator: WalkOperator) -> AmplitudeState:
    """One undriven step: a' = U a."""
    return AmplitudeState(state.topology, operator.apply(state.amplitudes),
                          state.step + 1)


def driven_step(state: AmplitudeState, operator: WalkOperator,
                injection: np.ndarray) -> AmplitudeState:
    """One driven step: a' = U (a + injection).

    Coherent injection adds amplitudes exactly; the global phase of the
    underlying displacement product is not tracked (it is unobservable in
    intensities, see :func:`drivenwalk.spectral.analytic_displacement_amplitude`
    for its closed form).
    """
    return AmplitudeState(state.topology,
                          operator.apply(state.amplitudes + injection),
                          state.step + 1)


def run_driven_walk(operator: WalkOperator, schedule: InjectionSchedule,
                    eigen=None, initial: Optional[AmplitudeState] = None,
                    wrap_tolerance: float = _WRAP_TOL) -> RunRecord:
    """Drive the walk from vacuum and record intensities step by step.

    Equivalent to the closed form a(t) = sum_k U^(t-k+1) alpha_k. When
    ``eigen`` (an EigenDecomposition of this operator) is given, per-step
    eigenmode intensities are recorded as well. A run may continue from an
    ``initial`` state instead of vacuum; the schedule's phase index stays
    relative to this run (its first step injects amplitude_at(1)), so
    continuations that need absolute phases should use an explicit override.

    On hard-boundary lines the post-coin amplitude at the seam is monitored;
    if it exceeds ``wrap_tolerance`` times the running amplitude scale, the
    cyclic representation no longer describes a hard wall and the run aborts
    with :class:`NumericalIntegrityError`. Reflecting end coins keep the seam
    amplitude at exactly zero.
    """
    topology = operator.topology
    if topology is None:
        raise ValueError("run_driven_walk needs an operator with a topology")
    n = topology.mode_count
    if schedule.base.shape[0] != n:
        raise ValueError(
            f"schedule is over {schedule.base.shape[0]} modes, operator has {n}"
        )
    steps = schedule.steps
    mode_out = np.zeros((steps, n), dtype=np.float64)
    want_amps = eigen is not None
    amps_out = np.zeros((steps, n), dtype=np.complex128) if want_amps else None
    watch = wrap_watch_modes(topology)

    if initial is None:
        a = np.zeros(n, dtype=np.complex128)
        start_step = 0
    else:
        a = initial.amplitudes.copy()
        start_step = initial.step

    if operator.is_structured:
        wrap_max = kernels.run_driven(
            operator.blocks, operator.dest, schedule.base,
            float(schedule.phase_per_step), steps, schedule.explicit_override,
            a, mode_out, amps_out, watch,
        )
    else:
        wrap_max = _run_dense(operator, schedule, a, mode_out, amps_out, watch)

    if watch.size and wrap_max > wrap_tolerance * max(1.0, float(np.abs(a).max())):
        raise NumericalIntegrityError(
            "amplitude crossed the hard-line boundary; reflecting end coins "
            "are required for boundary='hard'", wrap_max)

    d = topology.coin_dim
    vertex_out = mode_out.reshape(steps, topology.vertex_count, d).sum(axis=2)
    final = AmplitudeState(topology, a, start_step + steps)
    eig_out = None
    if want_amps:
        # b(t) = T a(t) for every step at once
        b = amps_out @ eigen.transform.T
        eig_out = (b.real * b.real + b.imag * b.imag)
    return RunRecord(vertex_intensity=vertex_out, mode_intensity=mode_out,
                     final_state=final, eigenmode_intensity=eig_out,
                     wrap_leakage=float(wrap_max))


def _run_dense(operator, schedule, a, mode_out, amps_out, watch):
    """Matrix-product fallback for operators without structure."""
    u = operator.matrix
    if watch.size:
        raise ValueError(
            "hard-boundary monitoring requires a structured operator; "
            "use make_walk_operator"
        )
    for k in range(1, schedule.steps + 1):
        alpha = schedule.amplitude_at(k)
        a[:] = u @ (a + alpha)
        mode_out[k - 1] = a.real * a.real + a.imag * a.imag
        if amps_out is not None:
            amps_out[k - 1] = a
    return 0.0
