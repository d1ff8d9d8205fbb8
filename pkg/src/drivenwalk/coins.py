"""Coin matrices and per-vertex coin assignments.

All coins are unitary matrices acting on the coin space of a single vertex.
Built-ins cover the standard set: the Hadamard and Pauli-X coins for
two-state walks, and the 4x4 reflection (Grover) coin plus its marked-vertex
counterpart -I for four-state walks.
"""

import numpy as np

from .lattice import Topology

__all__ = [
    "hadamard",
    "pauli_x",
    "grover4",
    "minus_identity4",
    "BUILTIN_COINS",
    "CoinAssignment",
    "UNITARITY_TOL",
]

UNITARITY_TOL = 1e-12


def hadamard() -> np.ndarray:
    """2x2 Hadamard coin, (1/sqrt 2) [[1, 1], [1, -1]]."""
    return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)


def pauli_x() -> np.ndarray:
    """2x2 swap coin [[0, 1], [1, 0]], used as a reflecting boundary."""
    return np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)


def grover4() -> np.ndarray:
    """4x4 reflection coin (1/2)(J - 2I), J the all-ones matrix."""
    return 0.5 * np.ones((4, 4), dtype=np.complex128) - np.eye(4, dtype=np.complex128)


def minus_identity4() -> np.ndarray:
    """Negated 4x4 identity, the coin carried by marked vertices."""
    return -np.eye(4, dtype=np.complex128)


BUILTIN_COINS = {
    "hadamard": hadamard,
    "pauli_x": pauli_x,
    "grover4": grover4,
    "minus_identity4": minus_identity4,
}


def _check_unitary(matrix: np.ndarray, dim: int, where: str) -> np.ndarray:
    m = np.asarray(matrix, dtype=np.complex128)
    if m.shape != (dim, dim):
        raise ValueError(f"{where}: coin must be {dim}x{dim}, got {m.shape}")
    residual = np.abs(m @ m.conj().T - np.eye(dim)).max()
    if residual > UNITARITY_TOL:
        raise ValueError(f"{where}: coin is not unitary (residual {residual:.3e})")
    return m


class CoinAssignment:
    """A unitary coin for every vertex of a topology.

    The per-vertex matrices are stored as one (V, d, d) array, which is the
    layout the evolution kernels consume directly.
    """

    def __init__(self, topology: Topology, blocks: np.ndarray):
        blocks = np.ascontiguousarray(blocks, dtype=np.complex128)
        d = topology.coin_dim
        if blocks.shape != (topology.vertex_count, d, d):
            raise ValueError(
                f"expected blocks of shape {(topology.vertex_count, d, d)}, "
                f"got {blocks.shape}"
            )
        for v in range(topology.vertex_count):
            _check_unitary(blocks[v], d, f"vertex {v}")
        self.topology = topology
        self.blocks = blocks
        self.blocks.flags.writeable = False

    @classmethod
    def uniform(cls, topology: Topology, coin: np.ndarray) -> "CoinAssignment":
        """Same coin at every vertex."""
        d = topology.coin_dim
        coin = _check_unitary(coin, d, "uniform coin")
        blocks = np.broadcast_to(coin, (topology.vertex_count, d, d)).copy()
        return cls(topology, blocks)

    @classmethod
    def from_overrides(
        cls, topology: Topology, default: np.ndarray, overrides: dict
    ) -> "CoinAssignment":
        """Default coin everywhere, replaced at the given vertices.

        Override keys may be flattened vertex indices or (x, y) pairs on a
        torus; values are coin matrices.
        """
        d = topology.coin_dim
        default = _check_unitary(default, d, "default coin")
        blocks = np.broadcast_to(default, (topology.vertex_count, d, d)).copy()
        for vertex, coin in overrides.items():
            v = topology.vertex_index(vertex)
            blocks[v] = _check_unitary(coin, d, f"override at vertex {vertex}")
        return cls(topology, blocks)

    def __getitem__(self, vertex) -> np.ndarray:
        return self.blocks[self.topology.vertex_index(vertex)]
