"""Walk topologies and the mode index convention.

A mode is a (coin direction, vertex) pair. Modes are flattened to a single
integer index with the coin running fastest:

    index = vertex * coin_dim + coin_index

Vertices on a 2D torus are themselves flattened row-major in (y, x):

    vertex = y * nx + x

Coin orders are frozen as ("R", "L") in one dimension and ("L", "R", "U",
"D") in two, matching the row order of the built-in coin matrices. "R"/"L"
move along +x/-x and "U"/"D" along +y/-y.
"""

from dataclasses import dataclass, field
from typing import Tuple, Union

__all__ = [
    "Line",
    "Torus2D",
    "Topology",
    "Mode",
    "mode_index",
    "mode_from_index",
]


@dataclass(frozen=True)
class Mode:
    """One bosonic mode of the walk: a coin label plus a flattened vertex."""

    coin: str
    vertex: int


@dataclass(frozen=True)
class Line:
    """1D chain of ``n`` vertices with a two-state coin.

    ``boundary`` selects between a periodic ring ("cyclic") and a finite
    chain ("hard"). Hard lines reuse the cyclic shift internally; the walk
    engine watches the wrap-around entries and requires them to carry zero
    amplitude, which reflecting end coins guarantee.
    """

    n: int
    boundary: str = "cyclic"
    coin_labels: Tuple[str, ...] = field(default=("R", "L"), init=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"Line needs n >= 2, got {self.n}")
        if self.boundary not in ("cyclic", "hard"):
            raise ValueError(f"unknown boundary mode {self.boundary!r}")

    @property
    def coin_dim(self) -> int:
        return 2

    @property
    def vertex_count(self) -> int:
        return self.n

    @property
    def mode_count(self) -> int:
        return 2 * self.n

    def coin_index(self, label: str) -> int:
        try:
            return self.coin_labels.index(label)
        except ValueError:
            raise ValueError(f"unknown coin label {label!r} for Line") from None

    def vertex_index(self, vertex) -> int:
        v = int(vertex)
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {vertex} outside line of {self.n} vertices")
        return v


@dataclass(frozen=True)
class Torus2D:
    """nx-by-ny lattice with periodic boundaries and a four-state coin."""

    nx: int
    ny: int
    coin_labels: Tuple[str, ...] = field(default=("L", "R", "U", "D"), init=False)

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError(f"Torus2D needs nx, ny >= 2, got {self.nx}x{self.ny}")

    @property
    def coin_dim(self) -> int:
        return 4

    @property
    def vertex_count(self) -> int:
        return self.nx * self.ny

    @property
    def mode_count(self) -> int:
        return 4 * self.nx * self.ny

    def coin_index(self, label: str) -> int:
        try:
            return self.coin_labels.index(label)
        except ValueError:
            raise ValueError(f"unknown coin label {label!r} for Torus2D") from None

    def vertex_index(self, vertex) -> int:
        """Flatten an (x, y) pair; integers are taken as already flattened."""
        if isinstance(vertex, (tuple, list)):
            x, y = int(vertex[0]), int(vertex[1])
            if not (0 <= x < self.nx and 0 <= y < self.ny):
                raise IndexError(f"vertex {vertex} outside {self.nx}x{self.ny} torus")
            return y * self.nx + x
        v = int(vertex)
        if not 0 <= v < self.vertex_count:
            raise IndexError(f"vertex {vertex} outside {self.nx}x{self.ny} torus")
        return v

    def vertex_coords(self, v: int) -> Tuple[int, int]:
        """Inverse of :meth:`vertex_index`, returning (x, y)."""
        v = int(v)
        if not 0 <= v < self.vertex_count:
            raise IndexError(f"vertex {v} outside {self.nx}x{self.ny} torus")
        return v % self.nx, v // self.nx


Topology = Union[Line, Torus2D]


def mode_index(topology: Topology, coin: str, vertex) -> int:
    """Flattened index of the mode (coin, vertex), coin-major within vertex."""
    c = topology.coin_index(coin)
    v = topology.vertex_index(vertex)
    return v * topology.coin_dim + c


def mode_from_index(topology: Topology, index: int) -> Mode:
    """Inverse of :func:`mode_index`."""
    index = int(index)
    if not 0 <= index < topology.mode_count:
        raise IndexError(f"mode index {index} outside [0, {topology.mode_count})")
    d = topology.coin_dim
    return Mode(coin=topology.coin_labels[index % d], vertex=index // d)
