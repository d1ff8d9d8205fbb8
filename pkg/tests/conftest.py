import numpy as np
import pytest

from drivenwalk import CoinAssignment, Line, Torus2D, hadamard, \
    make_walk_operator, pauli_x


def haar_unitary(rng, d):
    """Haar-distributed unitary via phase-corrected QR of a Ginibre matrix."""
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * np.exp(-1j * np.angle(np.diag(r)))[None, :]


def random_coins(rng, topology):
    d = topology.coin_dim
    blocks = np.stack([haar_unitary(rng, d) for _ in range(topology.vertex_count)])
    return CoinAssignment(topology, blocks)


def random_instance(rng, max_line=8, max_torus=4, allow_torus=True):
    """Random (topology, coins, flip_flop) triple with Haar coins."""
    if allow_torus and rng.random() < 0.4:
        nx = int(rng.integers(2, max_torus + 1))
        ny = int(rng.integers(2, max_torus + 1))
        topology = Torus2D(nx, ny)
        flip_flop = bool(rng.random() < 0.5)
    else:
        n = int(rng.integers(2, max_line + 1))
        topology = Line(n)
        flip_flop = False
    return topology, random_coins(rng, topology), flip_flop


def closed_form_state(operator, schedule, t):
    """Independent oracle: a(t) = sum_k U^(t-k+1) alpha_k by dense powers."""
    u = operator.dense()
    a = np.zeros(u.shape[0], dtype=np.complex128)
    for k in range(1, t + 1):
        a += np.linalg.matrix_power(u, t - k + 1) @ schedule.amplitude_at(k)
    return a


@pytest.fixture
def line5():
    """The reflecting 5-vertex line: swap coins at the ends, Hadamard inside."""
    topology = Line(5, "hard")
    coins = CoinAssignment.from_overrides(
        topology, hadamard(), {0: pauli_x(), 4: pauli_x()})
    return topology, coins, make_walk_operator(topology, coins)
