import numpy as np
import pytest

from drivenwalk import BUILTIN_COINS, CoinAssignment, Line, Torus2D, grover4, \
    hadamard, minus_identity4, pauli_x


@pytest.mark.parametrize("name", sorted(BUILTIN_COINS))
def test_builtins_unitary(name):
    c = BUILTIN_COINS[name]()
    assert np.abs(c @ c.conj().T - np.eye(c.shape[0])).max() <= 1e-12


def test_pauli_x_squares_to_identity():
    assert np.allclose(pauli_x() @ pauli_x(), np.eye(2), atol=1e-15)


def test_hadamard_squares_to_identity():
    assert np.allclose(hadamard() @ hadamard(), np.eye(2), atol=1e-15)


def test_grover_symmetric_and_involutory():
    g = grover4()
    assert np.array_equal(g, g.T)
    assert np.allclose(g @ g, np.eye(4), atol=1e-15)


def test_grover_fixes_uniform_coin_vector():
    g = grover4()
    uniform = np.full(4, 0.5, dtype=complex)
    assert np.allclose(g @ uniform, uniform, atol=1e-15)


def test_minus_identity_entries():
    assert np.array_equal(minus_identity4(), -np.eye(4))


def test_uniform_assignment():
    topo = Line(4)
    coins = CoinAssignment.uniform(topo, hadamard())
    assert coins.blocks.shape == (4, 2, 2)
    assert np.allclose(coins[2], hadamard())


def test_overrides_assignment():
    topo = Line(5)
    coins = CoinAssignment.from_overrides(topo, hadamard(),
                                          {0: pauli_x(), 4: pauli_x()})
    assert np.allclose(coins[0], pauli_x())
    assert np.allclose(coins[1], hadamard())
    assert np.allclose(coins[4], pauli_x())


def test_override_accepts_torus_coordinates():
    topo = Torus2D(3, 3)
    coins = CoinAssignment.from_overrides(topo, grover4(),
                                          {(1, 2): minus_identity4()})
    assert np.allclose(coins[(1, 2)], minus_identity4())
    assert np.allclose(coins[(0, 0)], grover4())


def test_non_unitary_coin_rejected():
    topo = Line(3)
    bad = np.array([[1.0, 0.0], [0.0, 0.5]], dtype=complex)
    with pytest.raises(ValueError, match="not unitary"):
        CoinAssignment.uniform(topo, bad)


def test_wrong_dimension_rejected():
    with pytest.raises(ValueError):
        CoinAssignment.uniform(Line(3), grover4())
    with pytest.raises(ValueError):
        CoinAssignment.uniform(Torus2D(2, 2), hadamard())


def test_blocks_are_read_only():
    coins = CoinAssignment.uniform(Line(3), hadamard())
    with pytest.raises(ValueError):
        coins.blocks[0, 0, 0] = 2.0
