"""Both kernel backends against a plain matrix-product reference."""

import numpy as np
import pytest

from drivenwalk import _pykernels
from drivenwalk.engine import step_permutation, wrap_watch_modes
from drivenwalk.kernels import available_backends

from conftest import random_instance

try:
    from drivenwalk import _native
except ImportError:
    _native = None

BACKENDS = {"python": _pykernels}
if _native is not None:
    BACKENDS["native"] = _native

backend = pytest.mark.parametrize("impl", list(BACKENDS.values()),
                                  ids=list(BACKENDS.keys()))


def reference_run(operator, base, phi, steps, explicit):
    """Dense matmul recursion, independent of the kernel code path."""
    u = operator.dense()
    a = np.zeros(u.shape[0], dtype=np.complex128)
    history = []
    for k in range(1, steps + 1):
        alpha = explicit[k - 1] if explicit is not None \
            else base * np.exp(1j * phi * k)
        a = u @ (a + alpha)
        history.append(a.copy())
    return np.array(history).reshape(steps, u.shape[0])


def kernel_run(impl, operator, base, phi, steps, explicit):
    n = base.shape[0]
    state = np.zeros(n, dtype=np.complex128)
    mode_out = np.zeros((steps, n))
    amps_out = np.zeros((steps, n), dtype=np.complex128)
    watch = wrap_watch_modes(operator.topology)
    wrap = impl.run_driven(operator.blocks, operator.dest, base, phi, steps,
                           explicit, state, mode_out, amps_out, watch)
    return state, mode_out, amps_out, wrap


@backend
@pytest.mark.parametrize("seed", range(6))
def test_kernel_matches_dense_recursion(impl, seed):
    from drivenwalk import make_walk_operator

    rng = np.random.default_rng(100 + seed)
    topology, coins, flip_flop = random_instance(rng, max_line=6, max_torus=3)
    operator = make_walk_operator(topology, coins, flip_flop)
    n = topology.mode_count
    base = rng.normal(size=n) + 1j * rng.normal(size=n)
    phi = float(rng.uniform(-np.pi, np.pi))
    steps = 40

    expected = reference_run(operator, base, phi, steps, None)
    state, mode_out, amps_out, _ = kernel_run(impl, operator, base, phi, steps, None)

    assert np.allclose(amps_out, expected, atol=1e-11)
    assert np.allclose(state, expected[-1], atol=1e-11)
    assert np.allclose(mode_out, np.abs(expected) ** 2, atol=1e-10)


@backend
def test_kernel_explicit_override(impl):
    from drivenwalk import make_walk_operator

    rng = np.random.default_rng(7)
    topology, coins, _ = random_instance(rng, allow_torus=False)
    operator = make_walk_operator(topology, coins)
    n = topology.mode_count
    steps = 12
    explicit = np.ascontiguousarray(
        rng.normal(size=(steps, n)) + 1j * rng.normal(size=(steps, n)))
    base = np.zeros(n, dtype=np.complex128)

    expected = reference_run(operator, base, 0.0, steps, explicit)
    state, _, amps_out, _ = kernel_run(impl, operator, base, 0.0, steps, explicit)
    assert np.allclose(amps_out, expected, atol=1e-12)


@pytest.mark.skipif(_native is None, reason="compiled kernel not built")
def test_backends_agree():
    from drivenwalk import make_walk_operator

    rng = np.random.default_rng(42)
    topology, coins, flip_flop = random_instance(rng, max_torus=4)
    operator = make_walk_operator(topology, coins, flip_flop)
    n = topology.mode_count
    base = rng.normal(size=n) + 1j * rng.normal(size=n)

    out = {}
    for name, impl in BACKENDS.items():
        out[name] = kernel_run(impl, operator, base, 0.77, 60, None)
    assert np.allclose(out["python"][0], out["native"][0], atol=1e-12)
    assert np.allclose(out["python"][1], out["native"][1], atol=1e-11)


@backend
def test_wrap_watch_reports_seam_amplitude(impl):
    """Hadamard end coins leak through the seam; swap end coins do not."""
    from drivenwalk import CoinAssignment, Line, hadamard, make_walk_operator, pauli_x

    topology = Line(4, "hard")
    base = np.zeros(8, dtype=np.complex128)
    base[2 * 2 + 0] = 1.0  # (R, x=2), one hop from the right end

    reflecting = CoinAssignment.from_overrides(
        topology, hadamard(), {0: pauli_x(), 3: pauli_x()})
    op = make_walk_operator(topology, reflecting)
    _, _, _, wrap = kernel_run(impl, op, base, 0.0, 10, None)
    assert wrap == 0.0

    leaky = CoinAssignment.uniform(topology, hadamard())
    op = make_walk_operator(topology, leaky)
    _, _, _, wrap = kernel_run(impl, op, base, 0.0, 10, None)
    assert wrap > 0.1


def test_registered_backends():
    names = available_backends()
    assert "python" in names
    assert set(BACKENDS) == set(names)
