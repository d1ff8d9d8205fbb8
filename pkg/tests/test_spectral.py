import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from drivenwalk import CoinAssignment, EigenDecomposition, InjectionSchedule, \
    Line, UndefinedGapError, analytic_displacement_amplitude, \
    analytic_mode_intensity, eigendecompose, from_eigenbasis, hadamard, \
    injection_vector, make_walk_operator, matched_injection_phase, \
    matched_mode_index, mismatch_profile, mode_index, run_driven_walk, \
    spectral_gap, subspace_projection, to_eigenbasis, wrap_phase

from conftest import random_coins, random_instance


def toy_decomposition(frequencies):
    n = len(frequencies)
    return EigenDecomposition(frequencies=np.array(frequencies, dtype=float),
                              transform=np.eye(n, dtype=complex))


# ---------------------------------------------------------------------------
# phase wrapping

def test_wrap_phase_half_open_interval():
    assert wrap_phase(np.pi) == np.pi
    assert wrap_phase(-np.pi) == np.pi
    assert wrap_phase(3 * np.pi) == np.pi
    assert wrap_phase(0.0) == 0.0
    assert wrap_phase(2 * np.pi + 0.5) == pytest.approx(0.5, abs=1e-12)
    arr = wrap_phase(np.array([-np.pi, np.pi, 4.0]))
    assert arr[0] == np.pi and arr[1] == np.pi
    assert arr[2] == pytest.approx(4.0 - 2 * np.pi, abs=1e-12)


@given(st.floats(min_value=-50.0, max_value=50.0),
       st.integers(min_value=-5, max_value=5))
def test_wrap_phase_periodic_and_in_range(x, k):
    w = wrap_phase(x)
    assert -np.pi < w <= np.pi
    assert wrap_phase(x + 2 * np.pi * k) == pytest.approx(w, abs=1e-9)


# ---------------------------------------------------------------------------
# decomposition

def test_identity_decomposition():
    decomp = eigendecompose(np.eye(6, dtype=complex))
    assert np.array_equal(decomp.frequencies, np.zeros(6))
    t = decomp.transform
    assert np.allclose(t @ t.conj().T, np.eye(6), atol=1e-12)


def test_diagonal_phases():
    decomp = eigendecompose(np.diag([1j, -1j]))
    assert np.allclose(decomp.frequencies, [-np.pi / 2, np.pi / 2])


def test_line5_spectrum(line5):
    _, _, op = line5
    decomp = eigendecompose(op)
    assert decomp.size == 10
    assert np.all(np.diff(decomp.frequencies) >= 0)  # sorted ascending
    base = injection_vector(Line(5, "hard"), 2, {"R": 1.0})
    couplings = np.abs(decomp.transform @ base)
    j = matched_mode_index(decomp, base)
    assert couplings[j] > 0.1


def test_reconstruction_of_random_instances():
    rng = np.random.default_rng(21)
    for _ in range(5):
        topology, coins, flip_flop = random_instance(rng, max_line=7, max_torus=3)
        op = make_walk_operator(topology, coins, flip_flop)
        decomp = eigendecompose(op)
        assert np.abs(decomp.reconstruct() - op.dense()).max() <= 1e-8
        t = decomp.transform
        assert np.abs(t @ t.conj().T - np.eye(decomp.size)).max() <= 1e-9


def test_identity_coin_ring_has_circulant_spectrum():
    """Identity coins turn the ring walk into two independent cyclic shifts,
    whose spectra are the n-th roots of unity; eigenvectors are plane waves
    with uniform vertex weight."""
    n = 6
    topo = Line(n)
    coins = CoinAssignment.uniform(topo, np.eye(2, dtype=complex))
    op = make_walk_operator(topo, coins)
    decomp = eigendecompose(op)

    expected = np.sort(np.concatenate([
        wrap_phase(2 * np.pi * np.arange(n) / n),
        wrap_phase(-2 * np.pi * np.arange(n) / n),
    ]))
    assert np.allclose(np.sort(decomp.frequencies), expected, atol=1e-9)

    for j in range(decomp.size):
        vec = decomp.eigenvector(j)
        weights = (np.abs(vec) ** 2).reshape(n, 2).sum(axis=1)
        assert np.allclose(weights, np.full(n, 1.0 / n), atol=1e-9)


def test_eigenvectors_satisfy_eigenvalue_equation(line5):
    _, _, op = line5
    decomp = eigendecompose(op)
    u = op.dense()
    for j in (0, 4, 9):
        v = decomp.eigenvector(j)
        assert np.allclose(u @ v, np.exp(1j * decomp.frequencies[j]) * v,
                           atol=1e-10)


# ---------------------------------------------------------------------------
# basis transforms

def test_to_eigenbasis_zero(line5):
    _, _, op = line5
    decomp = eigendecompose(op)
    assert np.array_equal(to_eigenbasis(np.zeros(10, dtype=complex), decomp),
                          np.zeros(10))


def test_basis_vector_roundtrip(line5):
    _, _, op = line5
    decomp = eigendecompose(op)
    e3 = np.zeros(10, dtype=complex)
    e3[3] = 1.0
    column = decomp.transform.conj().T @ e3
    assert np.allclose(to_eigenbasis(column, decomp), e3, atol=1e-12)
    assert np.allclose(from_eigenbasis(e3, decomp), column, atol=1e-12)


@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
@settings(max_examples=25, deadline=None)
def test_transform_preserves_norm(seed):
    rng = np.random.default_rng(seed)
    topo = Line(4)
    op = make_walk_operator(topo, random_coins(rng, topo))
    decomp = eigendecompose(op)
    a = rng.normal(size=8) + 1j * rng.normal(size=8)
    b = to_eigenbasis(a, decomp)
    total = np.sum(np.abs(a) ** 2)
    assert abs(np.sum(np.abs(b) ** 2) - total) <= 1e-12 * total


# ---------------------------------------------------------------------------
# mismatch profiles

def test_mismatch_zero_when_phase_equals_frequency(line5):
    _, _, op = line5
    decomp = eigendecompose(op)
    base = injection_vector(Line(5, "hard"), 2, {"R": 1.0})
    prof = mismatch_profile(decomp, float(decomp.frequencies[0]), base)
    assert prof.deltas[0] == 0.0


def test_mismatch_wraps_full_turns(line5):
    _, _, op = line5
    decomp = eigendecompose(op)
    base = injection_vector(Line(5, "hard"), 2, {"R": 1.0})
    prof = mismatch_profile(decomp, float(decomp.frequencies[0]) + 2 * np.pi, base)
    assert abs(prof.deltas[0]) <= 1e-12
    assert np.all(np.abs(prof.deltas) <= np.pi)


def test_couplings_are_transform_column(line5):
    _, _, op = line5
    decomp = eigendecompose(op)
    topo = Line(5, "hard")
    base = injection_vector(topo, 2, {"R": 1.0})
    prof = mismatch_profile(decomp, 0.0, base)
    idx = mode_index(topo, "R", 2)
    assert np.allclose(prof.couplings, decomp.transform[:, idx], atol=1e-15)


# ---------------------------------------------------------------------------
# closed forms

def test_matched_intensity_is_quadratic():
    assert analytic_mode_intensity(0.1, 0.0, 10) == pytest.approx(1.0, rel=1e-14)


def test_pi_mismatch_alternates():
    values = [analytic_mode_intensity(1.0, np.pi, t) for t in range(1, 5)]
    assert values == pytest.approx([1.0, 0.0, 1.0, 0.0], abs=1e-12)


def test_no_injection_no_intensity():
    for delta in (0.0, 0.3, np.pi):
        assert analytic_mode_intensity(0.7, delta, 0) == 0.0


def test_intensity_continuous_across_branch_switch():
    eps = 1e-9  # branch threshold
    for t in (10, 1000, 10000):
        below = analytic_mode_intensity(1.0, eps * 0.999, t)
        above = analytic_mode_intensity(1.0, eps * 1.001, t)
        assert above == pytest.approx(below, rel=1e-9)


def test_displacement_matched_limit():
    amp, phase = analytic_displacement_amplitude(0.3, 0.0, 5)
    assert amp == pytest.approx(1.5, rel=1e-14)
    assert phase == 0.0


def test_displacement_cancels_at_pi():
    amp, _ = analytic_displacement_amplitude(1.0, np.pi, 2)
    assert abs(amp) <= 1e-15


def test_displacement_global_phase_matches_double_sum():
    rng = np.random.default_rng(8)
    for _ in range(20):
        delta = float(rng.uniform(-np.pi, np.pi))
        alpha = complex(rng.normal(), rng.normal())
        t = int(rng.integers(2, 40))
        _, phase = analytic_displacement_amplitude(alpha, delta, t)
        brute = abs(alpha) ** 2 * sum(
            np.sin(k * delta) for n in range(1, t) for k in range(1, n + 1))
        assert phase == pytest.approx(brute, abs=1e-10)


def test_displacement_amplitude_squares_to_intensity():
    rng = np.random.default_rng(17)
    for _ in range(300):
        alpha = complex(rng.normal(), rng.normal())
        delta = float(rng.uniform(-np.pi, np.pi))
        t = int(rng.integers(0, 200))
        amp, _ = analytic_displacement_amplitude(alpha, delta, t)
        intensity = analytic_mode_intensity(alpha, delta, t)
        assert abs(abs(amp) ** 2 - intensity) <= 1e-10 * max(1.0, intensity)


# ---------------------------------------------------------------------------
# spectral gap

def test_gap_simple():
    decomp = toy_decomposition([0.0, np.pi / 2, -np.pi / 2])
    assert spectral_gap(decomp, 0.0) == pytest.approx(np.pi / 2)


def test_gap_excludes_reference_multiplet():
    decomp = toy_decomposition([0.0, 0.0, np.pi])
    assert spectral_gap(decomp, 0.0) == pytest.approx(np.pi)


def test_gap_uses_wrapped_distance():
    decomp = toy_decomposition([3.0, 0.0])
    assert spectral_gap(decomp, -3.0) == pytest.approx(2 * np.pi - 6.0)


def test_gap_undefined_when_all_equal():
    decomp = toy_decomposition([0.5, 0.5])
    with pytest.raises(UndefinedGapError):
        spectral_gap(decomp, 0.5)


# ---------------------------------------------------------------------------
# simulated dynamics against the closed forms

def run_eigen_record(op, decomp, base, phi, steps):
    sched = InjectionSchedule.phased(base, phi, steps)
    return run_driven_walk(op, sched, eigen=decomp)


def test_matched_mode_grows_linearly_in_amplitude(line5):
    topo, _, op = line5
    decomp = eigendecompose(op)
    base = injection_vector(Line(5, "hard"), 2, {"R": 1.0}, amplitude=0.1)
    j = matched_mode_index(decomp, base)
    phi = matched_injection_phase(decomp, j)
    record = run_eigen_record(op, decomp, base, phi, 80)
    beta = abs((decomp.transform @ base)[j])
    for t in (1, 10, 40, 80):
        assert np.sqrt(record.eigenmode_intensity[t - 1, j]) == pytest.approx(
            t * beta, rel=1e-10)


def test_mismatched_modes_respect_bound(line5):
    topo, _, op = line5
    decomp = eigendecompose(op)
    base = injection_vector(Line(5, "hard"), 2, {"R": 1.0}, amplitude=0.1)
    phi = -np.pi / 2  # not an eigenfrequency of this operator
    record = run_eigen_record(op, decomp, base, phi, 200)
    prof = mismatch_profile(decomp, phi, base)
    bounds = np.abs(prof.couplings) ** 2 / np.sin(prof.deltas / 2.0) ** 2
    assert np.all(record.eigenmode_intensity <= bounds[None, :] + 1e-12)


def test_parseval_at_every_step(line5):
    topo, _, op = line5
    decomp = eigendecompose(op)
    base = injection_vector(Line(5, "hard"), 2, {"R": 1.0})
    record = run_eigen_record(op, decomp, base, 0.37, 50)
    total_modes = record.mode_intensity.sum(axis=1)
    total_eigen = record.eigenmode_intensity.sum(axis=1)
    assert np.allclose(total_eigen, total_modes, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("seed", range(4))
def test_oracle_equivalence_random_instances(seed):
    rng = np.random.default_rng(700 + seed)
    n = int(rng.integers(2, 7))
    topo = Line(n)
    op = make_walk_operator(topo, random_coins(rng, topo))
    decomp = eigendecompose(op)
    base = rng.normal(size=2 * n) + 1j * rng.normal(size=2 * n)
    base /= np.linalg.norm(base)
    phi = float(rng.uniform(-np.pi, np.pi))
    steps = 100
    record = run_eigen_record(op, decomp, base, phi, steps)
    prof = mismatch_profile(decomp, phi, base)
    t_axis = np.arange(1, steps + 1)
    for j in range(decomp.size):
        predicted = analytic_mode_intensity(prof.couplings[j], prof.deltas[j],
                                            t_axis)
        assert np.abs(record.eigenmode_intensity[:, j] - predicted).max() <= 1e-8


# ---------------------------------------------------------------------------
# degenerate subspaces

def test_subspace_projection_is_basis_independent():
    """Compare against an independent eigensolver route on an operator with
    a degenerate spectrum (identity-coin ring)."""
    n = 6
    topo = Line(n)
    coins = CoinAssignment.uniform(topo, np.eye(2, dtype=complex))
    op = make_walk_operator(topo, coins)
    decomp = eigendecompose(op)

    rng = np.random.default_rng(3)
    vector = rng.normal(size=2 * n) + 1j * rng.normal(size=2 * n)

    reference = 1.0  # project onto the eigenvalue-1 eigenspace
    idx = np.flatnonzero(np.abs(wrap_phase(decomp.frequencies)) <= 1e-9)
    ours = subspace_projection(decomp, idx, vector)

    values, vectors = np.linalg.eig(op.dense())
    close = np.flatnonzero(np.abs(values - reference) <= 1e-9)
    q, _ = np.linalg.qr(vectors[:, close])  # orthonormalize the raw basis
    theirs = q @ (q.conj().T @ vector)

    assert np.allclose(ours, theirs, atol=1e-9)


def test_matched_mode_index_breaks_ties_deterministically(line5):
    topo, _, op = line5
    decomp = eigendecompose(op)
    base = injection_vector(Line(5, "hard"), 2, {"R": 1.0})
    j = matched_mode_index(decomp, base)
    strength = np.abs(decomp.transform @ base)
    # several couplings tie at the top by symmetry; the lowest index wins
    tied = np.flatnonzero(strength >= (1 - 1e-9) * strength.max())
    assert j == tied[0]
    assert len(tied) == 4
    assert j == 1  # frequency sorted ascending, second lowest is best coupled
