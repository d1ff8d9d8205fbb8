import numpy as np
import pytest
from hypothesis import given, strategies as st

from drivenwalk import AmplitudeState, Line, Torus2D, intensity_by_mode, \
    intensity_by_vertex, mode_index, total_intensity


def test_vacuum_has_zero_intensity():
    state = AmplitudeState.vacuum(Line(5))
    assert np.array_equal(intensity_by_vertex(state), np.zeros(5))
    assert total_intensity(state) == 0.0


def test_single_mode_intensity():
    topo = Line(5)
    a = np.zeros(10, dtype=complex)
    a[mode_index(topo, "R", 2)] = 2.0
    state = AmplitudeState(topo, a)
    assert np.allclose(intensity_by_vertex(state), [0, 0, 4, 0, 0])


def test_coin_trace_adds_intensities():
    topo = Line(5)
    a = np.zeros(10, dtype=complex)
    a[mode_index(topo, "R", 1)] = 1.0
    a[mode_index(topo, "L", 1)] = 1j
    state = AmplitudeState(topo, a)
    vertex = intensity_by_vertex(state)
    assert vertex[1] == pytest.approx(2.0, abs=1e-15)
    assert vertex.sum() == pytest.approx(2.0, abs=1e-15)


@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_vertex_trace_preserves_total_intensity(seed):
    rng = np.random.default_rng(seed)
    topo = Torus2D(3, 4)
    a = rng.normal(size=topo.mode_count) + 1j * rng.normal(size=topo.mode_count)
    state = AmplitudeState(topo, a)
    total = intensity_by_mode(state).sum()
    assert abs(intensity_by_vertex(state).sum() - total) <= 1e-12 * max(1.0, total)


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        AmplitudeState(Line(5), np.zeros(9, dtype=complex))


def test_negative_step_rejected():
    with pytest.raises(ValueError):
        AmplitudeState(Line(5), np.zeros(10, dtype=complex), step=-1)
