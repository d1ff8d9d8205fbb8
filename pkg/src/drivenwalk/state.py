"""Coherent amplitude states and their intensity readouts.

Each mode carries one complex coherent amplitude; the observable intensity
of a mode is the squared magnitude of its amplitude. Nothing here assumes a
fixed total walker number, so amplitudes grow and shrink freely under
driving.
"""

from dataclasses import dataclass, field

import numpy as np

from .lattice import Topology

__all__ = [
    "AmplitudeState",
    "intensity_by_mode",
    "intensity_by_vertex",
    "total_intensity",
]


@dataclass(frozen=True)
class AmplitudeState:
    """Complex amplitude per mode at integer time ``step``."""

    topology: Topology
    amplitudes: np.ndarray
    step: int = 0

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.topology.mode_count,):
            raise ValueError(
                f"state needs {self.topology.mode_count} amplitudes, "
                f"got shape {amps.shape}"
            )
        if self.step < 0:
            raise ValueError(f"step must be >= 0, got {self.step}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def vacuum(cls, topology: Topology) -> "AmplitudeState":
        return cls(topology, np.zeros(topology.mode_count, dtype=np.complex128))


def intensity_by_mode(state: AmplitudeState) -> np.ndarray:
    """Per-mode intensity |a_m|^2."""
    a = state.amplitudes
    return (a.real * a.real + a.imag * a.imag)


def intensity_by_vertex(state: AmplitudeState) -> np.ndarray:
    """Per-vertex intensity with the coin traced out.

    Entry v is the sum of |a|^2 over the coin modes of vertex v; the sum of
    the vector equals the total intensity of the state.
    """
    modes = intensity_by_mode(state)
    d = state.topology.coin_dim
    return modes.reshape(state.topology.vertex_count, d).sum(axis=1)


def total_intensity(state: AmplitudeState) -> float:
    return float(intensity_by_mode(state).sum())
