# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled driven-evolution kernel.

Same contract as drivenwalk._pykernels.run_driven; one fused pass per step
(inject, coin blocks, permute, record) with no temporaries beyond two work
vectors.
"""

from libc.math cimport cos, sin, sqrt

import numpy as np

BACKEND_NAME = "native"


def run_driven(const double complex[:, :, ::1] blocks,
               const long long[::1] dest,
               const double complex[::1] base,
               double phi,
               Py_ssize_t steps,
               explicit,
               double complex[::1] state,
               double[:, ::1] mode_out,
               amps_out,
               const long long[::1] watch):
    cdef Py_ssize_t v_count = blocks.shape[0]
    cdef Py_ssize_t d = blocks.shape[1]
    cdef Py_ssize_t n = v_count * d
    cdef Py_ssize_t k, v, i, j, m, base_m
    cdef double wrap_max = 0.0, mag, re, im
    cdef double complex acc, phase

    cdef const double complex[:, ::1] explicit_mv = None
    cdef double complex[:, ::1] amps_mv = None
    if explicit is not None:
        explicit_mv = explicit
    if amps_out is not None:
        amps_mv = amps_out

    pre_arr = np.empty(n, dtype=np.complex128)
    nxt_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] pre = pre_arr
    cdef double complex[::1] nxt = nxt_arr

    for k in range(1, steps + 1):
        # inject
        if explicit_mv is not None:
            for m in range(n):
                pre[m] = state[m] + explicit_mv[k - 1, m]
        else:
            phase = cos(phi * k) + 1j * sin(phi * k)
            for m in range(n):
                pre[m] = state[m] + base[m] * phase
        # coin blocks, written back into pre vertex by vertex
        for v in range(v_count):
            base_m = v * d
            for i in range(d):
                acc = 0
                for j in range(d):
                    acc = acc + blocks[v, i, j] * pre[base_m + j]
                nxt[base_m + i] = acc
        # boundary watch happens before the shift
        for m in range(watch.shape[0]):
            re = nxt[watch[m]].real
            im = nxt[watch[m]].imag
            mag = sqrt(re * re + im * im)
            if mag > wrap_max:
                wrap_max = mag
        # shift: scatter nxt through dest back into state
        for m in range(n):
            state[dest[m]] = nxt[m]
        for m in range(n):
            re = state[m].real
            im = state[m].imag
            mode_out[k - 1, m] = re * re + im * im
        if amps_mv is not None:
            for m in range(n):
                amps_mv[k - 1, m] = state[m]
    return wrap_max
