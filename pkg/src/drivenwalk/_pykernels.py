"""Pure NumPy driven-evolution kernel.

Reference implementation of the hot loop; semantics identical to the
compiled module ``drivenwalk._native``. One step computes

    a <- P . (C . (a + alpha_k)),    alpha_k = base * exp(i phi k)

with C the block-diagonal coin (one (d, d) block per vertex) and P the shift
permutation, scattering mode m to mode dest[m].
"""

import numpy as np

BACKEND_NAME = "python"


def run_driven(blocks, dest, base, phi, steps, explicit, state, mode_out, amps_out, watch):
    """Advance ``state`` in place by ``steps`` driven steps.

    Per-step mode intensities are written to ``mode_out`` (steps, N); raw
    amplitudes go to ``amps_out`` when it is not None. ``watch`` lists mode
    indices whose post-coin amplitude is monitored (wrap-around detection on
    hard-boundary lines); the maximum magnitude seen there is returned.
    """
    v_count, d, _ = blocks.shape
    src = np.argsort(dest)  # gather form of the scatter permutation
    wrap_max = 0.0
    a = state
    for k in range(1, steps + 1):
        if explicit is not None:
            alpha = explicit[k - 1]
        else:
            alpha = base * complex(np.cos(phi * k), np.sin(phi * k))
        coined = np.einsum(
            "vij,vj->vi", blocks, (a + alpha).reshape(v_count, d)
        ).ravel()
        if watch.size:
            leak = np.abs(coined[watch]).max()
            if leak > wrap_max:
                wrap_max = float(leak)
        a = coined[src]
        np.multiply(a.real, a.real, out=mode_out[k - 1])
        mode_out[k - 1] += a.imag * a.imag
        if amps_out is not None:
            amps_out[k - 1] = a
    state[:] = a
    return wrap_max
