"""Backend selection for the driven-evolution kernel.

The compiled module is preferred when it imported cleanly; otherwise the
NumPy implementation takes over. Set DRIVENWALK_BACKEND=python (or native)
to force a choice, e.g. when benchmarking.
"""

import os

from . import _pykernels

try:
    from . import _native
except ImportError:
    _native = None

_forced = os.environ.get("DRIVENWALK_BACKEND", "").strip().lower()
if _forced == "python":
    _impl = _pykernels
elif _forced == "native":
    if _native is None:
        raise ImportError(
            "DRIVENWALK_BACKEND=native but the compiled kernel is not built"
        )
    _impl = _native
elif _forced:
    raise ImportError(f"unknown DRIVENWALK_BACKEND value {_forced!r}")
else:
    _impl = _native if _native is not None else _pykernels

BACKEND = _impl.BACKEND_NAME
run_driven = _impl.run_driven


def available_backends():
    """Names of the kernel implementations importable in this environment."""
    names = ["python"]
    if _native is not None:
        names.append("native")
    return names
