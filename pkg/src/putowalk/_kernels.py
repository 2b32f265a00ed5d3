"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise (or when
``PUTOWALK_PURE_PYTHON`` is set to a non-empty value other than ``0``) the
numpy fallback is used.  ``BACKEND`` names the active one.
"""

import os

from . import _pykernels

_force_python = os.environ.get("PUTOWALK_PURE_PYTHON", "") not in ("", "0")

_impl = _pykernels
if not _force_python:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.NAME
apply_stage = _impl.apply_stage
extreme_singular_values = _impl.extreme_singular_values


def available_backends():
    """Map of backend name to kernel module, for tests and benchmarks."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found


def num_threads():
    """Worker count for grid scans, from ``PUTOWALK_NUM_THREADS`` (default 1)."""
    raw = os.environ.get("PUTOWALK_NUM_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"PUTOWALK_NUM_THREADS must be an integer, got {raw!r}")
    return max(1, n)
