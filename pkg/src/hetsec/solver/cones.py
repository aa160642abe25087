"""Backend selection for the cone kernels.

The compiled extension is used when it imports; set ``HETSEC_PURE_PYTHON=1``
to force the NumPy fallback.
"""

from __future__ import annotations

import os

from . import _cones_py

BACKEND = "python"
kernels = _cones_py

if os.environ.get("HETSEC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _cones_cy
    except ImportError:  # extension not built
        pass
    else:
        kernels = _cones_cy
        BACKEND = "cython"


def get_kernels(backend: str | None = None):
    """Return the kernel module for ``backend`` ('python', 'cython' or None for default)."""
    if backend is None:
        return kernels
    if backend == "python":
        return _cones_py
    if backend == "cython":
        from . import _cones_cy
        return _cones_cy
    raise ValueError(f"unknown backend {backend!r}")
