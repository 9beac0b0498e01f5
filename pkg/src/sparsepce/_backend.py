"""Kernel backend selection.

The compiled extension is used when it imports; set ``SPARSEPCE_BACKEND=python``
to force the numpy fallback.
"""

import os

from . import _kernels_py

try:
    from . import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None


def available_backends():
    names = ["python"]
    if _kernels_c is not None:
        names.insert(0, "cython")
    return names


def get_backend(name=None):
    """Return the kernel module called ``name`` (default: env var, then best available)."""
    if name is None:
        name = os.environ.get("SPARSEPCE_BACKEND", "auto")
    if name == "auto":
        return _kernels_c if _kernels_c is not None else _kernels_py
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _kernels_c is None:
            raise ImportError("the compiled sparsepce._kernels extension is not built")
        return _kernels_c
    raise ValueError(f"unknown kernel backend {name!r}")


kernels = get_backend()
BACKEND = "cython" if kernels is _kernels_c else "python"
