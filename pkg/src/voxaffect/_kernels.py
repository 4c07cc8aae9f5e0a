"""Kernel backend selection.

The compiled extension is preferred; set ``VOXAFFECT_PURE_PYTHON=1`` to force
the numpy fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"

if os.environ.get("VOXAFFECT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _kernels_py
    else:
        BACKEND = "cython"
else:
    _impl = _kernels_py

nccf = _impl.nccf
moving_rms = _impl.moving_rms

__all__ = ["BACKEND", "nccf", "moving_rms"]
