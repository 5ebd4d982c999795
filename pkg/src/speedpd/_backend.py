"""Select the compiled kernel when available, else the pure-Python one.

Set ``SPEEDPD_PURE=1`` to force the fallback.
"""

import os

from . import _kernel_py

if os.environ.get("SPEEDPD_PURE"):
    kernel = _kernel_py
else:
    try:
        from . import _kernel as kernel
    except ImportError:  # extension not built
        kernel = _kernel_py

NAME = "cython" if kernel is not _kernel_py else "python"


def get(name: str | None = None):
    """Return the kernel module called ``name`` ("cython" or "python")."""
    if name is None:
        return kernel
    if name == "python":
        return _kernel_py
    if name == "cython":
        from . import _kernel

        return _kernel
    raise ValueError(f"unknown backend {name!r}")
