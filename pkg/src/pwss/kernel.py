"""Kernel selection: compiled int64 row reduction with pure-Python fallback.

The compiled kernel covers the common case (small integer entries); it
raises OverflowError on anything that could leave int64, and the call is
re-run on the arbitrary-precision kernel. Set ``PWSS_PURE=1`` to force the
pure path (the benchmark uses this to compare both).
"""

import os

from . import _kernel_py

try:
    from . import _speedups
except ImportError:  # extension not built
    _speedups = None

HAVE_SPEEDUPS = _speedups is not None and not os.environ.get("PWSS_PURE")


def rref_int(rows, ncols):
    """Exact RREF of an integer matrix; see pwss._kernel_py.rref_int."""
    if HAVE_SPEEDUPS:
        try:
            return _speedups.rref_int(rows, ncols)
        except OverflowError:
            pass
    return _kernel_py.rref_int(rows, ncols)


def active_kernel():
    return "compiled" if HAVE_SPEEDUPS else "pure-python"
