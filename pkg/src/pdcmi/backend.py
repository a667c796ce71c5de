"""Kernel backend selection.

Imports the compiled kernels when the extension built, otherwise the
pure-Python twins. Set PDCMI_PURE_PYTHON=1 to force the fallback (used by
the parity tests and the benchmark).
"""

import os

from . import _kernels_py

if os.environ.get("PDCMI_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND

mvar_simulate = _impl.mvar_simulate
burg_recursion = _impl.burg_recursion
smo_solve = _impl.smo_solve


def available_backends():
    """Names of the importable kernel implementations."""
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names
