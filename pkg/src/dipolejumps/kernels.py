"""Selection of the trajectory stepping kernel.

The compiled Cython extension is preferred; the numpy reference kernel is
the fallback.  Override with DIPOLEJUMPS_BACKEND=python|compiled or by
passing backend= to the trajectory functions.
"""
from __future__ import annotations

import os

from . import _core_py

try:
    from . import _core
except ImportError:  # extension not built; fall back to the numpy kernel
    _core = None

HAVE_COMPILED = _core is not None
BACKEND_NAMES = ("compiled", "python")


def get_backend(name: str | None = None):
    """Return (module, label).  name in {None, 'auto', 'compiled', 'python'}."""
    if name is None:
        name = os.environ.get("DIPOLEJUMPS_BACKEND", "auto")
    name = name.lower()
    if name in ("auto", ""):
        return (_core, "compiled") if HAVE_COMPILED else (_core_py, "python")
    if name == "python":
        return _core_py, "python"
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernel requested but dipolejumps._core "
                               "is not importable; build the extension or use "
                               "DIPOLEJUMPS_BACKEND=python")
        return _core, "compiled"
    raise ValueError(f"unknown backend {name!r}")


def active_backend_name() -> str:
    return get_backend()[1]
