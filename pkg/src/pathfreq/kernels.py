"""Picks the compiled sweeps when the extension is built, else the pure-Python ones."""

from __future__ import annotations

import os

from . import _kernels_py

try:
    if os.environ.get("PATHFREQ_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

COMPILED = _compiled is not None
BACKEND = "cython" if COMPILED else "python"


def make_sweeper(adj_ptr, adj, color, value, ncolors, evaluate=None, prefer_compiled=True):
    """Sweeper over the undirected tree; non-additive scores always use the Python version."""
    if COMPILED and prefer_compiled and evaluate is None:
        return _compiled.Sweeper(adj_ptr, adj, color, value, ncolors)
    return _kernels_py.Sweeper(adj_ptr, adj, color, value, ncolors, evaluate=evaluate)
