"""Kernel backend selection.

The compiled extension is used when it imports; set ``QFLIMIT_PURE=1`` to
force the numpy fallback.  ``BACKEND`` names the active one.
"""
import os

from . import _kernels_py

_compiled = None
if os.environ.get("QFLIMIT_PURE") != "1":
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

if _compiled is not None:
    edge_quadratic = _compiled.edge_quadratic
    codegree_sums = _compiled.codegree_sums
    BACKEND = "cython"
else:
    edge_quadratic = _kernels_py.edge_quadratic
    codegree_sums = _kernels_py.codegree_sums
    BACKEND = "python"


def backends():
    """Map of available backend name to ``(edge_quadratic, codegree_sums)``."""
    out = {"python": (_kernels_py.edge_quadratic, _kernels_py.codegree_sums)}
    if _compiled is not None:
        out["cython"] = (_compiled.edge_quadratic, _compiled.codegree_sums)
    return out
