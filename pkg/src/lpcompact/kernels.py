"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback is used.  Set ``LPCOMPACT_PURE=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if not os.environ.get("LPCOMPACT_PURE"):
    try:
        from . import _ckernels as _impl  # noqa: F811
    except ImportError:
        _impl = _pykernels
    else:
        BACKEND = "cython"

vector_norms = _impl.vector_norms
lp_rows = _impl.lp_rows
pairwise_lp = _impl.pairwise_lp
first_min_assign = _impl.first_min_assign
farthest_first = _impl.farthest_first
farthest_first_points = _impl.farthest_first_points

__all__ = [
    "BACKEND",
    "vector_norms",
    "lp_rows",
    "pairwise_lp",
    "first_min_assign",
    "farthest_first",
    "farthest_first_points",
]
