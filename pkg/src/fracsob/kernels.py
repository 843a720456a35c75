"""Backend selection for the BFS kernels.

The compiled extension is used when it imports; otherwise the pure-Python
versions are used. Set ``FRACSOB_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKENDS = {"python": _kernels_py}

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None
else:
    BACKENDS["cython"] = _ckernels

if _ckernels is not None and os.environ.get("FRACSOB_PURE_PYTHON", "") in ("", "0"):
    BACKEND = "cython"
else:
    BACKEND = "python"

_impl = BACKENDS[BACKEND]
bfs_distances = _impl.bfs_distances
ball_sums = _impl.ball_sums
pair_distance_sum = _impl.pair_distance_sum
