"""Backend selection for the hot kernels.

The compiled extension is used when it has been built; otherwise the numpy
implementation is loaded. Set ``PHANTOMRTS_PURE=1`` to force the fallback.
"""
import os

import numpy as np

from phantomrts import _core_py

if os.environ.get("PHANTOMRTS_PURE") == "1":
    _impl = _core_py
else:
    try:
        from phantomrts import _core as _impl
    except ImportError:
        _impl = _core_py

BACKEND = "compiled" if _impl is not _core_py else "python"
KIND_LE, KIND_GE, KIND_EQ = 0, 1, 2


def linear_errors(cand, coef, rhs, kind):
    return _impl.linear_errors(
        np.ascontiguousarray(cand, dtype=np.int64),
        np.ascontiguousarray(coef, dtype=np.float64),
        np.ascontiguousarray(rhs, dtype=np.float64),
        np.ascontiguousarray(kind, dtype=np.int32),
    )


def upp_rdu(assign, counters, samples, weights):
    return _impl.upp_rdu(
        np.ascontiguousarray(assign, dtype=np.int64),
        np.ascontiguousarray(counters, dtype=np.float64).ravel(),
        np.ascontiguousarray(samples, dtype=np.float64),
        np.ascontiguousarray(weights, dtype=np.float64),
    )


def distance_field(passable, sources):
    src = np.asarray(sources, dtype=np.int64).reshape(-1, 2)
    return _impl.distance_field(np.ascontiguousarray(passable, dtype=np.uint8), np.ascontiguousarray(src))
