"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise, or when
``STUMPSPEECH_PURE_PYTHON=1`` is set, the numpy twin is used.  Both
produce bit-identical results.
"""

import os

import numpy as np
import scipy.sparse as sp

from . import _kernels_py

try:
    if os.environ.get("STUMPSPEECH_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_impl = _compiled if _compiled is not None else _kernels_py
BACKEND = _impl.BACKEND


def get_backend(name=None):
    """Return the kernel module called ``name`` ("cython" or "python")."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")


def _i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def csr_arrays(X):
    X = sp.csr_matrix(X)
    if not X.has_sorted_indices:
        X = X.sorted_indices()
    return _i64(X.indptr), _i64(X.indices), _f64(X.data)


def node_features(X_csr_arrays, samples, n_features, backend=None):
    indptr, indices, _ = X_csr_arrays
    return get_backend(backend).node_features(indptr, indices, _i64(samples), int(n_features))


def best_split(X_csc_arrays, y, weight, samples, features, n_classes, min_leaf=1, backend=None):
    indptr, indices, data = X_csc_arrays
    return get_backend(backend).best_split(
        indptr, indices, data, _i64(y), _i64(weight), _i64(samples), _i64(features),
        int(n_classes), int(min_leaf))


def apply_tree(X_csr_arrays, feature, threshold, left, right, backend=None):
    indptr, indices, data = X_csr_arrays
    return get_backend(backend).apply_tree(
        indptr, indices, data, _i64(feature), _f64(threshold), _i64(left), _i64(right))


def pegasos(X_csr_arrays, y, order, lam, dim, backend=None):
    indptr, indices, data = X_csr_arrays
    return get_backend(backend).pegasos(
        indptr, indices, data, _f64(y), _i64(np.atleast_2d(order)), float(lam), int(dim))
