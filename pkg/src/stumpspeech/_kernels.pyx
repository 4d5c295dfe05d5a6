# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for forest split search, tree traversal and Pegasos SGD.

Mirrors ``_kernels_py`` operation for operation; see that module for the
contracts.
"""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free, qsort
from libc.string cimport memset
from libc.math cimport INFINITY

cnp.import_array()

BACKEND = "cython"

ctypedef cnp.int64_t i64


cdef struct Entry:
    double v
    i64 c
    i64 w


cdef int _cmp_entry(const void* a, const void* b) noexcept nogil:
    cdef double x = (<Entry*>a).v
    cdef double y = (<Entry*>b).v
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


def node_features(const i64[::1] indptr, const i64[::1] indices,
                  const i64[::1] samples, i64 n_features):
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] seen = np.zeros(n_features, np.uint8)
    cdef i64 i, k, r, f, count = 0
    for i in range(samples.shape[0]):
        r = samples[i]
        for k in range(indptr[r], indptr[r + 1]):
            f = indices[k]
            if not seen[f]:
                seen[f] = 1
                count += 1
    out = np.empty(count, np.int64)
    cdef i64[::1] o = out
    k = 0
    for f in range(n_features):
        if seen[f]:
            o[k] = f
            k += 1
    return out


def best_split(const i64[::1] col_indptr, const i64[::1] col_indices,
               const double[::1] col_data, const i64[::1] y,
               const i64[::1] weight, const i64[::1] samples,
               const i64[::1] features, i64 n_classes, i64 min_leaf):
    cdef i64 n_total = y.shape[0]
    cdef i64 n_node = samples.shape[0]
    cdef i64 i, j, k, c, r, f, lo, hi, m, W = 0
    cdef i64 best_f = -1
    cdef double best_thr = 0.0, best_score = -INFINITY
    cdef double a, b, thr, score
    cdef i64 nL, nR, sL, sR, d

    cdef unsigned char* mark = <unsigned char*>malloc(n_total)
    cdef i64* tot = <i64*>malloc(n_classes * sizeof(i64))
    cdef i64* nz = <i64*>malloc(n_classes * sizeof(i64))
    cdef i64* cum = <i64*>malloc(n_classes * sizeof(i64))
    cdef i64 max_col = 0
    for i in range(features.shape[0]):
        f = features[i]
        if col_indptr[f + 1] - col_indptr[f] > max_col:
            max_col = col_indptr[f + 1] - col_indptr[f]
    cdef Entry* ent = <Entry*>malloc((max_col + n_classes) * sizeof(Entry))
    if mark == NULL or tot == NULL or nz == NULL or cum == NULL or ent == NULL:
        free(mark); free(tot); free(nz); free(cum); free(ent)
        raise MemoryError()

    with nogil:
        memset(mark, 0, n_total)
        memset(tot, 0, n_classes * sizeof(i64))
        for i in range(n_node):
            r = samples[i]
            mark[r] = 1
            tot[y[r]] += weight[r]
        for c in range(n_classes):
            W += tot[c]

        for i in range(features.shape[0]):
            f = features[i]
            lo = col_indptr[f]
            hi = col_indptr[f + 1]
            memset(nz, 0, n_classes * sizeof(i64))
            m = 0
            for k in range(lo, hi):
                r = col_indices[k]
                if mark[r]:
                    ent[m].v = col_data[k]
                    ent[m].c = y[r]
                    ent[m].w = weight[r]
                    nz[y[r]] += weight[r]
                    m += 1
            for c in range(n_classes):
                if tot[c] - nz[c] > 0:
                    ent[m].v = 0.0
                    ent[m].c = c
                    ent[m].w = tot[c] - nz[c]
                    m += 1
            qsort(ent, m, sizeof(Entry), _cmp_entry)

            memset(cum, 0, n_classes * sizeof(i64))
            nL = 0
            j = 0
            while j < m:
                # absorb every entry sharing this value
                a = ent[j].v
                while j < m and ent[j].v == a:
                    cum[ent[j].c] += ent[j].w
                    nL += ent[j].w
                    j += 1
                if j >= m:
                    break
                nR = W - nL
                if nL < min_leaf or nR < min_leaf:
                    continue
                sL = 0
                sR = 0
                for c in range(n_classes):
                    sL += cum[c] * cum[c]
                    d = tot[c] - cum[c]
                    sR += d * d
                score = (<double>sL) / (<double>nL) + (<double>sR) / (<double>nR)
                if score > best_score:
                    b = ent[j].v
                    thr = (a + b) / 2.0
                    if thr >= b:
                        thr = a
                    best_f = f
                    best_thr = thr
                    best_score = score

    free(mark); free(tot); free(nz); free(cum); free(ent)
    return best_f, best_thr, best_score


def apply_tree(const i64[::1] indptr, const i64[::1] indices,
               const double[::1] data, const i64[::1] feature,
               const double[::1] threshold, const i64[::1] left,
               const i64[::1] right):
    cdef i64 n = indptr.shape[0] - 1
    out = np.empty(n, np.int64)
    cdef i64[::1] o = out
    cdef i64 r, node, f, lo, hi, mid
    cdef double v
    with nogil:
        for r in range(n):
            node = 0
            while left[node] != -1:
                f = feature[node]
                # row indices are sorted: binary search for column f
                lo = indptr[r]
                hi = indptr[r + 1]
                v = 0.0
                while lo < hi:
                    mid = (lo + hi) // 2
                    if indices[mid] < f:
                        lo = mid + 1
                    else:
                        hi = mid
                if lo < indptr[r + 1] and indices[lo] == f:
                    v = data[lo]
                if v <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            o[r] = node
    return out


def pegasos(const i64[::1] indptr, const i64[::1] indices,
            const double[::1] data, const double[::1] y,
            const i64[:, ::1] order, double lam, i64 dim):
    cdef i64 n = y.shape[0]
    cdef i64 n_epochs = order.shape[0]
    v_arr = np.zeros(dim, np.float64)
    obj_arr = np.empty(n_epochs, np.float64)
    cdef double[::1] v = v_arr
    cdef double[::1] obj = obj_arr
    cdef double vb = 0.0, scale = 1.0, eta, dot, margin, shrink, coef, sq, hinge, mm
    cdef i64 t = 0, epoch, p, i, k, lo, hi, j

    with nogil:
        for epoch in range(n_epochs):
            for p in range(order.shape[1]):
                i = order[epoch, p]
                t += 1
                eta = 1.0 / (lam * t)
                lo = indptr[i]
                hi = indptr[i + 1]
                dot = 0.0
                for k in range(lo, hi):
                    dot += v[indices[k]] * data[k]
                margin = y[i] * (scale * (dot + vb))
                shrink = 1.0 - 1.0 / t
                if shrink == 0.0:
                    for j in range(dim):
                        v[j] = 0.0
                    vb = 0.0
                    scale = 1.0
                else:
                    scale *= shrink
                if margin < 1.0:
                    coef = eta * y[i] / scale
                    for k in range(lo, hi):
                        v[indices[k]] += coef * data[k]
                    vb += coef
                if scale < 1e-9:
                    for j in range(dim):
                        v[j] = v[j] * scale
                    vb *= scale
                    scale = 1.0
            sq = 0.0
            for j in range(dim):
                sq += v[j] * v[j]
            sq += vb * vb
            hinge = 0.0
            for i in range(n):
                dot = 0.0
                for k in range(indptr[i], indptr[i + 1]):
                    dot += v[indices[k]] * data[k]
                mm = 1.0 - y[i] * (scale * (dot + vb))
                if mm > 0.0:
                    hinge += mm
            obj[epoch] = lam / 2.0 * (scale * scale * sq) + hinge / n

        for j in range(dim):
            v[j] = scale * v[j]
    return v_arr, scale * vb, obj_arr
