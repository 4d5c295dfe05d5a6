"""Pure-Python/numpy kernels.

Reference twin of ``_kernels.pyx``: every function performs the same
floating-point operations in the same order, so both backends produce
bit-identical models.  All array arguments arrive already converted to
contiguous int64/float64 by ``stumpspeech.kernels``.
"""

import numpy as np

BACKEND = "python"


def node_features(indptr, indices, samples, n_features):
    """Sorted distinct feature indices with a stored value in any of ``samples``."""
    if samples.size == 0:
        return np.empty(0, np.int64)
    parts = [indices[indptr[r]:indptr[r + 1]] for r in samples.tolist()]
    return np.unique(np.concatenate(parts)).astype(np.int64)


def best_split(col_indptr, col_indices, col_data, y, weight, samples, features,
               n_classes, min_leaf):
    """Best (feature, threshold, score) over ``features`` for one tree node.

    ``score`` is sum_c L_c**2 / n_L + sum_c R_c**2 / n_R over weighted class
    counts; maximizing it minimizes the weighted Gini impurity of the
    children.  Returns feature -1 when no admissible split exists.
    """
    n_total = y.shape[0]
    mark = np.zeros(n_total, dtype=bool)
    mark[samples] = True
    tot = np.zeros(n_classes, np.int64)
    np.add.at(tot, y[samples], weight[samples])
    W = int(tot.sum())

    best_f, best_thr, best_score = -1, 0.0, -np.inf
    for f in features.tolist():
        lo, hi = col_indptr[f], col_indptr[f + 1]
        rows = col_indices[lo:hi]
        keep = mark[rows]
        rows = rows[keep]
        vals = col_data[lo:hi][keep]
        cls = y[rows]
        wt = weight[rows]
        nz = np.zeros(n_classes, np.int64)
        np.add.at(nz, cls, wt)
        zero = tot - nz
        zc = np.flatnonzero(zero)
        vals = np.concatenate([vals, np.zeros(zc.size)])
        cls = np.concatenate([cls, zc])
        wt = np.concatenate([wt, zero[zc]])
        uniq, inv = np.unique(vals, return_inverse=True)
        if uniq.size < 2:
            continue
        hist = np.zeros((uniq.size, n_classes), np.int64)
        np.add.at(hist, (inv, cls), wt)
        cum = np.cumsum(hist, axis=0)[:-1]
        nL = cum.sum(axis=1)
        nR = W - nL
        ok = (nL >= min_leaf) & (nR >= min_leaf)
        if not ok.any():
            continue
        sL = (cum * cum).sum(axis=1)
        rest = tot - cum
        sR = (rest * rest).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            score = sL.astype(np.float64) / nL.astype(np.float64) \
                + sR.astype(np.float64) / nR.astype(np.float64)
        score[~ok] = -np.inf
        k = int(np.argmax(score))
        if score[k] > best_score:
            a, b = float(uniq[k]), float(uniq[k + 1])
            thr = (a + b) / 2.0
            if thr >= b:
                thr = a
            best_f, best_thr, best_score = f, thr, float(score[k])
    return best_f, best_thr, best_score


def apply_tree(indptr, indices, data, feature, threshold, left, right):
    feature = feature.tolist()
    threshold = threshold.tolist()
    left = left.tolist()
    right = right.tolist()
    out = np.empty(indptr.shape[0] - 1, np.int64)
    for r in range(out.shape[0]):
        lo, hi = indptr[r], indptr[r + 1]
        row = dict(zip(indices[lo:hi].tolist(), data[lo:hi].tolist()))
        node = 0
        while left[node] != -1:
            if row.get(feature[node], 0.0) <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[r] = node
    return out


def pegasos(indptr, indices, data, y, order, lam, dim):
    """Binary hinge-loss SGD with step 1/(lam*t); bias is an augmented weight.

    The weight vector is stored as ``scale * v`` so the per-step shrink is
    O(1).  Returns (w, b, objective after each epoch).
    """
    indptr = indptr.tolist()
    indices = indices.tolist()
    data = data.tolist()
    y = y.tolist()
    n = len(y)
    v = [0.0] * dim
    vb = 0.0
    scale = 1.0
    t = 0
    objectives = []
    for epoch in range(order.shape[0]):
        for i in order[epoch].tolist():
            t += 1
            eta = 1.0 / (lam * t)
            lo, hi = indptr[i], indptr[i + 1]
            dot = 0.0
            for k in range(lo, hi):
                dot += v[indices[k]] * data[k]
            margin = y[i] * (scale * (dot + vb))
            shrink = 1.0 - 1.0 / t
            if shrink == 0.0:
                v = [0.0] * dim
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
                v = [x * scale for x in v]
                vb *= scale
                scale = 1.0
        sq = 0.0
        for x in v:
            sq += x * x
        sq += vb * vb
        hinge = 0.0
        for i in range(n):
            dot = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                dot += v[indices[k]] * data[k]
            m = 1.0 - y[i] * (scale * (dot + vb))
            if m > 0.0:
                hinge += m
        objectives.append(lam / 2.0 * (scale * scale * sq) + hinge / n)
    w = np.array([scale * x for x in v], dtype=np.float64)
    return w, scale * vb, np.array(objectives, dtype=np.float64)
