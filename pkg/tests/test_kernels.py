"""The compiled and numpy kernels must agree bit for bit."""

import numpy as np
import pytest
import scipy.sparse as sp

from stumpspeech import kernels
from stumpspeech.classifiers import Dataset, ForestConfig, SVMConfig, dumps_model, train_forest, train_svm

from conftest import available_backends

needs_both = pytest.mark.skipif(len(available_backends()) < 2, reason="compiled kernels not built")


def random_problem(rng, n=40, dim=12, n_classes=3, density=0.3):
    X = sp.random(n, dim, density=density, format="csr", random_state=rng,
                  data_rvs=lambda k: rng.choice([0.25, 0.5, 0.5, 1.0], size=k))
    y = rng.integers(0, n_classes, n)
    return X, y


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.get_backend("python").BACKEND == "python"
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_node_features(rng, backend):
    X, _ = random_problem(rng)
    arrs = kernels.csr_arrays(X)
    samples = np.array([0, 3, 5, 9])
    got = kernels.node_features(arrs, samples, X.shape[1], backend=backend)
    expected = np.unique(X[samples].indices)
    assert got.tolist() == expected.tolist()
    assert kernels.node_features(arrs, np.empty(0, np.int64), X.shape[1], backend=backend).size == 0


def _brute_best_split(X, y, weight, samples, features, n_classes, min_leaf):
    dense = X.toarray()
    best = (-1, 0.0, -np.inf)
    for f in features:
        vals = np.unique(dense[samples, f])
        for a, b in zip(vals[:-1], vals[1:]):
            thr = (a + b) / 2.0
            left = [s for s in samples if dense[s, f] <= thr]
            right = [s for s in samples if dense[s, f] > thr]
            cl = np.bincount(y[left], weights=weight[left], minlength=n_classes).astype(np.int64)
            cr = np.bincount(y[right], weights=weight[right], minlength=n_classes).astype(np.int64)
            if cl.sum() < min_leaf or cr.sum() < min_leaf:
                continue
            score = (cl * cl).sum() / cl.sum() + (cr * cr).sum() / cr.sum()
            if score > best[2]:
                best = (f, thr, score)
    return best


@pytest.mark.parametrize("seed", range(10))
def test_best_split_matches_brute_force(seed, backend):
    rng = np.random.default_rng(seed)
    X, y = random_problem(rng)
    weight = np.bincount(rng.integers(0, X.shape[0], X.shape[0]), minlength=X.shape[0])
    samples = np.flatnonzero(weight)
    features = np.arange(X.shape[1])
    csc = kernels.csr_arrays(X.T.tocsr())  # CSC of X == CSR of X.T
    f, thr, score = kernels.best_split(csc, y, weight, samples, features, 3, 1, backend=backend)
    bf, bthr, bscore = _brute_best_split(X, y, weight, samples, features, 3, 1)
    assert f == bf
    assert thr == bthr
    assert score == pytest.approx(bscore, rel=1e-12)


@needs_both
@pytest.mark.parametrize("seed", range(20))
def test_best_split_backends_identical(seed):
    rng = np.random.default_rng(seed)
    X, y = random_problem(rng, n=60, dim=20, n_classes=4, density=0.2)
    weight = np.bincount(rng.integers(0, 60, 60), minlength=60)
    samples = np.flatnonzero(weight)
    features = rng.choice(20, size=6, replace=False)
    csc = kernels.csr_arrays(X.T.tocsr())
    for min_leaf in (1, 3):
        a = kernels.best_split(csc, y, weight, samples, features, 4, min_leaf, backend="python")
        b = kernels.best_split(csc, y, weight, samples, features, 4, min_leaf, backend="cython")
        assert a == b


@needs_both
def test_apply_tree_backends_identical(rng):
    X, _ = random_problem(rng, n=50)
    # root splits on feature 2, its right child on feature 5
    feature = np.array([2, -1, 5, -1, -1])
    threshold = np.array([0.3, 0.0, 0.6, 0.0, 0.0])
    left = np.array([1, -1, 3, -1, -1])
    right = np.array([2, -1, 4, -1, -1])
    arrs = kernels.csr_arrays(X)
    a = kernels.apply_tree(arrs, feature, threshold, left, right, backend="python")
    b = kernels.apply_tree(arrs, feature, threshold, left, right, backend="cython")
    assert a.tolist() == b.tolist()
    dense = X.toarray()
    expected = [1 if r[2] <= 0.3 else (3 if r[5] <= 0.6 else 4) for r in dense]
    assert a.tolist() == expected


@needs_both
@pytest.mark.parametrize("lam", [1e-4, 1e-2, 1.0])
def test_pegasos_backends_identical(rng, lam):
    X, y = random_problem(rng, n=30, dim=10, n_classes=2)
    ys = np.where(y == 0, -1.0, 1.0)
    order = np.stack([rng.permutation(30) for _ in range(5)])
    arrs = kernels.csr_arrays(X)
    wa, ba, oa = kernels.pegasos(arrs, ys, order, lam, 10, backend="python")
    wb, bb, ob = kernels.pegasos(arrs, ys, order, lam, 10, backend="cython")
    assert wa.tobytes() == wb.tobytes()
    assert ba == bb
    assert oa.tobytes() == ob.tobytes()


@needs_both
def test_full_models_identical_across_backends(corpus, cleaned):
    from stumpspeech.features import fit_tfidf
    idx = np.arange(0, len(cleaned), 6)  # a 1,010-tweet slice keeps this quick
    texts = [cleaned[i] for i in idx]
    vec = fit_tfidf(texts)
    data = Dataset(vec.transform_many(texts), corpus.labels[idx], vec.dim)
    fc = ForestConfig(n_trees=5)
    assert dumps_model(train_forest(data, fc, backend="python")) == \
        dumps_model(train_forest(data, fc, backend="cython"))
    sc = SVMConfig(epochs=3)
    assert dumps_model(train_svm(data, sc, backend="python")) == \
        dumps_model(train_svm(data, sc, backend="cython"))
