"""Time the compiled and pure-Python kernels on the bundled corpus.

    python benchmarks/bench_kernels.py [--trees N] [--repeat R]

Trains a forest and a one-vs-rest SVM with each backend, checks the
serialized models are byte-identical and reports the best-of-R wall time.
"""

import argparse
import sys
import time

from stumpspeech import kernels
from stumpspeech.classifiers import Dataset, ForestConfig, SVMConfig, dumps_model, train_forest, train_svm
from stumpspeech.corpus import bundled_corpus
from stumpspeech.features import fit_tfidf
from stumpspeech.normalize import normalize


def best_of(repeat, fn):
    best, result = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trees", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    try:
        kernels.get_backend("cython")
    except ImportError:
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1

    corpus = bundled_corpus()
    texts = [normalize(t) for t in corpus.texts]
    vec = fit_tfidf(texts)
    data = Dataset(vec.transform_many(texts), corpus.labels, vec.dim)
    print(f"{len(data)} documents, {vec.dim} features")

    jobs = {
        f"forest ({args.trees} trees)": lambda b: train_forest(data, ForestConfig(n_trees=args.trees), backend=b),
        "svm (20 epochs x 8 classes)": lambda b: train_svm(data, SVMConfig(), backend=b),
    }
    print(f"{'kernel':<28}{'python s':>10}{'cython s':>10}{'speedup':>9}  identical")
    for name, job in jobs.items():
        t_py, m_py = best_of(args.repeat, lambda: job("python"))
        t_cy, m_cy = best_of(args.repeat, lambda: job("cython"))
        same = dumps_model(m_py) == dumps_model(m_cy)
        print(f"{name:<28}{t_py:>10.3f}{t_cy:>10.3f}{t_py / t_cy:>8.1f}x  {'yes' if same else 'NO'}")
        if not same:
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
