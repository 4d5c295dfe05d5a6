"""Stratified splits, P/R/F1 reports and the classifier x n-gram grid."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import classifiers
from .classifiers import ALGORITHMS, Dataset
from .corpus import Corpus
from .features import NgramConfig, fit_tfidf
from .normalize import normalize


@dataclass(frozen=True)
class Split:
    train: np.ndarray
    test: np.ndarray
    seed: int
    test_fraction: float
    singleton_classes: tuple[int, ...] = ()


def stratified_split(corpus: Corpus | Sequence[int], test_fraction: float = 0.2,
                     seed: int = 42) -> Split:
    """Per-class shuffle, then the first round(fraction * n_c) go to test.

    Classes with a single member stay entirely in train.
    """
    labels = corpus.labels if isinstance(corpus, Corpus) else np.asarray(corpus, dtype=np.int64)
    if len(labels) == 0:
        raise ValueError("cannot split an empty corpus")
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must lie in (0, 1), got {test_fraction!r}")
    rng = np.random.default_rng(seed)
    train, test, singletons = [], [], []
    for c in np.unique(labels):
        members = np.flatnonzero(labels == c)
        if members.size == 1:
            singletons.append(int(c))
            train.append(members)
            continue
        members = rng.permutation(members)
        n_test = min(int(math.floor(test_fraction * members.size + 0.5)), members.size - 1)
        test.append(members[:n_test])
        train.append(members[n_test:])
    cat = lambda parts: np.sort(np.concatenate(parts)) if parts else np.empty(0, np.int64)
    return Split(cat(train), cat(test), seed, test_fraction, tuple(singletons))


@dataclass(frozen=True)
class ConfusionMatrix:
    classes: tuple[int, ...]
    counts: np.ndarray  # rows: true class, columns: predicted class

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def confusion_matrix(y_true, y_pred, classes: Iterable[int] | None = None) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if classes is None:
        classes = np.union1d(y_true, y_pred)
    classes = tuple(int(c) for c in classes)
    pos = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(y_true.tolist(), y_pred.tolist()):
        counts[pos[t], pos[p]] += 1
    return ConfusionMatrix(classes, counts)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvaluationReport:
    confusion: ConfusionMatrix
    per_class: Mapping[int, ClassMetrics]
    weighted: tuple[float, float, float]
    macro: tuple[float, float, float]
    accuracy: float
    # (class, metric) pairs where a denominator was zero and 0 was reported
    zero_division_flags: tuple[tuple[int, str], ...] = ()


def _ratio(num: int, den: int) -> tuple[float, bool]:
    return (num / den, False) if den else (0.0, True)


def evaluate(y_true, y_pred, classes: Iterable[int] | None = None) -> EvaluationReport:
    if len(y_true) != len(y_pred):
        raise ValueError(f"length mismatch: {len(y_true)} != {len(y_pred)}")
    if len(y_true) == 0:
        raise ValueError("cannot evaluate empty predictions")
    cm = confusion_matrix(y_true, y_pred, classes)
    C = cm.counts
    per_class, flags = {}, []
    for i, c in enumerate(cm.classes):
        tp = int(C[i, i])
        predicted, support = int(C[:, i].sum()), int(C[i, :].sum())
        p, fp = _ratio(tp, predicted)
        r, fr = _ratio(tp, support)
        if p + r > 0:
            f = 2 * p * r / (p + r)
            ff = False
        else:
            f, ff = 0.0, True
        flags += [(c, m) for m, hit in (("precision", fp), ("recall", fr), ("f1", ff)) if hit]
        per_class[c] = ClassMetrics(p, r, f, support)
    total = sum(m.support for m in per_class.values())
    weighted = tuple(
        sum(getattr(m, k) * m.support for m in per_class.values()) / total
        for k in ("precision", "recall", "f1"))
    macro = tuple(
        sum(getattr(m, k) for m in per_class.values()) / len(per_class)
        for k in ("precision", "recall", "f1"))
    accuracy = float(np.trace(C)) / cm.total
    return EvaluationReport(cm, per_class, weighted, macro, accuracy, tuple(flags))


def format_report(report: EvaluationReport) -> str:
    lines = [f"{'class':>6}{'precision':>11}{'recall':>9}{'f1':>9}{'support':>9}"]
    for c, m in report.per_class.items():
        lines.append(f"{c:>6}{m.precision:>11.4f}{m.recall:>9.4f}{m.f1:>9.4f}{m.support:>9}")
    p, r, f = report.weighted
    lines.append(f"{'wavg':>6}{p:>11.4f}{r:>9.4f}{f:>9.4f}{report.confusion.total:>9}")
    return "\n".join(lines) + "\n"


# -- experiment grid -------------------------------------------------------------

@dataclass(frozen=True)
class GridCell:
    algorithm: str
    order: int
    precision: float
    recall: float
    f1: float
    seconds: float
    report: EvaluationReport | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class GridResult:
    rows: tuple[GridCell, ...]

    def cell(self, algorithm: str, order: int) -> GridCell:
        for r in self.rows:
            if r.algorithm == algorithm and r.order == order:
                return r
        raise KeyError((algorithm, order))

    def to_csv(self, timing: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["algorithm", "order", "precision", "recall", "f1", "seconds"])
        for r in self.rows:
            w.writerow([r.algorithm, r.order, f"{r.precision:.6f}", f"{r.recall:.6f}",
                        f"{r.f1:.6f}", f"{r.seconds:.3f}" if timing else ""])
        return buf.getvalue()

    def to_table(self) -> str:
        """Rows = algorithms, column groups N=1..4 with P R F each."""
        algos = list(dict.fromkeys(r.algorithm for r in self.rows))
        orders = sorted({r.order for r in self.rows})
        name_w = max([len(_DISPLAY.get(a, a)) for a in algos] + [10]) + 2
        head = " " * name_w + "".join(f"{f'N={n}':^21}" for n in orders)
        sub = " " * name_w + "".join(f"{'P':>7}{'R':>7}{'F':>7}" for _ in orders)
        lines = [head.rstrip(), sub]
        for a in algos:
            cells = []
            for n in orders:
                try:
                    r = self.cell(a, n)
                    cells.append(f"{r.precision:>7.2f}{r.recall:>7.2f}{r.f1:>7.2f}")
                except KeyError:
                    cells.append(f"{'-':>7}{'-':>7}{'-':>7}")
            lines.append(f"{_DISPLAY.get(a, a):<{name_w}}" + "".join(cells))
        return "\n".join(lines) + "\n"


_DISPLAY = {"forest": "Random Forest", "naive_bayes": "Naive Bayes", "svm": "SVM",
            "logistic": "Logistic Regression"}


def _config_with_seed(algorithm: str, configs: Mapping | None, seed: int):
    base = (configs or {}).get(algorithm) or classifiers.CONFIGS[algorithm]()
    return replace(base, seed=seed)


def run_experiment_grid(corpus: Corpus, orders: Sequence[int] = (1, 2, 3, 4),
                        algorithms: Sequence[str] = ALGORITHMS, test_fraction: float = 0.2,
                        seed: int = 42, configs: Mapping | None = None,
                        cleaned: Sequence[str] | None = None) -> GridResult:
    """Evaluate every (algorithm, order) pair on one stratified split.

    Cell i (in algorithm-major order) trains with seed ``seed + i``.  The
    vectorizer of each cell is fitted on the training texts only.
    """
    for a in algorithms:
        if a not in classifiers.TRAINERS:
            raise ValueError(f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}")
    for n in orders:
        NgramConfig(n)  # validates
    if not algorithms or not orders:
        return GridResult(())
    split = stratified_split(corpus, test_fraction, seed)
    texts = list(cleaned) if cleaned is not None else [normalize(t) for t in corpus.texts]
    y = corpus.labels
    train_texts = [texts[i] for i in split.train]
    test_texts = [texts[i] for i in split.test]
    rows = []
    cell_index = 0
    for a in algorithms:
        for n in orders:
            start = time.perf_counter()
            vec = fit_tfidf(train_texts, NgramConfig(n))
            data = Dataset(vec.transform_many(train_texts), y[split.train], vec.dim)
            model = classifiers.train(a, data, _config_with_seed(a, configs, seed + cell_index))
            pred = model.predict(vec.transform_many(test_texts))
            elapsed = time.perf_counter() - start
            report = evaluate(y[split.test], pred)
            rows.append(GridCell(a, n, *report.weighted, elapsed, report))
            cell_index += 1
    return GridResult(tuple(rows))
