"""Random forest of Gini-split trees on bootstrap samples."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .. import kernels
from .base import Dataset, TrainedModel, class_index, register, require_nonempty


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int = 20
    max_features: int | None = None  # None: ceil(sqrt(dim))
    min_leaf: int = 1
    seed: int = 42
    n_jobs: int = 1

    def __post_init__(self):
        for name in ("n_trees", "max_depth", "min_leaf", "n_jobs"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_features is not None and not self.max_features > 0:
            raise ValueError("max_features must be positive")


def gini(counts) -> float:
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - (p * p).sum())


@dataclass
class Tree:
    """Flat binary tree; ``left[i] == -1`` marks a leaf.

    ``value[i]`` is the bootstrap-weighted class histogram reaching node i.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.left)

    def depth(self) -> int:
        best, stack = 0, [(0, 0)]
        while stack:
            node, d = stack.pop()
            best = max(best, d)
            if self.left[node] != -1:
                stack += [(self.left[node], d + 1), (self.right[node], d + 1)]
        return best

    def to_dict(self) -> dict:
        return {"feature": self.feature.tolist(), "threshold": self.threshold.tolist(),
                "left": self.left.tolist(), "right": self.right.tolist(),
                "value": self.value.tolist()}

    @classmethod
    def from_dict(cls, d) -> "Tree":
        return cls(np.array(d["feature"], np.int64), np.array(d["threshold"], np.float64),
                   np.array(d["left"], np.int64), np.array(d["right"], np.int64),
                   np.array(d["value"], np.int64))


class _TreeBuilder:
    def __init__(self, X: sp.csr_matrix, yi, n_classes, config: ForestConfig, backend):
        self.csr = kernels.csr_arrays(X)
        self.csc = kernels.csr_arrays(sp.csr_matrix(X.T))  # columns as rows
        self.yi = yi
        self.n, self.dim = X.shape
        self.K = n_classes
        self.mtry = config.max_features or math.ceil(math.sqrt(self.dim))
        self.config = config
        self.backend = backend

    def build(self, seed: int) -> Tree:
        rng = np.random.default_rng(seed)
        weight = np.bincount(rng.integers(0, self.n, self.n), minlength=self.n).astype(np.int64)
        self._nodes = {"feature": [], "threshold": [], "left": [], "right": [], "value": []}
        self._rng = rng
        self._weight = weight
        self._grow(np.flatnonzero(weight), 0)
        nodes, self._nodes = self._nodes, None
        return Tree(np.array(nodes["feature"], np.int64), np.array(nodes["threshold"], np.float64),
                    np.array(nodes["left"], np.int64), np.array(nodes["right"], np.int64),
                    np.array(nodes["value"], np.int64).reshape(-1, self.K))

    def _new_node(self, hist) -> int:
        nodes = self._nodes
        for key, val in (("feature", -1), ("threshold", 0.0), ("left", -1), ("right", -1)):
            nodes[key].append(val)
        nodes["value"].append(hist)
        return len(nodes["left"]) - 1

    def _grow(self, samples: np.ndarray, depth: int) -> int:
        cfg = self.config
        hist = np.bincount(self.yi[samples], weights=self._weight[samples],
                           minlength=self.K).astype(np.int64)
        node = self._new_node(hist)
        if depth >= cfg.max_depth or np.count_nonzero(hist) <= 1 or hist.sum() < 2 * cfg.min_leaf:
            return node
        cands = kernels.node_features(self.csr, samples, self.dim, self.backend)
        if cands.size == 0:
            return node
        if cands.size > self.mtry:
            cands = self._rng.choice(cands, self.mtry, replace=False)
        f, thr, _ = kernels.best_split(self.csc, self.yi, self._weight, samples, cands,
                                       self.K, cfg.min_leaf, self.backend)
        if f < 0:
            return node
        vals = self._column_values(f, samples)
        go_left = vals <= thr
        self._nodes["feature"][node] = int(f)
        self._nodes["threshold"][node] = float(thr)
        self._nodes["left"][node] = self._grow(samples[go_left], depth + 1)
        self._nodes["right"][node] = self._grow(samples[~go_left], depth + 1)
        return node

    def _column_values(self, f, samples):
        indptr, indices, data = self.csc
        rows = indices[indptr[f]:indptr[f + 1]]
        vals = np.zeros(samples.size)
        pos = np.searchsorted(samples, rows)
        hit = pos < samples.size
        hit[hit] = samples[pos[hit]] == rows[hit]
        vals[pos[hit]] = data[indptr[f]:indptr[f + 1]][hit]
        return vals


@register
class ForestModel(TrainedModel):
    kind = "forest"

    def __init__(self, classes, dim, trees, config: ForestConfig):
        super().__init__(classes, dim)
        self.trees = list(trees)
        self.config = config

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def tree_votes(self, X, backend=None) -> np.ndarray:
        """(n_samples, n_trees) class positions voted by each tree."""
        arrays = kernels.csr_arrays(self._check(X))
        out = np.empty((arrays[0].size - 1, len(self.trees)), np.int64)
        for t, tree in enumerate(self.trees):
            leaves = kernels.apply_tree(arrays, tree.feature, tree.threshold,
                                        tree.left, tree.right, backend)
            out[:, t] = np.argmax(tree.value, axis=1)[leaves]
        return out

    def decision_function(self, X) -> np.ndarray:
        """Vote counts per class."""
        votes = self.tree_votes(X)
        scores = np.zeros((votes.shape[0], len(self.classes)))
        for t in range(votes.shape[1]):
            np.add.at(scores, (np.arange(votes.shape[0]), votes[:, t]), 1.0)
        return scores

    def params(self) -> dict:
        c = self.config
        return {"n_trees": c.n_trees, "max_depth": c.max_depth, "max_features": c.max_features,
                "min_leaf": c.min_leaf, "seed": c.seed,
                "trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_params(cls, classes, dim, params):
        config = ForestConfig(n_trees=params["n_trees"], max_depth=params["max_depth"],
                              max_features=params["max_features"], min_leaf=params["min_leaf"],
                              seed=params["seed"])
        return cls(classes, dim, [Tree.from_dict(t) for t in params["trees"]], config)


def train_forest(data: Dataset, config: ForestConfig = ForestConfig(), backend=None) -> ForestModel:
    """Tree i is grown from its own generator seeded with ``seed + i``, so the
    forest does not depend on ``n_jobs`` or thread scheduling."""
    require_nonempty(data)
    classes, yi = class_index(data.y)
    builder = _TreeBuilder(data.X, yi, len(classes), config, backend)
    seeds = [config.seed + i for i in range(config.n_trees)]
    if config.n_jobs > 1:
        with ThreadPoolExecutor(config.n_jobs) as pool:
            trees = list(pool.map(lambda s: _build_isolated(builder, s), seeds))
    else:
        trees = [builder.build(s) for s in seeds]
    return ForestModel(classes, data.dim, trees, config)


def _build_isolated(builder: _TreeBuilder, seed: int) -> Tree:
    # builders keep per-tree state on self; give each thread its own shallow copy
    clone = object.__new__(_TreeBuilder)
    clone.__dict__.update(builder.__dict__)
    return clone.build(seed)
