"""Softmax logistic regression and one-vs-rest Pegasos SVM."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .. import kernels
from .base import Dataset, TrainedModel, class_index, register, require_nonempty


@dataclass(frozen=True)
class LogisticConfig:
    learning_rate: float = 0.1
    l2: float = 1e-4
    epochs: int = 200
    seed: int = 42  # zero init and full batches: training is seed-free

    def __post_init__(self):
        if not self.learning_rate > 0 or not self.epochs > 0 or not self.l2 >= 0:
            raise ValueError("learning_rate and epochs must be positive, l2 non-negative")


@dataclass(frozen=True)
class SVMConfig:
    lam: float = 1e-4
    epochs: int = 20
    seed: int = 42

    def __post_init__(self):
        if not self.lam > 0 or not self.epochs > 0:
            raise ValueError("lam and epochs must be positive")


@register
class LinearModel(TrainedModel):
    kind = "linear"

    def __init__(self, classes, dim, weights, bias):
        super().__init__(classes, dim)
        self.weights = np.asarray(weights, dtype=np.float64).reshape(len(self.classes), dim)
        self.bias = np.asarray(bias, dtype=np.float64)
        self.history: np.ndarray | None = None

    def decision_function(self, X) -> np.ndarray:
        X = self._check(X)
        return np.asarray(X @ self.weights.T) + self.bias

    def params(self) -> dict:
        return {"weights": self.weights.tolist(), "bias": self.bias.tolist()}

    @classmethod
    def from_params(cls, classes, dim, params):
        return cls(classes, dim, params["weights"], params["bias"])


@register
class LogisticModel(LinearModel):
    kind = "logistic"


@register
class SVMModel(LinearModel):
    kind = "svm_ovr"


def _softmax(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def logistic_loss_grad(W, b, X, Y, l2):
    """Mean softmax cross-entropy + (l2/2)||W||^2 and its gradient.

    ``Y`` is the one-hot label matrix; the bias is not penalized.
    """
    n = X.shape[0]
    Z = np.asarray(X @ W.T) + b
    Zs = Z - Z.max(axis=1, keepdims=True)
    logP = Zs - np.log(np.exp(Zs).sum(axis=1, keepdims=True))
    loss = -(Y * logP).sum() / n + 0.5 * l2 * float((W * W).sum())
    G = np.exp(logP) - Y
    gW = np.asarray(X.T @ G).T / n + l2 * W
    gb = G.sum(axis=0) / n
    return loss, gW, gb


def _two_classes(data: Dataset):
    require_nonempty(data)
    classes, yi = class_index(data.y)
    if len(classes) < 2:
        raise ValueError(f"need at least 2 classes, got only {classes.tolist()}")
    return classes, yi


def train_logistic(data: Dataset, config: LogisticConfig = LogisticConfig()) -> LogisticModel:
    """Full-batch gradient descent from zero weights."""
    classes, yi = _two_classes(data)
    n, K = len(data), len(classes)
    Y = np.zeros((n, K))
    Y[np.arange(n), yi] = 1.0
    W = np.zeros((K, data.dim))
    b = np.zeros(K)
    history = []
    for _ in range(config.epochs):
        loss, gW, gb = logistic_loss_grad(W, b, data.X, Y, config.l2)
        history.append(loss)
        W -= config.learning_rate * gW
        b -= config.learning_rate * gb
    history.append(logistic_loss_grad(W, b, data.X, Y, config.l2)[0])
    model = LogisticModel(classes, data.dim, W, b)
    model.history = np.array(history)
    return model


def hinge_objective(w, b, X, y, lam) -> float:
    """(lam/2)(||w||^2 + b^2) + mean hinge loss for labels y in {-1, +1}."""
    margins = y * (np.asarray(X @ w).ravel() + b)
    return lam / 2 * (float(w @ w) + b * b) + float(np.maximum(0.0, 1.0 - margins).mean())


def train_svm(data: Dataset, config: SVMConfig = SVMConfig(), backend=None) -> SVMModel:
    """One binary Pegasos model per class; every class sees the same sample order."""
    classes, yi = _two_classes(data)
    n, K = len(data), len(classes)
    rng = np.random.default_rng(config.seed)
    order = np.stack([rng.permutation(n) for _ in range(config.epochs)])
    arrays = kernels.csr_arrays(data.X)
    W = np.zeros((K, data.dim))
    b = np.zeros(K)
    objectives = np.zeros((K, config.epochs))
    for k in range(K):
        y = np.where(yi == k, 1.0, -1.0)
        W[k], b[k], objectives[k] = kernels.pegasos(arrays, y, order, config.lam, data.dim, backend)
    model = SVMModel(classes, data.dim, W, b)
    model.history = objectives
    return model
