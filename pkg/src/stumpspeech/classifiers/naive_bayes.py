"""Multinomial Naive Bayes over (possibly fractional) term weights."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .base import Dataset, TrainedModel, class_index, register, require_nonempty


@dataclass(frozen=True)
class NBConfig:
    alpha: float = 1.0
    seed: int = 42  # unused; every config carries one

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha!r}")


@register
class NBModel(TrainedModel):
    kind = "naive_bayes"

    def __init__(self, classes, dim, log_prior, log_likelihood, alpha):
        super().__init__(classes, dim)
        self.log_prior = np.asarray(log_prior, dtype=np.float64)
        self.log_likelihood = np.asarray(log_likelihood, dtype=np.float64).reshape(len(self.classes), dim)
        self.alpha = float(alpha)

    def decision_function(self, X) -> np.ndarray:
        """Log-joint ln P(c) + sum_j x_j ln P(j|c) per class."""
        X = self._check(X)
        return np.asarray(X @ self.log_likelihood.T) + self.log_prior

    def params(self) -> dict:
        return {"alpha": self.alpha, "log_prior": self.log_prior.tolist(),
                "log_likelihood": self.log_likelihood.tolist()}

    @classmethod
    def from_params(cls, classes, dim, params):
        return cls(classes, dim, params["log_prior"], params["log_likelihood"], params["alpha"])


def train_naive_bayes(data: Dataset, config: NBConfig = NBConfig()) -> NBModel:
    require_nonempty(data)
    classes, yi = class_index(data.y)
    n, K = len(data), len(classes)
    onehot = sp.csr_matrix((np.ones(n), (np.arange(n), yi)), shape=(n, K))
    mass = np.asarray((onehot.T @ data.X).todense())  # K x dim feature totals
    prior = np.bincount(yi, minlength=K) / n
    num = mass + config.alpha
    den = mass.sum(axis=1, keepdims=True) + config.alpha * data.dim
    with np.errstate(divide="ignore"):
        log_lik = np.log(num) - np.log(den)
    return NBModel(classes, data.dim, np.log(prior), log_lik, config.alpha)
