from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..corpus import SentimentClass
from ..features import DocumentVector

FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    """Unreadable, truncated or wrong-version model file."""


class KindMismatchError(ModelFormatError):
    pass


class DimensionMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Dataset:
    X: sp.csr_matrix
    y: np.ndarray
    dim: int

    def __post_init__(self):
        if self.X.shape[0] != len(self.y):
            raise ValueError(f"{self.X.shape[0]} vectors but {len(self.y)} labels")
        if self.X.shape[1] != self.dim:
            raise ValueError(f"vectors have {self.X.shape[1]} columns, expected dim {self.dim}")

    @classmethod
    def from_vectors(cls, vectors, labels, dim: int) -> "Dataset":
        rows = [v.to_csr() if isinstance(v, DocumentVector) else sp.csr_matrix(v) for v in vectors]
        X = sp.vstack(rows, format="csr") if rows else sp.csr_matrix((0, dim))
        return cls(X, np.asarray([int(c) for c in labels], dtype=np.int64), dim)

    @classmethod
    def from_matrix(cls, X, y) -> "Dataset":
        X = sp.csr_matrix(X, dtype=np.float64)
        return cls(X, np.asarray(y, dtype=np.int64), X.shape[1])

    def __len__(self) -> int:
        return len(self.y)


def class_index(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sorted distinct class codes and each label's position among them."""
    classes, idx = np.unique(np.asarray(y, dtype=np.int64), return_inverse=True)
    return classes, idx.astype(np.int64)


def require_nonempty(data: Dataset) -> None:
    if len(data) == 0:
        raise ValueError("cannot train on an empty dataset")


class TrainedModel:
    kind: str = ""

    def __init__(self, classes, dim: int):
        self.classes = np.asarray(classes, dtype=np.int64)
        self.dim = int(dim)

    def _check(self, X) -> sp.csr_matrix:
        if isinstance(X, DocumentVector):
            X = X.to_csr()
        X = sp.csr_matrix(X, dtype=np.float64)
        if X.shape[1] != self.dim:
            raise DimensionMismatchError(
                f"input has dimension {X.shape[1]}, model expects {self.dim}")
        return X

    def decision_function(self, X) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        # np.argmax takes the first maximum; classes are sorted, so ties
        # resolve to the lowest class code
        scores = self.decision_function(X)
        return self.classes[np.argmax(scores, axis=1)]

    # subclasses fill in params / from_params
    def params(self) -> dict:
        raise NotImplementedError

    @classmethod
    def from_params(cls, classes, dim, params) -> "TrainedModel":
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "kind": self.kind,
            "dim": self.dim,
            "classes": self.classes.tolist(),
            "params": self.params(),
        }


def predict(model: TrainedModel, vector) -> tuple[SentimentClass, dict[SentimentClass, float]]:
    """Classify one document; returns the class and every class's score."""
    scores = model.decision_function(vector)[0]
    best = int(np.argmax(scores))
    return (SentimentClass(int(model.classes[best])),
            {SentimentClass(int(c)): float(s) for c, s in zip(model.classes, scores)})


_REGISTRY: dict[str, type[TrainedModel]] = {}


def register(cls):
    _REGISTRY[cls.kind] = cls
    return cls


def dumps_model(model: TrainedModel) -> str:
    return json.dumps(model.to_dict(), separators=(",", ":")) + "\n"


def save_model(model: TrainedModel, path) -> None:
    data = dumps_model(model)
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(data)
    os.replace(tmp, path)


def loads_model(text: str, kind: str | None = None) -> TrainedModel:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"not a model file: {e.msg}") from None
    if not isinstance(d, dict) or "format_version" not in d:
        raise ModelFormatError("not a model file: missing format_version")
    if d["format_version"] != FORMAT_VERSION:
        raise ModelFormatError(
            f"model format version {d['format_version']!r} unsupported (expected {FORMAT_VERSION})")
    if kind is not None and d.get("kind") != kind:
        raise KindMismatchError(f"model file holds a {d.get('kind')!r} model, expected {kind!r}")
    cls = _REGISTRY.get(d.get("kind"))
    if cls is None:
        raise ModelFormatError(f"unknown model kind {d.get('kind')!r}")
    try:
        return cls.from_params(d["classes"], d["dim"], d["params"])
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(f"malformed {d['kind']} parameters: {e!r}") from None


def load_model(path, kind: str | None = None) -> TrainedModel:
    with open(path, encoding="utf-8") as f:
        return loads_model(f.read(), kind)
