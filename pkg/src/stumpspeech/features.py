"""N-gram vocabularies and TF-IDF document vectors."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

MAX_ORDER = 4


@dataclass(frozen=True)
class NgramConfig:
    order: int = 1
    min_df: int = 1
    # use every order 1..order instead of exactly `order`
    cumulative: bool = False

    def __post_init__(self):
        if not isinstance(self.order, int) or not 1 <= self.order <= MAX_ORDER:
            raise ValueError(f"n-gram order must be in 1..{MAX_ORDER}, got {self.order!r}")
        if not isinstance(self.min_df, int) or self.min_df < 1:
            raise ValueError(f"min_df must be a positive integer, got {self.min_df!r}")

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(range(1, self.order + 1)) if self.cumulative else (self.order,)


def tokenize(cleaned_text: str) -> list[str]:
    return [tok for tok in cleaned_text.split(" ") if tok]


def extract_ngrams(tokens: Sequence[str], order: int) -> list[str]:
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"n-gram order must be in 1..{MAX_ORDER}, got {order!r}")
    return [" ".join(tokens[i:i + order]) for i in range(len(tokens) - order + 1)]


def _document_terms(text: str, config: NgramConfig) -> list[str]:
    tokens = tokenize(text)
    terms = []
    for n in config.orders:
        terms.extend(extract_ngrams(tokens, n))
    return terms


@dataclass(frozen=True)
class Vocabulary:
    term_to_index: Mapping[str, int]
    doc_freq: np.ndarray
    n_docs: int
    config: NgramConfig

    @property
    def order(self) -> int:
        return self.config.order

    def __len__(self) -> int:
        return len(self.term_to_index)

    @property
    def terms(self) -> list[str]:
        return list(self.term_to_index)


def fit_vocabulary(corpus_texts: Iterable[str], config: NgramConfig = NgramConfig()) -> Vocabulary:
    df: dict[str, int] = {}  # insertion order == first-seen order
    n_docs = 0
    for text in corpus_texts:
        n_docs += 1
        for term in dict.fromkeys(_document_terms(text, config)):
            df[term] = df.get(term, 0) + 1
    kept = [t for t, n in df.items() if n >= config.min_df]
    return Vocabulary(
        term_to_index={t: i for i, t in enumerate(kept)},
        doc_freq=np.array([df[t] for t in kept], dtype=np.int64),
        n_docs=n_docs,
        config=config,
    )


def smoothed_idf(n_docs: int, doc_freq: int) -> float:
    return math.log((1 + n_docs) / (1 + doc_freq)) + 1.0


@dataclass(frozen=True)
class DocumentVector:
    """Sparse vector; ``indices`` ascending, ``weights`` parallel."""

    indices: np.ndarray
    weights: np.ndarray
    dim: int

    @property
    def entries(self) -> dict[int, float]:
        return dict(zip(self.indices.tolist(), self.weights.tolist()))

    @property
    def is_zero(self) -> bool:
        return self.indices.size == 0

    def to_csr(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.weights, self.indices, np.array([0, self.indices.size])),
            shape=(1, self.dim))


class TfidfModel:
    def __init__(self, vocabulary: Vocabulary, idf: np.ndarray):
        self.vocabulary = vocabulary
        self.idf = np.asarray(idf, dtype=np.float64)

    @property
    def dim(self) -> int:
        return len(self.vocabulary)

    def _row(self, text: str) -> tuple[np.ndarray, np.ndarray]:
        index = self.vocabulary.term_to_index
        counts = Counter(index[t] for t in _document_terms(text, self.vocabulary.config)
                         if t in index)
        if not counts:
            return np.empty(0, np.int64), np.empty(0, np.float64)
        idx = np.array(sorted(counts), dtype=np.int64)
        w = np.array([counts[i] for i in idx.tolist()], dtype=np.float64) * self.idf[idx]
        w /= math.sqrt(math.fsum(w * w))
        return idx, w

    def transform(self, cleaned_text: str) -> DocumentVector:
        idx, w = self._row(cleaned_text)
        return DocumentVector(idx, w, self.dim)

    def transform_many(self, texts: Iterable[str]) -> sp.csr_matrix:
        """Stack document vectors into a CSR matrix (rows in input order)."""
        indptr, indices, data = [0], [], []
        for text in texts:
            idx, w = self._row(text)
            indices.append(idx)
            data.append(w)
            indptr.append(indptr[-1] + idx.size)
        n = len(indptr) - 1
        return sp.csr_matrix(
            (np.concatenate(data) if data else np.empty(0),
             np.concatenate(indices) if indices else np.empty(0, np.int64),
             np.array(indptr, dtype=np.int64)),
            shape=(n, self.dim))

    # -- persistence -----------------------------------------------------------

    def to_dict(self) -> dict:
        voc = self.vocabulary
        return {
            "order": voc.config.order,
            "min_df": voc.config.min_df,
            "cumulative": voc.config.cumulative,
            "n_docs": voc.n_docs,
            "terms": [
                {"term": t, "index": i, "df": int(voc.doc_freq[i]), "idf": float(self.idf[i])}
                for t, i in voc.term_to_index.items()
            ],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "TfidfModel":
        try:
            config = NgramConfig(d["order"], d.get("min_df", 1), d.get("cumulative", False))
            terms = sorted(d["terms"], key=lambda e: e["index"])
            if [e["index"] for e in terms] != list(range(len(terms))):
                raise ValueError("term indices are not a dense 0..V-1 range")
            voc = Vocabulary(
                term_to_index={e["term"]: e["index"] for e in terms},
                doc_freq=np.array([e["df"] for e in terms], dtype=np.int64),
                n_docs=int(d["n_docs"]),
                config=config,
            )
            idf = np.array([e["idf"] for e in terms], dtype=np.float64)
        except (KeyError, TypeError) as e:
            raise ValueError(f"malformed vectorizer document: {e!r}") from None
        return cls(voc, idf)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=1) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.dumps())

    @classmethod
    def load(cls, path) -> "TfidfModel":
        with open(path, encoding="utf-8") as f:
            try:
                d = json.load(f)
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}: not a vectorizer file ({e.msg})") from None
        return cls.from_dict(d)


def fit_tfidf(corpus_texts: Iterable[str], config: NgramConfig = NgramConfig()) -> TfidfModel:
    voc = fit_vocabulary(corpus_texts, config)
    idf = np.array([smoothed_idf(voc.n_docs, int(df)) for df in voc.doc_freq], dtype=np.float64)
    return TfidfModel(voc, idf)


def transform(model: TfidfModel, cleaned_text: str) -> DocumentVector:
    return model.transform(cleaned_text)


def vocabulary_sizes(corpus_texts: Sequence[str], orders: Iterable[int] = (1, 2, 3, 4)) -> dict[int, int]:
    return {n: len(fit_vocabulary(corpus_texts, NgramConfig(n))) for n in orders}
