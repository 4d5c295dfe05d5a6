"""Corpus records, the eight sentiment classes and annotation statistics."""

from __future__ import annotations

import csv
import enum
import io
import json
import os
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np


class CorpusError(ValueError):
    """Raised for unreadable or malformed corpus files."""


class SentimentClass(enum.IntEnum):
    SUPPORT_P1 = 1
    OPPOSE_P1 = 2
    SUPPORT_P2 = 3
    OPPOSE_P2 = 4
    SUPPORT_P3 = 5
    OPPOSE_P3 = 6
    NON_RELEVANT = 7
    NONE = 8

    @property
    def description(self) -> str:
        return _DESCRIPTIONS[self]


_DESCRIPTIONS = {
    SentimentClass.SUPPORT_P1: "Support P1",
    SentimentClass.OPPOSE_P1: "Oppose P1",
    SentimentClass.SUPPORT_P2: "Support P2",
    SentimentClass.OPPOSE_P2: "Oppose P2",
    SentimentClass.SUPPORT_P3: "Support P3",
    SentimentClass.OPPOSE_P3: "Oppose P3",
    SentimentClass.NON_RELEVANT: "Non Relevant",
    SentimentClass.NONE: "None",
}

ALL_CLASSES = tuple(SentimentClass)

# default per-class sizes of the synthetic corpus
REFERENCE_COUNTS = {
    SentimentClass(code): n
    for code, n in zip(range(1, 9), (1034, 876, 294, 790, 37, 53, 623, 2353))
}


class Party(enum.IntEnum):
    P1 = 1
    P2 = 2
    P3 = 3


class Stance(enum.Enum):
    SUPPORT = "Support"
    OPPOSE = "Oppose"


@dataclass(frozen=True, order=True)
class StanceAssertion:
    party: Party
    stance: Stance


@dataclass(frozen=True)
class LabeledTweet:
    id: str
    text: str
    label: SentimentClass | None = None


@dataclass(frozen=True)
class Corpus:
    items: tuple[LabeledTweet, ...] = ()
    degenerate: tuple[str, ...] = ()  # ids of empty-text records

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[LabeledTweet]:
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]

    @property
    def texts(self) -> list[str]:
        return [t.text for t in self.items]

    @property
    def labels(self) -> np.ndarray:
        return np.array([int(t.label) for t in self.items], dtype=np.int64)

    @classmethod
    def from_items(cls, items: Iterable[LabeledTweet]) -> "Corpus":
        items = tuple(items)
        seen = set()
        for t in items:
            if t.id in seen:
                raise CorpusError(f"duplicate tweet id {t.id!r}")
            seen.add(t.id)
        return cls(items, tuple(t.id for t in items if t.text == ""))


# -- annotation ---------------------------------------------------------------

def resolve_label(assertions: Iterable[StanceAssertion], relevant: bool) -> SentimentClass:
    """Collapse an annotator's per-party stances into a single class.

    Irrelevant tweets are class 7 whatever else was asserted. Any support
    beats any opposition; among several supported (or, failing that,
    opposed) parties the lowest-numbered one wins.
    """
    if not relevant:
        return SentimentClass.NON_RELEVANT
    assertions = set(assertions)
    if not assertions:
        return SentimentClass.NONE
    supported = [a.party for a in assertions if a.stance is Stance.SUPPORT]
    if supported:
        return SentimentClass(2 * min(supported) - 1)
    opposed = [a.party for a in assertions]
    return SentimentClass(2 * min(opposed))


@dataclass(frozen=True)
class ClassDistribution:
    counts: Mapping[SentimentClass, int]
    percentages: Mapping[SentimentClass, Decimal]
    total: int
    empty: bool = False


def _percent(count: int, total: int) -> Decimal:
    if total == 0:
        return Decimal("0.00")
    return (Decimal(100 * count) / Decimal(total)).quantize(
        Decimal("0.01"), rounding=ROUND_HALF_UP)


def class_distribution(corpus: Iterable[LabeledTweet] | Corpus) -> ClassDistribution:
    counts = {c: 0 for c in ALL_CLASSES}
    for t in corpus:
        counts[SentimentClass(t.label)] += 1
    total = sum(counts.values())
    pct = {c: _percent(n, total) for c, n in counts.items()}
    return ClassDistribution(counts, pct, total, empty=total == 0)


def format_distribution(dist: ClassDistribution) -> str:
    """Render a distribution as a plain-text corpus statistics table."""
    lines = [f"{'Sentiment class':<20}{'#tweets':>10}{'%':>10}"]
    for c in ALL_CLASSES:
        name = f"{int(c)} ({c.description})"
        lines.append(f"{name:<20}{dist.counts[c]:>10}{dist.percentages[c]:>10}")
    total_pct = "100" if dist.total else "0"
    lines.append(f"{'Total':<20}{dist.total:>10}{total_pct:>10}")
    return "\n".join(lines) + "\n"


def agreement_rate(labels_a: Sequence, labels_b: Sequence) -> float:
    """Raw fraction of positions on which two annotators agree."""
    if len(labels_a) != len(labels_b):
        raise ValueError(f"length mismatch: {len(labels_a)} != {len(labels_b)}")
    if len(labels_a) == 0:
        raise ValueError("agreement of empty label sequences is undefined")
    agree = sum(int(a) == int(b) for a, b in zip(labels_a, labels_b))
    return agree / len(labels_a)


# -- file formats -------------------------------------------------------------

FORMATS = ("csv", "jsonl")


def _parse_label(value, where: str, required: bool) -> SentimentClass | None:
    if value is None or value == "":
        if required:
            raise CorpusError(f"{where}: missing label")
        return None
    try:
        if isinstance(value, bool) or isinstance(value, float):
            raise ValueError
        code = int(value)
    except (TypeError, ValueError):
        raise CorpusError(f"{where}: label {value!r} is not an integer") from None
    if not 1 <= code <= 8:
        raise CorpusError(f"{where}: label {code} outside 1..8")
    return SentimentClass(code)


def _read_text(path) -> str:
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except OSError as e:
        raise CorpusError(f"cannot read {os.fspath(path)}: {e.strerror}") from e
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise CorpusError(f"{os.fspath(path)}: invalid UTF-8 at byte {e.start}") from e


def _iter_jsonl(text: str, labels: bool):
    # split on "\n" only: str.splitlines() would also break on U+2028 etc.
    for lineno, line in enumerate(text.split("\n"), 1):
        if not line.strip():
            continue
        where = f"line {lineno}"
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise CorpusError(f"{where}: {e.msg}") from None
        if not isinstance(rec, dict):
            raise CorpusError(f"{where}: expected a JSON object")
        if not isinstance(rec.get("id"), str) or not isinstance(rec.get("text"), str):
            raise CorpusError(f"{where}: fields 'id' and 'text' must be strings")
        yield LabeledTweet(rec["id"], rec["text"], _parse_label(rec.get("label"), where, labels))


def _iter_csv(text: str, labels: bool):
    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader, None)
    if header is None:
        return
    expected = ["id", "text", "label"]
    if header != expected and not (not labels and header == expected[:2]):
        raise CorpusError(f"line 1: header must be {','.join(expected)}")
    width = len(header)
    for row in reader:
        where = f"line {reader.line_num}"
        if not row:
            continue
        if len(row) != width:
            raise CorpusError(f"{where}: expected {width} fields, got {len(row)}")
        label = row[2] if width == 3 else None
        yield LabeledTweet(row[0], row[1], _parse_label(label, where, labels))


def load_corpus(path, format: str = "jsonl", require_labels: bool = True) -> Corpus:
    if format not in FORMATS:
        raise CorpusError(f"unknown corpus format {format!r}; expected one of {FORMATS}")
    text = _read_text(path)
    rows = _iter_jsonl(text, require_labels) if format == "jsonl" else _iter_csv(text, require_labels)
    return Corpus.from_items(rows)


def dumps_corpus(corpus: Iterable[LabeledTweet], format: str = "jsonl") -> str:
    if format == "jsonl":
        out = []
        for t in corpus:
            rec = {"id": t.id, "text": t.text}
            if t.label is not None:
                rec["label"] = int(t.label)
            out.append(json.dumps(rec, ensure_ascii=False) + "\n")
        return "".join(out)
    if format == "csv":
        buf = io.StringIO(newline="")
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["id", "text", "label"])
        try:
            for t in corpus:
                w.writerow([t.id, t.text, "" if t.label is None else int(t.label)])
        except csv.Error as e:  # e.g. NUL characters on Python < 3.11
            raise CorpusError(f"cannot write tweet {t.id!r} as CSV: {e}") from None
        return buf.getvalue()
    raise CorpusError(f"unknown corpus format {format!r}; expected one of {FORMATS}")


def save_corpus(corpus: Iterable[LabeledTweet], path, format: str = "jsonl") -> None:
    data = dumps_corpus(corpus, format)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(data)


# -- synthetic data -------------------------------------------------------------

@dataclass(frozen=True)
class KeywordProfile:
    """Token pools used to fabricate tweets for each class.

    ``keywords[c]`` holds the phrases drawn for class ``c``; ``noise`` tokens
    are shared by all classes.  ``signal`` and ``filler`` are inclusive
    ranges for the number of class phrases and noise tokens per tweet.  A
    ``decoration_rate`` share of tweets also gets one decoration (mention,
    URL, number, ...) to exercise the cleaning rules.
    """

    keywords: Mapping[SentimentClass, Sequence[str]]
    noise: Sequence[str]
    signal: tuple[int, int] = (3, 5)
    filler: tuple[int, int] = (3, 7)
    decorations: Sequence[str] = field(default_factory=tuple)
    decoration_rate: float = 0.5


# Every class owns four words no other class uses; a tweet carries one or
# two rotations of them as a slogan.  This makes the classes linearly
# separable on unigrams while keeping repeated higher-order n-grams.
_SLOGANS = {
    SentimentClass.SUPPORT_P1: "aapzindabad jhadu kejriwaljeetega mohallaclinic",
    SentimentClass.OPPOSE_P1: "aapmurdabad kejriwalharega jhoothevaade freeloot",
    SentimentClass.SUPPORT_P2: "bjpzindabad kamalkhilega shahjeetega modiji",
    SentimentClass.OPPOSE_P2: "bjpmurdabad jumlaparty shahhaarega lotusloot",
    SentimentClass.SUPPORT_P3: "congresszindabad panjajeetega sheiladikshit rahuljeetega",
    SentimentClass.OPPOSE_P3: "congressmurdabad panjahaarega scamparty rahulfail",
    SentimentClass.NON_RELEVANT: "cricket movie weather birthday",
    SentimentClass.NONE: "election booth turnout evm",
}


def _rotations(slogan: str) -> tuple[str, ...]:
    words = slogan.split()
    return tuple(" ".join(words[i:] + words[:i]) for i in range(len(words)))


DEFAULT_PROFILE = KeywordProfile(
    keywords={c: _rotations(s) for c, s in _SLOGANS.items()},
    signal=(1, 2),
    filler=(0, 3),
    noise=(
        "the", "is", "in", "on", "and", "today", "delhi", "people", "what",
        "this", "time", "all", "now", "here", "we", "they", "will", "again",
        "news", "city", "दिल्ली", "चुनाव", "लोग", "आज",
    ),
    decorations=(
        "RT @{user}", "@{user}", "#DelhiElections2020", "#DelhiPolls",
        "https://t.co/{user}", "{n}", "₹{n}", "call +91 98{n8}", "mail {user}@mail.in",
        "!!", "...", "www.{user}.in",
    ),
)


def generate_synthetic_corpus(seed: int,
                              counts: Mapping[SentimentClass | int, int],
                              keyword_profile: KeywordProfile = DEFAULT_PROFILE) -> Corpus:
    """Fabricate a labeled corpus with exactly ``counts`` tweets per class.

    Tweets are ordered by interleaving the classes at random, so the file
    order carries no label information.  Same seed, same corpus.
    """
    rng = np.random.default_rng(seed)
    labels = []
    for c in ALL_CLASSES:
        n = int(counts.get(c, counts.get(int(c), 0)))
        if n < 0:
            raise ValueError(f"negative count for class {int(c)}")
        labels.extend([c] * n)
    order = rng.permutation(len(labels))
    prof = keyword_profile
    items = []
    for k, i in enumerate(order):
        c = labels[i]
        pool = prof.keywords[c]
        n_sig = int(rng.integers(prof.signal[0], prof.signal[1] + 1))
        n_fill = int(rng.integers(prof.filler[0], prof.filler[1] + 1))
        words = [pool[j] for j in rng.integers(0, len(pool), n_sig)]
        words += [prof.noise[j] for j in rng.integers(0, len(prof.noise), n_fill)]
        words = [words[j] for j in rng.permutation(len(words))]
        if rng.random() < 0.3:
            words[0] = words[0].capitalize()
        if prof.decorations and rng.random() < prof.decoration_rate:
            deco = prof.decorations[int(rng.integers(len(prof.decorations)))]
            deco = deco.format(user=f"user{int(rng.integers(1000))}",
                               n=int(rng.integers(1, 5000)),
                               n8=int(rng.integers(10**7, 10**8)))
            if deco.startswith("RT"):
                words.insert(0, deco)
            else:
                words.insert(int(rng.integers(len(words) + 1)), deco)
        items.append(LabeledTweet(f"t{k + 1:05d}", " ".join(words), c))
    return Corpus.from_items(items)


def bundled_corpus(seed: int = 42) -> Corpus:
    """The synthetic stand-in corpus with the original per-class counts."""
    return generate_synthetic_corpus(seed, REFERENCE_COUNTS, DEFAULT_PROFILE)
