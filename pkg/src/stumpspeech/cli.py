"""Command-line entry point: ``stumpspeech clean|stats|train|predict|experiment``.

Exit codes: 0 success, 1 internal failure, 2 user or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
from dataclasses import dataclass, field

from . import classifiers
from .classifiers import ALGORITHMS, Dataset, DimensionMismatchError, ModelFormatError
from .corpus import (
    FORMATS,
    REFERENCE_COUNTS,
    Corpus,
    CorpusError,
    LabeledTweet,
    bundled_corpus,
    class_distribution,
    dumps_corpus,
    format_distribution,
    generate_synthetic_corpus,
    load_corpus,
)
from .evaluation import evaluate, format_report, run_experiment_grid, stratified_split
from .features import NgramConfig, TfidfModel, fit_tfidf, vocabulary_sizes
from .normalize import normalize

log = logging.getLogger("stumpspeech")

SEED_ENV = "STUMPSPEECH_SEED"


class UsageError(Exception):
    """Bad arguments or configuration; exits with status 2."""


@dataclass
class RunConfig:
    corpus: str | None = None  # None: the bundled synthetic corpus
    format: str = "jsonl"
    order: int = 1
    orders: list = field(default_factory=lambda: [1, 2, 3, 4])
    algorithm: str = "svm"
    algorithms: list = field(default_factory=lambda: list(ALGORITHMS))
    test_fraction: float = 0.2
    seed: int = 42
    output_dir: str = "out"
    n_jobs: int = 1
    hyperparameters: dict = field(default_factory=dict)

    def train_config(self, algorithm: str):
        cls = classifiers.CONFIGS[algorithm]
        kwargs = dict(self.hyperparameters.get(algorithm, {}))
        kwargs["seed"] = self.seed
        if algorithm == "forest":
            kwargs.setdefault("n_jobs", self.n_jobs)
        return cls(**kwargs)

    def train_configs(self) -> dict:
        return {a: self.train_config(a) for a in ALGORITHMS}


_TYPES = {"corpus": (str, type(None)), "format": str, "order": int, "orders": list,
          "algorithm": str, "algorithms": list, "test_fraction": (int, float), "seed": int,
          "output_dir": str, "n_jobs": int, "hyperparameters": dict}


def validate_config(raw: dict) -> RunConfig:
    """Build a RunConfig, collecting every field-level problem before failing."""
    errors = []
    if not isinstance(raw, dict):
        raise UsageError("config: top level must be a JSON object")
    for key, val in raw.items():
        if key not in _TYPES:
            errors.append(f"{key}: unknown field")
        elif isinstance(val, bool) or not isinstance(val, _TYPES[key]):
            errors.append(f"{key}: wrong type {type(val).__name__}")
    if errors:
        raise UsageError("invalid config:\n  " + "\n  ".join(errors))
    cfg = RunConfig(**raw)
    if cfg.format not in FORMATS:
        errors.append(f"format: must be one of {', '.join(FORMATS)}")
    for name, val in (("order", [cfg.order]), ("orders", cfg.orders)):
        if not val or any(isinstance(o, bool) or not isinstance(o, int) or not 1 <= o <= 4 for o in val):
            errors.append(f"{name}: n-gram orders must be integers in 1..4")
    for name, val in (("algorithm", [cfg.algorithm]), ("algorithms", cfg.algorithms)):
        bad = [a for a in val if a not in ALGORITHMS]
        if bad:
            errors.append(f"{name}: unknown algorithm {', '.join(map(str, bad))}; "
                          f"valid: {', '.join(ALGORITHMS)}")
    if not 0 < cfg.test_fraction < 1:
        errors.append("test_fraction: must lie in (0, 1)")
    if cfg.n_jobs < 1:
        errors.append("n_jobs: must be >= 1")
    if cfg.corpus == "":
        errors.append("corpus: path must be non-empty")
    if not cfg.output_dir:
        errors.append("output_dir: path must be non-empty")
    for algo, params in cfg.hyperparameters.items():
        if algo not in classifiers.CONFIGS:
            errors.append(f"hyperparameters.{algo}: unknown algorithm")
            continue
        if not isinstance(params, dict):
            errors.append(f"hyperparameters.{algo}: must be an object")
            continue
        known = {f.name for f in dataclasses.fields(classifiers.CONFIGS[algo])} - {"seed"}
        for k in params:
            if k not in known:
                errors.append(f"hyperparameters.{algo}.{k}: unknown; valid: {', '.join(sorted(known))}")
        if not errors:
            try:
                cfg.train_config(algo)
            except (TypeError, ValueError) as e:
                errors.append(f"hyperparameters.{algo}: {e}")
    if errors:
        raise UsageError("invalid config:\n  " + "\n  ".join(errors))
    return cfg


def resolve_config(args) -> RunConfig:
    """Config file, then STUMPSPEECH_SEED, then command-line flags."""
    raw = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as f:
                raw = json.load(f)
        except OSError as e:
            raise UsageError(f"cannot read config {args.config}: {e.strerror}") from None
        except json.JSONDecodeError as e:
            raise UsageError(f"config {args.config}: invalid JSON ({e.msg}, line {e.lineno})") from None
    if not isinstance(raw, dict):
        raise UsageError("config: top level must be a JSON object")
    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None:
        try:
            raw["seed"] = int(env_seed)
        except ValueError:
            raise UsageError(f"{SEED_ENV}: not an integer: {env_seed!r}") from None
    overrides = {
        "corpus": getattr(args, "input", None),
        "format": getattr(args, "format", None),
        "order": getattr(args, "order", None),
        "orders": getattr(args, "orders", None),
        "algorithm": getattr(args, "algorithm", None),
        "algorithms": getattr(args, "algorithms", None),
        "test_fraction": getattr(args, "test_fraction", None),
        "seed": getattr(args, "seed", None),
        "output_dir": getattr(args, "output_dir", None),
        "n_jobs": getattr(args, "n_jobs", None),
    }
    raw.update({k: v for k, v in overrides.items() if v is not None})
    if "format" not in raw and isinstance(raw.get("corpus"), str) and raw["corpus"].lower().endswith(".csv"):
        raw["format"] = "csv"
    return validate_config(raw)


def _load(path, fmt, require_labels=True) -> Corpus:
    if not os.path.exists(path):
        raise UsageError(f"input file not found: {path}")
    return load_corpus(path, fmt, require_labels=require_labels)


def _corpus(cfg: RunConfig) -> Corpus:
    if cfg.corpus is None:
        return bundled_corpus()
    return _load(cfg.corpus, cfg.format)


def _write(path, text: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def _same_file(a, b) -> bool:
    if os.path.abspath(a) == os.path.abspath(b):
        return True
    return os.path.exists(a) and os.path.exists(b) and os.path.samefile(a, b)


# -- commands -------------------------------------------------------------------

def cmd_clean(args) -> int:
    if _same_file(args.input, args.output):
        raise UsageError("--out must differ from --in (inputs are never modified)")
    corpus = _load(args.input, args.format, require_labels=False)
    cleaned = [LabeledTweet(t.id, normalize(t.text), t.label) for t in corpus]
    _write(args.output, dumps_corpus(cleaned, args.format))
    log.info("cleaned %d tweets -> %s", len(cleaned), args.output)
    return 0


def cmd_stats(args) -> int:
    corpus = _load(args.input, args.format) if args.input else bundled_corpus()
    dist = class_distribution(corpus)
    if dist.empty:
        log.warning("corpus is empty; all counts are zero")
    sys.stdout.write(format_distribution(dist))
    return 0


def cmd_vocab(args) -> int:
    corpus = _load(args.input, args.format) if args.input else bundled_corpus()
    sizes = vocabulary_sizes([normalize(t) for t in corpus.texts], args.orders or (1, 2, 3, 4))
    names = {1: "Unigrams", 2: "Bigrams", 3: "Trigrams", 4: "Tetragrams"}
    sys.stdout.write(f"{'N-grams':<12}{'count':>10}\n")
    for n, v in sizes.items():
        sys.stdout.write(f"{names[n]:<12}{v:>10}\n")
    return 0


def cmd_synth(args) -> int:
    counts = REFERENCE_COUNTS
    if args.counts:
        parts = args.counts.split(",")
        if len(parts) != 8:
            raise UsageError("--counts needs 8 comma-separated integers (classes 1..8)")
        try:
            counts = {c: int(n) for c, n in zip(REFERENCE_COUNTS, parts)}
        except ValueError:
            raise UsageError("--counts needs 8 comma-separated integers (classes 1..8)") from None
        if any(n < 0 for n in counts.values()):
            raise UsageError("--counts must be non-negative")
    corpus = generate_synthetic_corpus(args.seed, counts)
    _write(args.output, dumps_corpus(corpus, args.format))
    log.info("wrote %d synthetic tweets -> %s", len(corpus), args.output)
    return 0


def cmd_train(args) -> int:
    cfg = resolve_config(args)
    corpus = _corpus(cfg)
    if len(corpus) == 0:
        raise UsageError("cannot train on an empty corpus")
    texts = [normalize(t) for t in corpus.texts]
    vec = fit_tfidf(texts, NgramConfig(cfg.order))
    data = Dataset(vec.transform_many(texts), corpus.labels, vec.dim)
    try:
        model = classifiers.train(cfg.algorithm, data, cfg.train_config(cfg.algorithm))
    except ValueError as e:
        raise UsageError(str(e)) from None
    model_path = args.model or os.path.join(cfg.output_dir, "model.json")
    vec_path = args.vectorizer or os.path.join(cfg.output_dir, "vectorizer.json")
    _write(vec_path, vec.dumps())
    _write(model_path, classifiers.dumps_model(model))
    report = evaluate(corpus.labels, model.predict(data.X))
    sys.stdout.write(f"trained {cfg.algorithm} on {len(corpus)} tweets, order {cfg.order}, "
                     f"dim {vec.dim}\ntraining-set metrics:\n{format_report(report)}")
    sys.stdout.write(f"model: {model_path}\nvectorizer: {vec_path}\n")
    return 0


def cmd_predict(args) -> int:
    try:
        model = classifiers.load_model(args.model)
        vec = TfidfModel.load(args.vectorizer)
    except OSError as e:
        raise UsageError(f"cannot read {e.filename}: {e.strerror}") from None
    except ValueError as e:
        raise UsageError(str(e)) from None
    if model.dim != vec.dim:
        raise UsageError(f"model expects dimension {model.dim} but the vectorizer has {vec.dim} terms")
    corpus = _load(args.input, args.format, require_labels=False)
    rows = []
    for t in corpus:
        v = vec.transform(normalize(t.text))
        cls, scores = classifiers.predict(model, v)
        rows.append([t.id, int(cls), repr(scores[cls]), "oov" if v.is_zero else ""])
    out = open(args.output, "w", encoding="utf-8", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["id", "predicted_class", "score", "flags"])
        w.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_experiment(args) -> int:
    cfg = resolve_config(args)
    corpus = _corpus(cfg)
    if len(corpus) == 0:
        raise UsageError("cannot run experiments on an empty corpus")
    try:
        grid = run_experiment_grid(corpus, cfg.orders, cfg.algorithms, cfg.test_fraction,
                                   cfg.seed, cfg.train_configs())
    except ValueError as e:
        raise UsageError(str(e)) from None
    os.makedirs(cfg.output_dir, exist_ok=True)
    _write(os.path.join(cfg.output_dir, "grid.csv"), grid.to_csv())
    _write(os.path.join(cfg.output_dir, "grid.txt"), grid.to_table())
    sys.stdout.write(grid.to_table())
    return 0


# -- parser -----------------------------------------------------------------------

def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stumpspeech", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def io_args(p, out=True, required=True):
        p.add_argument("--in", dest="input", required=required, help="corpus file")
        if out:
            p.add_argument("--out", dest="output", required=True)
        p.add_argument("--format", choices=FORMATS, default=None)

    p = sub.add_parser("clean", help="normalize the text field of a corpus file")
    io_args(p)
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("stats", help="print per-class counts and percentages")
    io_args(p, out=False, required=False)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("vocab", help="print n-gram vocabulary sizes per order")
    io_args(p, out=False, required=False)
    p.add_argument("--orders", type=_int_list)
    p.set_defaults(func=cmd_vocab)

    p = sub.add_parser("synth", help="write a synthetic labeled corpus")
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--format", choices=FORMATS, default="jsonl")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--counts", help="8 comma-separated per-class counts")
    p.set_defaults(func=cmd_synth)

    def run_args(p):
        p.add_argument("--config")
        io_args(p, out=False, required=False)
        p.add_argument("--seed", type=int)
        p.add_argument("--test-fraction", type=float)
        p.add_argument("--output-dir")
        p.add_argument("--n-jobs", type=int)

    p = sub.add_parser("train", help="fit a vectorizer and one classifier")
    run_args(p)
    p.add_argument("--algorithm")
    p.add_argument("--order", type=int)
    p.add_argument("--model", help="model file (default <output-dir>/model.json)")
    p.add_argument("--vectorizer", help="vectorizer file (default <output-dir>/vectorizer.json)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="classify tweets with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--vectorizer", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output")
    p.add_argument("--format", choices=FORMATS, default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("experiment", help="run the algorithm x n-gram-order grid")
    run_args(p)
    p.add_argument("--algorithms", type=_str_list)
    p.add_argument("--orders", type=_int_list)
    p.set_defaults(func=cmd_experiment)
    return parser


def _default_format(args) -> None:
    # commands without a config fall back to guessing from the extension
    if getattr(args, "format", "unset") is None and args.command in ("clean", "stats", "vocab", "predict"):
        path = getattr(args, "input", None) or ""
        args.format = "csv" if path.lower().endswith(".csv") else "jsonl"


def main(argv=None) -> int:
    logging.basicConfig(format="%(name)s: %(levelname)s: %(message)s", level=logging.INFO)
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            log.setLevel(logging.DEBUG)
        _default_format(args)
        return args.func(args)
    except UsageError as e:
        print(f"stumpspeech: error: {e}", file=sys.stderr)
        return 2
    except (CorpusError, ModelFormatError, DimensionMismatchError) as e:
        print(f"stumpspeech: error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - last-resort handler
        log.exception("internal error: %s", e)
        return 1


if __name__ == "__main__":
    sys.exit(main())
