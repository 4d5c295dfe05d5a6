import itertools
import json
import sys
from decimal import Decimal

import pytest
from hypothesis import given, strategies as st

from stumpspeech.corpus import (
    ALL_CLASSES,
    DEFAULT_PROFILE,
    REFERENCE_COUNTS,
    Corpus,
    CorpusError,
    LabeledTweet,
    Party,
    SentimentClass,
    Stance,
    StanceAssertion,
    agreement_rate,
    class_distribution,
    dumps_corpus,
    generate_synthetic_corpus,
    load_corpus,
    resolve_label,
    save_corpus,
)

S = Stance.SUPPORT
O = Stance.OPPOSE


def a(party, stance):
    return StanceAssertion(Party(party), stance)


def test_eight_classes_round_trip():
    assert [int(c) for c in ALL_CLASSES] == list(range(1, 9))
    for c in ALL_CLASSES:
        assert SentimentClass(int(c)) is c
    assert SentimentClass(1).description == "Support P1"
    assert SentimentClass(7).description == "Non Relevant"
    with pytest.raises(ValueError):
        SentimentClass(9)


# -- resolve_label ----------------------------------------------------------------

@pytest.mark.parametrize("assertions, relevant, expected", [
    ({a(1, S)}, True, 1),
    ({a(1, S), a(2, O)}, True, 1),
    (set(), False, 7),
    (set(), True, 8),
    ({a(2, O), a(3, O)}, True, 4),
    ({a(3, S), a(1, O)}, True, 5),
    ({a(2, S), a(3, S)}, True, 3),
    ({a(1, S), a(1, O)}, True, 1),
    ({a(1, S)}, False, 7),
])
def test_resolve_label(assertions, relevant, expected):
    assert resolve_label(assertions, relevant) == expected


ALL_ASSERTIONS = [a(p, s) for p in (1, 2, 3) for s in (S, O)]


@given(st.sets(st.sampled_from(ALL_ASSERTIONS)), st.booleans())
def test_resolve_label_total_and_support_odd(assertions, relevant):
    c = resolve_label(assertions, relevant)
    assert c in ALL_CLASSES
    if relevant and any(x.stance is S for x in assertions):
        assert int(c) % 2 == 1 and int(c) <= 5


def test_resolve_label_order_independent():
    for r in (1, 2, 3):
        for combo in itertools.combinations(ALL_ASSERTIONS, r):
            results = {resolve_label(list(p), True) for p in itertools.permutations(combo)}
            assert len(results) == 1


# -- class_distribution -------------------------------------------------------------

def _corpus_from_labels(labels):
    return Corpus.from_items(LabeledTweet(str(i), "x", SentimentClass(c)) for i, c in enumerate(labels))


def test_distribution_reference_counts():
    labels = [c for c, n in REFERENCE_COUNTS.items() for _ in range(n)]
    dist = class_distribution(_corpus_from_labels(labels))
    assert dist.total == 6060
    got = {int(c): str(p) for c, p in dist.percentages.items()}
    # rows whose reference percentages are consistent with their counts
    for code, pct in {1: "17.06", 2: "14.46", 3: "4.85", 4: "13.04", 5: "0.61", 6: "0.87"}.items():
        assert got[code] == pct
    # half-up rounding of 623/6060 and 2353/6060
    assert got[7] == "10.28" and got[8] == "38.83"


def test_distribution_single_class():
    dist = class_distribution(_corpus_from_labels([8] * 4))
    assert str(dist.percentages[SentimentClass.NONE]) == "100.00"
    assert all(str(dist.percentages[c]) == "0.00" for c in ALL_CLASSES if c != 8)
    assert dist.counts[SentimentClass.SUPPORT_P1] == 0


def test_distribution_thirds_half_up():
    dist = class_distribution(_corpus_from_labels([1, 1, 2]))
    assert str(dist.percentages[SentimentClass(1)]) == "66.67"
    assert str(dist.percentages[SentimentClass(2)]) == "33.33"


def test_distribution_half_up_not_banker():
    # 1/32 = 3.125% exactly: half-up gives 3.13, banker's rounding 3.12
    dist = class_distribution(_corpus_from_labels([1] + [8] * 31))
    assert str(dist.percentages[SentimentClass(1)]) == "3.13"


def test_distribution_empty_flagged():
    dist = class_distribution(Corpus())
    assert dist.empty and dist.total == 0
    assert all(v == 0 for v in dist.counts.values())


@given(st.lists(st.integers(1, 8), min_size=1, max_size=300))
def test_distribution_invariants(labels):
    dist = class_distribution(_corpus_from_labels(labels))
    assert sum(dist.counts.values()) == dist.total == len(labels)
    assert abs(sum(dist.percentages.values()) - Decimal(100)) <= Decimal("0.04")


# -- agreement ------------------------------------------------------------------

def test_agreement_examples():
    seq = [SentimentClass((i % 8) + 1) for i in range(50)]
    assert agreement_rate(seq, seq) == 1.0
    b = [1] * 973 + [2] * 27
    assert agreement_rate([1] * 1000, b) == 0.973
    assert agreement_rate([1, 2, 3, 4], [1, 3, 4, 5]) == 0.25


def test_agreement_errors():
    with pytest.raises(ValueError):
        agreement_rate([1, 2], [1])
    with pytest.raises(ValueError):
        agreement_rate([], [])


@given(st.lists(st.tuples(st.integers(1, 8), st.integers(1, 8)), min_size=1))
def test_agreement_symmetric(pairs):
    x, y = zip(*pairs)
    assert agreement_rate(x, y) == agreement_rate(y, x)
    assert agreement_rate(x, x) == 1.0
    assert 0.0 <= agreement_rate(x, y) <= 1.0


# -- loading / saving ---------------------------------------------------------------

def test_load_jsonl_in_order(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_text("".join(json.dumps({"id": f"t{i}", "text": f"tweet {i}", "label": c}) + "\n"
                         for i, c in enumerate([1, 8, 4])))
    c = load_corpus(p, "jsonl")
    assert [t.label for t in c] == [1, 8, 4]
    assert [t.id for t in c] == ["t0", "t1", "t2"]


def test_load_empty_file(tmp_path):
    for fmt in ("jsonl", "csv"):
        p = tmp_path / f"e.{fmt}"
        p.write_text("")
        assert len(load_corpus(p, fmt)) == 0


def test_label_out_of_range_names_line(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_text('{"id": "a", "text": "x", "label": 1}\n{"id": "b", "text": "y", "label": 9}\n')
    with pytest.raises(CorpusError, match="line 2"):
        load_corpus(p, "jsonl")


@pytest.mark.parametrize("line", [
    "not json",
    '{"id": 3, "text": "x", "label": 1}',
    '{"id": "a", "text": "x", "label": "one"}',
    '{"id": "a", "text": "x"}',
    '[1, 2]',
])
def test_malformed_jsonl(tmp_path, line):
    p = tmp_path / "c.jsonl"
    p.write_text('{"id": "ok", "text": "x", "label": 2}\n' + line + "\n")
    with pytest.raises(CorpusError, match="line 2"):
        load_corpus(p, "jsonl")


def test_csv_quoting_round_trip(tmp_path):
    items = [LabeledTweet("a", 'he said "vote", then left', SentimentClass(1)),
             LabeledTweet("b", "line one\nline two", SentimentClass(2)),
             LabeledTweet("c", "", SentimentClass(8))]
    p = tmp_path / "c.csv"
    save_corpus(items, p, "csv")
    c = load_corpus(p, "csv")
    assert list(c) == items
    assert c.degenerate == ("c",)


def test_csv_bad_header_and_row(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("id,body,label\r\na,x,1\r\n")
    with pytest.raises(CorpusError, match="header"):
        load_corpus(p, "csv")
    p.write_text("id,text,label\r\na,x\r\n")
    with pytest.raises(CorpusError, match="line 2"):
        load_corpus(p, "csv")


def test_unreadable_and_bad_utf8(tmp_path):
    with pytest.raises(CorpusError):
        load_corpus(tmp_path / "missing.jsonl")
    p = tmp_path / "bad.jsonl"
    p.write_bytes(b'{"id": "a", "text": "\xff", "label": 1}\n')
    with pytest.raises(CorpusError, match="UTF-8"):
        load_corpus(p)


def test_duplicate_ids_rejected(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_text('{"id": "a", "text": "x", "label": 1}\n{"id": "a", "text": "y", "label": 2}\n')
    with pytest.raises(CorpusError, match="duplicate"):
        load_corpus(p)


tweet_text = st.text(st.characters(blacklist_categories=("Cs",)), max_size=40)


@given(st.lists(st.tuples(tweet_text, st.integers(1, 8)), max_size=20),
       st.sampled_from(["jsonl", "csv"]))
def test_save_load_round_trip(tmp_path_factory, rows, fmt):
    if fmt == "csv" and sys.version_info < (3, 11):
        rows = [(text.replace("\x00", ""), c) for text, c in rows]
    items = [LabeledTweet(f"id{i}", text, SentimentClass(c)) for i, (text, c) in enumerate(rows)]
    p = tmp_path_factory.mktemp("rt") / f"c.{fmt}"
    save_corpus(items, p, fmt)
    back = load_corpus(p, fmt)
    assert [(t.text, int(t.label)) for t in back] == [(t.text, int(t.label)) for t in items]
    assert dumps_corpus(back, fmt) == dumps_corpus(items, fmt)


# -- synthetic corpus ----------------------------------------------------------------

def test_synthetic_all_zero_is_empty():
    assert len(generate_synthetic_corpus(7, {c: 0 for c in ALL_CLASSES})) == 0


def test_synthetic_deterministic():
    counts = {1: 5, 2: 3, 8: 10}
    a1 = dumps_corpus(generate_synthetic_corpus(7, counts))
    a2 = dumps_corpus(generate_synthetic_corpus(7, counts))
    assert a1 == a2
    assert a1 != dumps_corpus(generate_synthetic_corpus(8, counts))


def test_synthetic_exact_counts():
    c = generate_synthetic_corpus(3, REFERENCE_COUNTS)
    dist = class_distribution(c)
    assert {int(k): v for k, v in dist.counts.items()} == {int(k): v for k, v in REFERENCE_COUNTS.items()}
    assert dist.total == 6060


def test_synthetic_uses_class_pools():
    c = generate_synthetic_corpus(1, {3: 20}, DEFAULT_PROFILE)
    pool_words = {w for phrase in DEFAULT_PROFILE.keywords[SentimentClass(3)] for w in phrase.split()}
    for t in c:
        assert pool_words & set(t.text.split())


def test_synthetic_negative_count():
    with pytest.raises(ValueError):
        generate_synthetic_corpus(1, {1: -1})


@pytest.mark.skipif(sys.version_info >= (3, 11), reason="csv handles NUL from 3.11")
def test_csv_nul_is_a_corpus_error(tmp_path):
    with pytest.raises(CorpusError, match="NUL|escape"):
        save_corpus([LabeledTweet("a", "x\x00y", SentimentClass(1))], tmp_path / "c.csv", "csv")


def test_jsonl_line_separator_inside_text(tmp_path):
    items = [LabeledTweet("a", "one\u2028two\x85three", SentimentClass(1))]
    p = tmp_path / "c.jsonl"
    save_corpus(items, p)
    assert list(load_corpus(p)) == items
