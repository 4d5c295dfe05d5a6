import re
from functools import reduce

import pytest
from hypothesis import given, settings, strategies as st

from conftest import golden_pairs
from stumpspeech.normalize import (
    PLACEHOLDERS,
    RULE_ORDER,
    RULES,
    apply_rule,
    normalize,
)

GOLDEN = golden_pairs()


def test_golden_suite_size():
    assert len(GOLDEN) >= 40


@pytest.mark.parametrize("raw, expected", GOLDEN, ids=[f"g{i:02d}" for i in range(len(GOLDEN))])
def test_golden(raw, expected):
    assert normalize(raw).encode("utf-8") == expected.encode("utf-8")


@pytest.mark.parametrize("raw, expected", [
    ("", ""),
    ("HELLO   World ", "hello world"),
    ("RT @modi_fan Vote! Visit https://aap.in or mail help@aap.in ₹500 off",
     "vote visit urladdr or mail emailaddr moneysymb numbr off"),
    ("#DelhiPolls", "delhipolls"),
    ("art and Rt stay", "art and rt stay"),
    ("call +91 98765 43210 now", "call numbr numbr numbr now"),
    ("call +91 9876543210 now", "call now"),
    ("मोदी जी की जय!", "मोदी जी की जय"),
])
def test_examples(raw, expected):
    assert normalize(raw) == expected


def test_rule_examples():
    assert apply_rule("strip_username", "@abc hi @d_e") == " hi "
    assert apply_rule("replace_number", "12 cats") == "numbr cats"
    assert apply_rule("replace_number", "a12b") == "a numbr b"
    assert apply_rule("replace_currency", "₹500") == "moneysymb 500"
    assert apply_rule("lowercase", "numbr") == "numbr"


def test_unknown_rule():
    with pytest.raises(ValueError, match="unknown"):
        apply_rule("stem", "x")


def test_rule_order_is_fixed():
    assert RULE_ORDER == (
        "strip_retweet", "strip_username", "replace_email", "replace_url", "replace_currency",
        "strip_phone", "replace_number", "strip_punctuation", "collapse_whitespace", "lowercase")
    assert set(RULES) == set(RULE_ORDER)


def _fold(text):
    return reduce(lambda t, r: apply_rule(r, t), RULE_ORDER, text)


@pytest.mark.parametrize("raw", [r for r, _ in GOLDEN])
def test_composition_on_golden(raw):
    assert _fold(raw) == normalize(raw)


# text biased towards the characters the rules care about
_ALPHABET = st.sampled_from(list("aZ9 @#$₹.:/-_+\t\nRTwhtps") + ["http://", "www.", "RT", "@x",
                                                                 "a@b.in", "१२", "क", "ी", " "])
tweetish = st.lists(_ALPHABET, max_size=30).map("".join)
any_text = st.text(st.characters(blacklist_categories=("Cs",)), max_size=60)


@given(st.one_of(tweetish, any_text))
def test_composition_random(text):
    assert _fold(text) == normalize(text)


@settings(max_examples=500)
@given(st.one_of(tweetish, any_text))
def test_idempotent(text):
    once = normalize(text)
    assert normalize(once) == once


@settings(max_examples=500)
@given(st.one_of(tweetish, any_text))
def test_output_shape(text):
    out = normalize(text)
    assert not re.search(r"\d", out)
    assert out == out.strip(" ")
    assert "  " not in out
    assert not re.search(r"[^\S ]", out)  # the only whitespace is a plain space
    assert out == out.lower()


@pytest.mark.parametrize("placeholder", PLACEHOLDERS)
@pytest.mark.parametrize("rule", RULE_ORDER)
def test_placeholders_stable(placeholder, rule):
    text = f"x {placeholder} y"
    assert placeholder in apply_rule(rule, text).split()


def test_adjacent_replacements_do_not_fuse():
    assert normalize("$5") == "moneysymb numbr"
    assert normalize("a@b.in,http://x.y") == "emailaddr urladdr"
