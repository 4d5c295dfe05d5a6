"""Tweet cleaning.

Ten rules run in a fixed order.  A placeholder gets a space on each side
that would otherwise touch a non-space character, so adjacent tokens never
fuse; deletions emit nothing.  The final two rules collapse whitespace and lowercase.
"""

from __future__ import annotations

import re
import unicodedata
from typing import Callable

EMAIL = "emailaddr"
URL = "urladdr"
CURRENCY = "moneysymb"
NUMBER = "numbr"

PLACEHOLDERS = (EMAIL, URL, CURRENCY, NUMBER)

CURRENCY_SYMBOLS = "$€£₹¥"

_RETWEET = re.compile(r"(?<!\S)RT(?!\S)")
# the left guard keeps the local part of an e-mail address intact
_USERNAME = re.compile(r"(?<!\w)@\w+")
_EMAIL = re.compile(r"[\w.+-]+@[\w-]+(?:\.[\w-]+)+")
_URL = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_CURRENCY = re.compile(f"[{re.escape(CURRENCY_SYMBOLS)}]")
# optional +country code, then 10-13 digits with optional - or . between digits
_PHONE = re.compile(r"(?<![\w+])(?:\+\d{1,3}[ -]?)?\d(?:[-.]?\d){9,12}(?!\w)")
_DIGITS = re.compile(r"\d+")
_WHITESPACE = re.compile(r"\s+")


def _padded(placeholder: str):
    def sub(m: re.Match) -> str:
        s, start, end = m.string, m.start(), m.end()
        left = " " if start > 0 and not s[start - 1].isspace() else ""
        right = " " if end < len(s) and not s[end].isspace() else ""
        return f"{left}{placeholder}{right}"
    return sub


def strip_retweet(text: str) -> str:
    return _RETWEET.sub("", text)


def strip_username(text: str) -> str:
    return _USERNAME.sub("", text)


def replace_email(text: str) -> str:
    return _EMAIL.sub(_padded(EMAIL), text)


def replace_url(text: str) -> str:
    return _URL.sub(_padded(URL), text)


def replace_currency(text: str) -> str:
    return _CURRENCY.sub(_padded(CURRENCY), text)


def strip_phone(text: str) -> str:
    return _PHONE.sub("", text)


def replace_number(text: str) -> str:
    return _DIGITS.sub(_padded(NUMBER), text)


def _keep(ch: str) -> bool:
    # letters, combining marks (Devanagari vowel signs), decimal digits, spaces
    cat = unicodedata.category(ch)
    return cat[0] in "LM" or cat == "Nd" or ch.isspace()


def strip_punctuation(text: str) -> str:
    return "".join(ch for ch in text if _keep(ch))


def collapse_whitespace(text: str) -> str:
    return _WHITESPACE.sub(" ", text).strip(" ")


def lowercase(text: str) -> str:
    return text.lower()


RULES: dict[str, Callable[[str], str]] = {
    "strip_retweet": strip_retweet,
    "strip_username": strip_username,
    "replace_email": replace_email,
    "replace_url": replace_url,
    "replace_currency": replace_currency,
    "strip_phone": strip_phone,
    "replace_number": replace_number,
    "strip_punctuation": strip_punctuation,
    "collapse_whitespace": collapse_whitespace,
    "lowercase": lowercase,
}

RULE_ORDER = tuple(RULES)


def apply_rule(rule: str, text: str) -> str:
    try:
        fn = RULES[rule]
    except KeyError:
        raise ValueError(f"unknown normalization rule {rule!r}") from None
    return fn(text)


def normalize(text: str) -> str:
    for fn in RULES.values():
        text = fn(text)
    return text
