"""Shared tokenizer used by every metric and by tag-coverage checks.

Rules: lowercase, delete apostrophes (joining the halves, so "don't" becomes
"dont"), replace every other non-alphanumeric character with a space, and
split on whitespace. Hyphenated words therefore split ("analog-sounding" ->
["analog", "sounding"]).
"""

import re

_APOSTROPHES = ("'", "’")
_NON_ALNUM = re.compile(r"[^a-z0-9]+")


def tokenize(text: str) -> list[str]:
    t = text.lower()
    for ch in _APOSTROPHES:
        t = t.replace(ch, "")
    return _NON_ALNUM.sub(" ", t).split()
