"""One literal syntax for words over every compiled alphabet.

Letters are semicolon-separated.  A letter is a proposition set ``{p,q}``
(``{}`` for the empty letter), a state-action pair ``(q1,inc1)``, or a bare
token such as an ILP index.  Set and pair letters are normalised (sorted
props, no spaces) so parsed words match model alphabets exactly.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

from .errors import InputFormatError

_ATOM = re.compile(r"[a-z][a-z0-9_]*\Z")
_BARE = re.compile(r"[A-Za-z0-9_]+\Z")


def set_symbol(letter: Iterable[str]) -> str:
    """Canonical string for a 2^P letter: sorted props in braces."""
    return "{" + ",".join(sorted(letter)) + "}"


def symbol_set(symbol: str) -> frozenset:
    if not (symbol.startswith("{") and symbol.endswith("}")):
        raise InputFormatError(f"not a set letter: {symbol!r}")
    body = symbol[1:-1].strip()
    if not body:
        return frozenset()
    props = [p.strip() for p in body.split(",")]
    for p in props:
        if not _ATOM.match(p):
            raise InputFormatError(f"bad proposition name {p!r} in {symbol!r}")
    return frozenset(props)


def pair_symbol(state: str, action: str) -> str:
    return f"({state},{action})"


def symbol_pair(symbol: str) -> tuple[str, str]:
    if not (symbol.startswith("(") and symbol.endswith(")")):
        raise InputFormatError(f"not a pair letter: {symbol!r}")
    parts = [p.strip() for p in symbol[1:-1].split(",")]
    if len(parts) != 2 or not all(parts):
        raise InputFormatError(f"bad pair letter: {symbol!r}")
    return parts[0], parts[1]


def _normalise(letter: str) -> str:
    letter = letter.strip()
    if not letter:
        raise InputFormatError("empty letter in word literal")
    if letter.startswith("{"):
        return set_symbol(symbol_set(letter))
    if letter.startswith("("):
        return pair_symbol(*symbol_pair(letter))
    if not _BARE.match(letter):
        raise InputFormatError(f"bad letter {letter!r}")
    return letter


def parse_word(text: str) -> list[str]:
    """Parse a word literal into canonical symbol strings; '' is the empty
    word (whose evaluation is undefined, callers must handle it)."""
    text = text.strip()
    if not text:
        return []
    return [_normalise(part) for part in text.split(";")]


def format_word(symbols: Sequence[str]) -> str:
    return ";".join(symbols)


def parse_trace(text: str) -> tuple[frozenset, ...]:
    """Parse a trace literal (set letters only) for the LTL oracle."""
    word = parse_word(text)
    return tuple(symbol_set(s) for s in word)
