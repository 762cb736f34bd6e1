"""Emoticon-aware tokenizer for noisy wall-post text, plus content pruning.

Scan order at each position decides ties: EMOTICON > URL > MENTION > NUMBER >
WORD > PUNCT. Emoticons are matched verbatim (case-sensitive, longest entry
first) against the raw text before any punctuation splitting, otherwise
":-)" falls apart into junk punctuation. Words are case-folded; everything
else keeps its surface as written.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator


class TokenKind(Enum):
    WORD = "word"
    EMOTICON = "emoticon"
    URL = "url"
    MENTION = "mention"
    NUMBER = "number"
    PUNCT = "punct"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    surface: str
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ValueError("token span must be non-empty")

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


# URL: scheme or leading www. up to the next whitespace. MENTION: @ then up
# to 50 of letters/digits/./_. NUMBER: digit runs with internal , or .
# WORD: unicode letters with internal apostrophe or hyphen. PUNCT: any
# single leftover non-space character, one char at a time so an emoticon
# right after punctuation still gets its own scan position.
_URL = r"(?i:https?://|www\.)\S*"
_MENTION = r"@[\w.]{1,50}"
_NUMBER = r"\d+(?:[.,]\d+)*"
_WORD = r"[^\W\d_]+(?:['\-][^\W\d_]+)*"
_PUNCT = r"\S"


class EmoticonTable:
    """Ordered verbatim emoticon strings, longest first so ":-(" can never
    be shadowed by ":(" at the same position."""

    def __init__(self, emoticons: Iterable[str]):
        entries = list(emoticons)
        for entry in entries:
            if not isinstance(entry, str) or not entry:
                raise ValueError("emoticon table entries must be non-empty strings")
            if entry != entry.strip():
                raise ValueError(f"emoticon entry has surrounding whitespace: {entry!r}")
        if len(set(entries)) != len(entries):
            raise ValueError("duplicate emoticon table entry")
        self.entries: tuple[str, ...] = tuple(sorted(entries, key=lambda e: (-len(e), e)))
        self._scanner = _compile_scanner(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, surface: str) -> bool:
        return surface in self.entries

    def scan(self, text: str) -> Iterator[re.Match]:
        return self._scanner.finditer(text)


def _compile_scanner(emoticons: tuple[str, ...]) -> re.Pattern:
    branches = ["(?P<WS>\\s+)"]
    if emoticons:
        branches.append("(?P<EMOTICON>%s)" % "|".join(re.escape(e) for e in emoticons))
    branches += [
        f"(?P<URL>{_URL})",
        f"(?P<MENTION>{_MENTION})",
        f"(?P<NUMBER>{_NUMBER})",
        f"(?P<WORD>{_WORD})",
        f"(?P<PUNCT>{_PUNCT})",
    ]
    return re.compile("|".join(branches))


def normalize_text(text: str) -> str:
    """NFC normalization applied before scanning; spans index this form."""
    return unicodedata.normalize("NFC", text)


def tokenize(text: str, table: EmoticonTable) -> list[Token]:
    """Scan text left to right into typed tokens.

    Total function: every non-whitespace character of the normalized text
    lands in exactly one token span.
    """
    norm = normalize_text(text)
    tokens: list[Token] = []
    for m in table.scan(norm):
        kind = m.lastgroup
        if kind == "WS":
            continue
        surface = m.group()
        if kind == "WORD":
            surface = surface.casefold()
        tokens.append(Token(TokenKind[kind], surface, m.start(), m.end()))
    return tokens


ARTICLES = frozenset({"a", "an", "the"})

_PRUNED_KINDS = frozenset({TokenKind.URL, TokenKind.MENTION, TokenKind.PUNCT})


def prune(tokens: Iterable[Token]) -> list[Token]:
    """Drop URLs, mentions, punctuation, and bare articles; keep order."""
    return [
        t
        for t in tokens
        if t.kind not in _PRUNED_KINDS
        and not (t.kind is TokenKind.WORD and t.surface in ARTICLES)
    ]
