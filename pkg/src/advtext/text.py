"""Tokenization and immutable documents.

Documents are tuples of tokens plus a lock set. Tokens keep the exact
whitespace that preceded them, so detokenize(tokenize(s)) == s for any
string and positions can be swapped without disturbing the rest of the
surface form.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field, replace

from .errors import LockedPosition, NotAWord

_CHUNK = re.compile(r"(\s*)(\S+)")


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in ("P", "S")


@dataclass(frozen=True)
class Token:
    """One surface token: a word or a punctuation run."""

    surface: str
    norm: str
    is_word: bool
    leading_ws: str = ""

    @staticmethod
    def make(surface: str, is_word: bool, leading_ws: str = "") -> "Token":
        return Token(surface, surface.casefold(), is_word, leading_ws)


@dataclass(frozen=True)
class Document:
    """An immutable tokenized text with per-position edit locks."""

    tokens: tuple[Token, ...]
    locks: frozenset[int] = field(default_factory=frozenset)
    id: str | None = None
    label: str | None = None
    trailing_ws: str = ""

    @property
    def text(self) -> str:
        return detokenize(self)

    def word_positions(self) -> list[int]:
        return [i for i, t in enumerate(self.tokens) if t.is_word]

    def words(self) -> list[str]:
        """Norms of the word tokens, in order."""
        return [t.norm for t in self.tokens if t.is_word]


def tokenize(text: str, doc_id: str | None = None, label: str | None = None) -> Document:
    """Split text into word and punctuation tokens.

    Whitespace runs attach to the following token; leading and trailing
    punctuation of each whitespace-delimited chunk becomes its own
    non-word token, while interior punctuation (contractions, hyphens)
    stays inside the word.
    """
    tokens: list[Token] = []
    end = 0
    for m in _CHUNK.finditer(text):
        ws, chunk = m.group(1), m.group(2)
        end = m.end()
        i, j = 0, len(chunk)
        while i < j and _is_punct(chunk[i]):
            i += 1
        while j > i and _is_punct(chunk[j - 1]):
            j -= 1
        parts = [(chunk[:i], False), (chunk[i:j], True), (chunk[j:], False)]
        for surface, is_word in parts:
            if not surface:
                continue
            tokens.append(Token.make(surface, is_word, ws))
            ws = ""
    return Document(tuple(tokens), frozenset(), doc_id, label, trailing_ws=text[end:])


def detokenize(doc: Document) -> str:
    return "".join(t.leading_ws + t.surface for t in doc.tokens) + doc.trailing_ws


def apply_swap(doc: Document, pos: int, replacement: str, allow_locked: bool = False) -> Document:
    """Return a copy of doc with the word at pos replaced.

    The replacement keeps the original token's leading whitespace, and an
    initial capital on the outgoing surface is replicated (ALL-CAPS and
    other patterns are not). Raises NotAWord for non-word positions and
    LockedPosition for locked ones unless allow_locked is set.
    """
    if not replacement or any(c.isspace() for c in replacement):
        raise ValueError(f"replacement must be a single word, got {replacement!r}")
    if pos < 0 or pos >= len(doc.tokens) or not doc.tokens[pos].is_word:
        raise NotAWord(f"position {pos} is not a word")
    if pos in doc.locks and not allow_locked:
        raise LockedPosition(f"position {pos} is locked")
    old = doc.tokens[pos]
    surface = replacement
    if old.surface[:1].isupper():
        surface = surface[:1].upper() + surface[1:]
    tokens = list(doc.tokens)
    tokens[pos] = Token.make(surface, True, old.leading_ws)
    return replace(doc, tokens=tuple(tokens))


def lock_positions(doc: Document, positions: tuple[int, ...] | list[int]) -> Document:
    for pos in positions:
        if pos < 0 or pos >= len(doc.tokens) or not doc.tokens[pos].is_word:
            raise NotAWord(f"position {pos} is not a word")
    return replace(doc, locks=doc.locks | frozenset(positions))
