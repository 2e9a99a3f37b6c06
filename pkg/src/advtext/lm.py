"""ARPA n-gram language model loading and fluency scoring.

Scores are log10 probabilities with standard backoff semantics: a missing
n-gram falls back to the shortened context, adding the backoff weight of
the longer context when one is present. Unknown words hit the <unk>
unigram if the model defines it, otherwise a fixed floor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CountMismatch, EmptyList, MalformedArpa, NotAWord
from .text import Document

BOS = "<s>"
UNK = "<unk>"
DEFAULT_UNK_LOGPROB = -7.0


@dataclass
class NGramModel:
    """Backoff tables keyed by word tuple, one dict per n-gram order."""

    order: int
    logprob: dict[tuple[str, ...], float]
    backoff: dict[tuple[str, ...], float]
    unk_floor: float = DEFAULT_UNK_LOGPROB

    @property
    def unk_logprob(self) -> float:
        return self.logprob.get((UNK,), self.unk_floor)


def load_arpa(path: str | Path, unk_logprob: float = DEFAULT_UNK_LOGPROB) -> NGramModel:
    """Parse an ARPA file.

    Raises MalformedArpa when the \\data\\ header, section markers, the
    \\end\\ marker, or an entry row is broken (including a backoff weight
    on a max-order row), and CountMismatch when a section size disagrees
    with the header.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    it = iter(enumerate(lines, start=1))

    for _, line in it:
        if line.strip() == "\\data\\":
            break
    else:
        raise MalformedArpa(f"{path}: missing \\data\\ section")

    declared: dict[int, int] = {}
    for no, line in it:
        text = line.strip()
        if not text:
            continue
        if text.startswith("\\"):
            section_header = (no, text)
            break
        if not text.startswith("ngram"):
            raise MalformedArpa(f"{path}:{no}: expected 'ngram N=count', got {text!r}")
        try:
            n, count = text[len("ngram"):].strip().split("=")
            declared[int(n)] = int(count)
        except ValueError:
            raise MalformedArpa(f"{path}:{no}: bad count line {text!r}") from None
    else:
        raise MalformedArpa(f"{path}: no sections after \\data\\")
    if not declared:
        raise MalformedArpa(f"{path}: \\data\\ declares no n-gram counts")

    order = max(n for n, c in declared.items() if c > 0)
    logprob: dict[tuple[str, ...], float] = {}
    backoff: dict[tuple[str, ...], float] = {}
    parsed = {n: 0 for n in declared}
    current: int | None = None
    ended = False

    def open_section(no: int, text: str) -> int:
        if not (text.startswith("\\") and text.endswith("-grams:")):
            raise MalformedArpa(f"{path}:{no}: unexpected marker {text!r}")
        try:
            n = int(text[1:].split("-")[0])
        except ValueError:
            raise MalformedArpa(f"{path}:{no}: unexpected marker {text!r}") from None
        if n not in declared:
            raise MalformedArpa(f"{path}:{no}: section {n} was not declared")
        return n

    current = open_section(*section_header)
    for no, line in it:
        text = line.strip()
        if not text:
            continue
        if text == "\\end\\":
            ended = True
            break
        if text.startswith("\\"):
            current = open_section(no, text)
            continue
        parts = text.split()
        n = current
        if len(parts) == n + 1:
            bow = None
        elif len(parts) == n + 2:
            bow = parts[-1]
        else:
            raise MalformedArpa(f"{path}:{no}: {n}-gram row has {len(parts)} fields")
        try:
            lp = float(parts[0])
            bw = float(bow) if bow is not None else None
        except ValueError:
            raise MalformedArpa(f"{path}:{no}: non-numeric weight in {text!r}") from None
        if bw is not None and n == order:
            raise MalformedArpa(f"{path}:{no}: backoff weight on a max-order row")
        key = tuple(parts[1 : n + 1])
        logprob[key] = lp
        if bw is not None:
            backoff[key] = bw
        parsed[n] += 1

    if not ended:
        raise MalformedArpa(f"{path}: missing \\end\\ marker")
    for n, want in declared.items():
        if parsed[n] != want:
            raise CountMismatch(f"{path}: {n}-grams declare {want} entries, parsed {parsed[n]}")
    return NGramModel(order=order, logprob=logprob, backoff=backoff, unk_floor=unk_logprob)


def word_logprob(lm: NGramModel, context: Sequence[str], word: str) -> float:
    """log10 P(word | context) with backoff; never above 0.

    Context longer than order-1 is truncated to the most recent words.
    """
    ctx = tuple(context)[max(0, len(context) - (lm.order - 1)):]
    return min(0.0, _backoff_logprob(lm, ctx, word))


def _backoff_logprob(lm: NGramModel, ctx: tuple[str, ...], word: str) -> float:
    if not ctx:
        hit = lm.logprob.get((word,))
        return hit if hit is not None else lm.unk_logprob
    hit = lm.logprob.get(ctx + (word,))
    if hit is not None:
        return hit
    return lm.backoff.get(ctx, 0.0) + _backoff_logprob(lm, ctx[1:], word)


def position_score(lm: NGramModel, doc: Document, pos: int, candidate: str) -> float:
    """Fluency of candidate at word position pos.

    Sums word_logprob over every n-gram window that covers pos with the
    candidate substituted, so both the left and right context weigh in.
    The sentence start is padded with <s>; there is no end padding.
    """
    if pos < 0 or pos >= len(doc.tokens) or not doc.tokens[pos].is_word:
        raise NotAWord(f"position {pos} is not a word")
    words = []
    wi = -1
    for i, tok in enumerate(doc.tokens):
        if tok.is_word:
            words.append(tok.norm)
            if i == pos:
                wi = len(words) - 1
    words[wi] = candidate.casefold()
    padded = [BOS] * (lm.order - 1) + words
    total = 0.0
    for t in range(wi, min(len(words), wi + lm.order)):
        ctx = padded[t : t + lm.order - 1]
        total += word_logprob(lm, ctx, words[t])
    return total


def normalize_candidates(raw: Sequence[float]) -> list[float]:
    """Min-max normalize raw scores to [0, 1].

    All-equal inputs (including a single candidate) map to 1.0 so the
    best candidate always scores exactly 1.0.
    """
    if len(raw) == 0:
        raise EmptyList("no candidate scores to normalize")
    arr = np.asarray(raw, dtype=float)
    lo, hi = float(arr.min()), float(arr.max())
    if hi == lo:
        return [1.0] * len(arr)
    return [float(x) for x in (arr - lo) / (hi - lo)]
