"""Derived views over documents and attacks.

Everything the workbench surfaces beyond raw scores lives here: the three
per-token encodings, the candidate scatter records, word mover's distance,
the append-only snapshot log with revert-as-event, and the adversary
summary score.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable

import numpy as np
from scipy.optimize import linprog

from .classifiers import Classifier
from .embeddings import EmbeddingStore, neighbors, similarity
from .errors import (
    LockedPosition,
    NoEmbeddableContent,
    NotAWord,
    ShapeMismatch,
    UnknownSnapshot,
)
from .lm import NGramModel, normalize_candidates, position_score
from .text import Document, Token, apply_swap


def eligible_positions(doc: Document, store: EmbeddingStore, tau: float) -> tuple[list[int], list[int]]:
    """Word positions open to mutation, with their in-threshold neighbor counts.

    Eligible means: a word token, unlocked, not a stop word, and at least
    one neighbor within tau. This is the single source of truth for both
    position sampling and the selection encoding.
    """
    cap = max(1, len(store.vectors))
    positions, counts = [], []
    for pos in doc.word_positions():
        tok = doc.tokens[pos]
        if pos in doc.locks or store.is_stop(tok.surface):
            continue
        found = neighbors(store, tok.norm, tau, cap)
        if found:
            positions.append(pos)
            counts.append(len(found))
    return positions, counts


def swap_count(original: Document, current: Document) -> int:
    """Word positions whose surface differs from the original."""
    if len(original.tokens) != len(current.tokens):
        raise ShapeMismatch("documents disagree on token count")
    return sum(
        1
        for a, b in zip(original.tokens, current.tokens)
        if a.is_word and a.surface != b.surface
    )


# ---------------------------------------------------------------------------
# per-token encodings

@dataclass(frozen=True)
class TokenEncodings:
    """Per-position visual channels, zero at ineligible positions."""

    influence: tuple[float, ...]
    selection_prob: tuple[float, ...]
    lm_score: tuple[float, ...]


def influence_encoding(
    doc: Document, classifier: Classifier, store: EmbeddingStore, tau: float
) -> list[float]:
    """Score shift caused by swapping each word for its nearest neighbor.

    Costs one baseline query plus one query per eligible word. Ineligible
    positions stay at 0.0.
    """
    out = [0.0] * len(doc.tokens)
    positions, _ = eligible_positions(doc, store, tau)
    if not positions:
        return out
    base = classifier.score(doc.text).score
    for pos in positions:
        nearest = neighbors(store, doc.tokens[pos].norm, tau, 1)[0]
        swapped = apply_swap(doc, pos, nearest.word, allow_locked=True)
        out[pos] = classifier.score(swapped.text).score - base
    return out


def selection_encoding(doc: Document, store: EmbeddingStore, tau: float) -> list[float]:
    """Probability of each position being picked for mutation.

    Matches select_position's sampling distribution exactly; sums to 1
    over eligible positions and is 0 elsewhere.
    """
    out = [0.0] * len(doc.tokens)
    positions, counts = eligible_positions(doc, store, tau)
    total = sum(counts)
    for pos, count in zip(positions, counts):
        out[pos] = count / total
    return out


def semantic_encoding(doc: Document, lm: NGramModel) -> list[float]:
    """Language-model fit of each word in place, min-max normalized
    across the document. A single word, or all-equal raw scores, all map
    to 1.0. Non-word positions stay at 0.0."""
    out = [0.0] * len(doc.tokens)
    positions = doc.word_positions()
    if not positions:
        return out
    raw = [position_score(lm, doc, pos, doc.tokens[pos].norm) for pos in positions]
    for pos, value in zip(positions, normalize_candidates(raw)):
        out[pos] = value
    return out


def compute_encodings(
    doc: Document,
    classifier: Classifier,
    store: EmbeddingStore,
    lm: NGramModel,
    tau: float,
) -> TokenEncodings:
    return TokenEncodings(
        influence=tuple(influence_encoding(doc, classifier, store, tau)),
        selection_prob=tuple(selection_encoding(doc, store, tau)),
        lm_score=tuple(semantic_encoding(doc, lm)),
    )


# ---------------------------------------------------------------------------
# candidate scatter records

@dataclass(frozen=True)
class CandidateRecord:
    word: str
    distance: float
    similarity: float
    score_delta: float
    lm_raw: float
    lm_norm: float


def candidate_records(
    doc: Document,
    pos: int,
    classifier: Classifier,
    store: EmbeddingStore,
    lm: NGramModel,
    tau: float,
    k: int,
) -> list[CandidateRecord]:
    """One record per candidate swap at pos, nearest first.

    similarity is 1/(1+distance) to the current word, score_delta the
    classifier shift the swap would cause, and lm_norm the min-max
    normalized fluency within this candidate set (the best candidate is
    always exactly 1.0). Costs one baseline query plus one per candidate.
    """
    if pos < 0 or pos >= len(doc.tokens) or not doc.tokens[pos].is_word:
        raise NotAWord(f"position {pos} is not a word")
    if pos in doc.locks:
        raise LockedPosition(f"position {pos} is locked")
    current = doc.tokens[pos].norm
    cands = neighbors(store, current, tau, k)
    if not cands:
        return []
    base = classifier.score(doc.text).score
    raw_lm = [position_score(lm, doc, pos, c.word) for c in cands]
    norm_lm = normalize_candidates(raw_lm)
    records = []
    for cand, lm_raw, lm_norm in zip(cands, raw_lm, norm_lm):
        swapped = apply_swap(doc, pos, cand.word)
        delta = classifier.score(swapped.text).score - base
        records.append(
            CandidateRecord(
                word=cand.word,
                distance=cand.distance,
                similarity=similarity(store, current, cand.word),
                score_delta=delta,
                lm_raw=lm_raw,
                lm_norm=lm_norm,
            )
        )
    return records


# ---------------------------------------------------------------------------
# word mover's distance

def _bag(doc: Document, store: EmbeddingStore) -> tuple[list[str], np.ndarray]:
    counts: dict[str, int] = {}
    for norm in doc.words():
        if norm in store.vectors and not store.is_stop(norm):
            counts[norm] = counts.get(norm, 0) + 1
    words = sorted(counts)
    weights = np.asarray([counts[w] for w in words], dtype=float)
    if not words:
        return words, weights
    return words, weights / weights.sum()


def wmd(a: Document, b: Document, store: EmbeddingStore, method: str = "exact") -> float:
    """Word mover's distance between two documents.

    Bags are normalized counts over in-vocabulary non-stop word types and
    transport cost is embedding distance. The exact method solves the
    transportation LP; "relaxed" returns the standard lower bound (each
    side's mass flows to its nearest counterpart, take the max) for use
    on long documents.
    """
    wa, pa = _bag(a, store)
    wb, pb = _bag(b, store)
    if not wa or not wb:
        raise NoEmbeddableContent("both documents need an embeddable non-stop word")
    if wa == wb and np.array_equal(pa, pb):
        return 0.0
    cost = np.array([[store.distance(x, y) for y in wb] for x in wa])
    if method == "relaxed":
        return float(max(pa @ cost.min(axis=1), pb @ cost.min(axis=0)))
    if method != "exact":
        raise ValueError(f"unknown wmd method {method!r}")
    m, n = cost.shape
    a_eq = np.zeros((m + n - 1, m * n))
    b_eq = np.zeros(m + n - 1)
    for i in range(m):
        a_eq[i, i * n : (i + 1) * n] = 1.0
        b_eq[i] = pa[i]
    # last column constraint is redundant (both marginals sum to 1), drop it
    for j in range(n - 1):
        a_eq[m + j, j::n] = 1.0
        b_eq[m + j] = pb[j]
    res = linprog(cost.ravel(), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:
        raise RuntimeError(f"transport solve failed: {res.message}")
    return float(res.fun)


# ---------------------------------------------------------------------------
# snapshot log

@dataclass(frozen=True)
class Snapshot:
    seq: int
    timestamp: str
    description: str
    doc: Document
    score: float
    swap_count: int
    wmd: float


@dataclass
class SnapshotLog:
    """Append-only history of document states; reverting appends."""

    snapshots: list[Snapshot] = field(default_factory=list)
    # timestamp source, swappable for reproducible logs
    clock: Callable[[], str] | None = field(default=None, compare=False, repr=False)

    @property
    def original(self) -> Document:
        return self.snapshots[0].doc

    def latest(self) -> Snapshot:
        return self.snapshots[-1]

    def _now(self) -> str:
        if self.clock is not None:
            return self.clock()
        return datetime.now(timezone.utc).isoformat()

    def record(
        self, description: str, doc: Document, score: float, store: EmbeddingStore
    ) -> Snapshot:
        if not self.snapshots:
            swaps, dist = 0, 0.0
        else:
            swaps = swap_count(self.original, doc)
            if swaps == 0 and doc.tokens == self.original.tokens:
                dist = 0.0
            else:
                try:
                    dist = wmd(self.original, doc, store)
                except NoEmbeddableContent:
                    dist = 0.0
        snap = Snapshot(
            seq=len(self.snapshots),
            timestamp=self._now(),
            description=description,
            doc=doc,
            score=score,
            swap_count=swaps,
            wmd=dist,
        )
        self.snapshots.append(snap)
        return snap

    def revert(self, seq: int) -> Document:
        """Restore the document of snapshot seq by appending a new event."""
        for snap in self.snapshots:
            if snap.seq == seq:
                target = snap
                break
        else:
            raise UnknownSnapshot(f"no snapshot with seq {seq}")
        event = Snapshot(
            seq=len(self.snapshots),
            timestamp=self._now(),
            description=f"revert to {seq}",
            doc=target.doc,
            score=target.score,
            swap_count=target.swap_count,
            wmd=target.wmd,
        )
        self.snapshots.append(event)
        return target.doc

    def to_json(self) -> str:
        return json.dumps([_snapshot_to_dict(s) for s in self.snapshots], indent=2)

    @staticmethod
    def from_json(payload: str) -> "SnapshotLog":
        return SnapshotLog([_snapshot_from_dict(d) for d in json.loads(payload)])


def _doc_to_dict(doc: Document) -> dict:
    return {
        "id": doc.id,
        "label": doc.label,
        "trailing_ws": doc.trailing_ws,
        "locks": sorted(doc.locks),
        "tokens": [
            {"surface": t.surface, "is_word": t.is_word, "leading_ws": t.leading_ws}
            for t in doc.tokens
        ],
    }


def _doc_from_dict(data: dict) -> Document:
    tokens = tuple(
        Token.make(t["surface"], t["is_word"], t["leading_ws"]) for t in data["tokens"]
    )
    return Document(
        tokens=tokens,
        locks=frozenset(data["locks"]),
        id=data.get("id"),
        label=data.get("label"),
        trailing_ws=data.get("trailing_ws", ""),
    )


def _snapshot_to_dict(snap: Snapshot) -> dict:
    return {
        "seq": snap.seq,
        "timestamp": snap.timestamp,
        "description": snap.description,
        "score": snap.score,
        "swap_count": snap.swap_count,
        "wmd": snap.wmd,
        "doc": _doc_to_dict(snap.doc),
    }


def _snapshot_from_dict(data: dict) -> Snapshot:
    return Snapshot(
        seq=data["seq"],
        timestamp=data["timestamp"],
        description=data["description"],
        doc=_doc_from_dict(data["doc"]),
        score=data["score"],
        swap_count=data["swap_count"],
        wmd=data["wmd"],
    )


def record_snapshot(
    log: SnapshotLog, description: str, doc: Document, classifier_score: float, store: EmbeddingStore
) -> Snapshot:
    return log.record(description, doc, classifier_score, store)


def revert(log: SnapshotLog, seq: int) -> Document:
    return log.revert(seq)


# ---------------------------------------------------------------------------
# adversary summary

@dataclass(frozen=True)
class AdversarySummary:
    wmd: float
    pct_original_remaining: float
    avg_swap_lm: float
    min_swap_lm: float
    summary: float


def adversary_summary(
    original: Document, adversary: Document, lm: NGramModel, store: EmbeddingStore
) -> AdversarySummary:
    """Single quality score: fraction of original words remaining times
    the average and minimum normalized fluency of the swapped-in words.

    Zero swaps count the fluency factors as 1.0, so an untouched document
    summarizes to 1.0.
    """
    if len(original.tokens) != len(adversary.tokens):
        raise ShapeMismatch("original and adversary disagree on token count")
    word_positions = original.word_positions()
    if not word_positions:
        raise ShapeMismatch("no word positions to summarize")
    swapped = [
        pos
        for pos in word_positions
        if original.tokens[pos].surface != adversary.tokens[pos].surface
    ]
    remaining = 1.0 - len(swapped) / len(word_positions)
    if swapped:
        sem = semantic_encoding(adversary, lm)
        values = [sem[pos] for pos in swapped]
        avg_lm, min_lm = float(np.mean(values)), float(min(values))
    else:
        avg_lm = min_lm = 1.0
    if adversary.tokens == original.tokens:
        dist = 0.0
    else:
        try:
            dist = wmd(original, adversary, store)
        except NoEmbeddableContent:
            dist = 0.0
    return AdversarySummary(
        wmd=dist,
        pct_original_remaining=remaining,
        avg_swap_lm=avg_lm,
        min_swap_lm=min_lm,
        summary=remaining * avg_lm * min_lm,
    )


def improvement_pct(s_orig: float, s_adv: float) -> float:
    """Classifier improvement as percentage points on the [-1, 1] scale."""
    return 100.0 * (s_adv - s_orig)
