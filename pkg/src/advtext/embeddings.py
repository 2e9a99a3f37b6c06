"""Word embedding store with thresholded nearest-neighbor lookup.

The file format is a plain text matrix: a "V D" header line followed by V
rows of "word x1 .. xD". Neighbor queries are an exact linear scan over
the vocabulary; stores here are desk scale, so there is no index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import DimensionMismatch, DuplicateWord, MalformedHeader, OutOfVocabulary

METRICS = ("euclidean", "cosine")


@dataclass(frozen=True)
class Neighbor:
    word: str
    distance: float


@dataclass
class EmbeddingStore:
    """Vectors plus the filter sets consulted during neighbor lookup."""

    dim: int
    vectors: dict[str, np.ndarray]
    stop_words: frozenset[str] = frozenset()
    antonyms: Mapping[str, frozenset[str]] = field(default_factory=dict)
    stop_case_sensitive: bool = False
    metric: str = "euclidean"

    def __post_init__(self) -> None:
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {self.metric!r}")
        self._words = list(self.vectors)
        self._matrix = (
            np.stack([self.vectors[w] for w in self._words])
            if self._words
            else np.zeros((0, self.dim))
        )
        self._stop_folded = frozenset(w.casefold() for w in self.stop_words)

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def is_stop(self, word: str) -> bool:
        """Stop-list membership, honoring the case-sensitivity setting.

        The case-insensitive default means a sentence-initial "It" is
        still recognized as the stop word "it"; the case-sensitive mode
        exists to reproduce setups that miss capitalized stop words.
        """
        if self.stop_case_sensitive:
            return word in self.stop_words
        return word.casefold() in self._stop_folded

    def distances_from(self, vec: np.ndarray) -> np.ndarray:
        if self.metric == "cosine":
            norms = np.linalg.norm(self._matrix, axis=1) * np.linalg.norm(vec)
            norms[norms == 0.0] = 1.0
            return 1.0 - (self._matrix @ vec) / norms
        return np.linalg.norm(self._matrix - vec, axis=1)

    def distance(self, a: str, b: str) -> float:
        va, vb = self.vectors.get(a), self.vectors.get(b)
        if va is None or vb is None:
            missing = a if va is None else b
            raise OutOfVocabulary(f"no vector for {missing!r}")
        if self.metric == "cosine":
            denom = np.linalg.norm(va) * np.linalg.norm(vb)
            return float(1.0 - (va @ vb) / denom) if denom else 1.0
        return float(np.linalg.norm(va - vb))


def load_stopwords(path: str | Path) -> frozenset[str]:
    """One word per line; blank lines and leading/trailing space ignored."""
    out = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.strip()
        if word:
            out.add(word)
    return frozenset(out)


def load_antonyms(path: str | Path) -> dict[str, frozenset[str]]:
    """TSV of word<TAB>comma-separated antonyms, applied symmetrically."""
    pairs: dict[str, set[str]] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        word, _, rest = line.partition("\t")
        word = word.strip()
        for other in rest.split(","):
            other = other.strip()
            if not other:
                continue
            pairs.setdefault(word, set()).add(other)
            pairs.setdefault(other, set()).add(word)
    return {w: frozenset(s) for w, s in pairs.items()}


def load_embeddings(
    path: str | Path,
    stop_words: Iterable[str] = (),
    antonyms: Mapping[str, frozenset[str]] | None = None,
    stop_case_sensitive: bool = False,
    metric: str = "euclidean",
) -> EmbeddingStore:
    """Read a "V D" header plus V vector rows into an EmbeddingStore."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    body = [ln for ln in lines if ln.strip()]
    if not body:
        raise MalformedHeader(f"{path}: empty embedding file")
    header = body[0].split()
    if len(header) != 2:
        raise MalformedHeader(f"{path}: header must be 'V D', got {body[0]!r}")
    try:
        count, dim = int(header[0]), int(header[1])
    except ValueError:
        raise MalformedHeader(f"{path}: non-integer header {body[0]!r}") from None
    if count < 0 or dim <= 0:
        raise MalformedHeader(f"{path}: bad sizes in header {body[0]!r}")
    if len(body) - 1 != count:
        raise MalformedHeader(f"{path}: header declares {count} rows, file has {len(body) - 1}")

    vectors: dict[str, np.ndarray] = {}
    for ln in body[1:]:
        parts = ln.split()
        word = parts[0]
        if len(parts) - 1 != dim:
            raise DimensionMismatch(f"{path}: {word!r} has {len(parts) - 1} components, want {dim}")
        if word in vectors:
            raise DuplicateWord(f"{path}: duplicate entry {word!r}")
        vectors[word] = np.array([float(x) for x in parts[1:]])
    return EmbeddingStore(
        dim=dim,
        vectors=vectors,
        stop_words=frozenset(stop_words),
        antonyms=antonyms or {},
        stop_case_sensitive=stop_case_sensitive,
        metric=metric,
    )


def neighbors(store: EmbeddingStore, word: str, tau: float, k: int) -> list[Neighbor]:
    """Up to k nearest in-threshold neighbors of word, ascending by distance.

    The threshold cut happens before the top-k truncation. The word itself,
    stop words, and registered antonyms of word never appear. Out-of-vocabulary
    queries return an empty list. Ties sort by word so results are stable.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    vec = store.vectors.get(word)
    if vec is None:
        return []
    blocked = store.antonyms.get(word, frozenset())
    dists = store.distances_from(vec)
    found: list[Neighbor] = []
    for idx in np.flatnonzero(dists <= tau):
        cand = store._words[idx]
        if cand == word or cand in blocked or store.is_stop(cand):
            continue
        found.append(Neighbor(cand, float(dists[idx])))
    found.sort(key=lambda n: (n.distance, n.word))
    return found[:k]


def similarity(store: EmbeddingStore, a: str, b: str) -> float:
    """1 / (1 + distance), in (0, 1] and 1.0 only for identical vectors."""
    return 1.0 / (1.0 + store.distance(a, b))
