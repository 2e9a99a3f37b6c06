"""Classifier gateway: builtin lexicon scorers and a remote HTTP client.

Every classifier exposes score(text) -> ScoreResult with a score in
[-1, 1] (negative to positive) and a running query index. Query counting
is atomic and budget enforcement is a race-free check-and-increment, so
an attack's query accounting is exact even with concurrent evaluation.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import httpx

from .errors import (
    InvalidConfig,
    InvalidRemoteScore,
    QueryBudgetExhausted,
    RemoteUnavailable,
)
from .text import tokenize

NEGATORS = frozenset({"not", "no", "never"})
NEGATION_WINDOW = 3
AUTH_ENV_VAR = "ADVTEXT_AUTH_HEADER"


def _is_negator(norm: str) -> bool:
    # "n't" rides inside contraction tokens (don't, isn't), so match the suffix
    return norm in NEGATORS or norm.endswith("n't")


@dataclass(frozen=True)
class ScoreResult:
    score: float
    query_index: int


class Classifier:
    """Base class handling budgets and the query counter."""

    kind = "base"

    def __init__(self, budget: int | None = None):
        if budget is not None and budget < 0:
            raise ValueError(f"budget must be non-negative, got {budget}")
        self._budget = budget
        self._count = 0
        self._lock = threading.Lock()

    @property
    def query_index(self) -> int:
        return self._count

    def remaining_budget(self) -> int | None:
        if self._budget is None:
            return None
        return max(0, self._budget - self._count)

    def score(self, text: str) -> ScoreResult:
        with self._lock:
            if self._budget is not None and self._count >= self._budget:
                raise QueryBudgetExhausted(f"budget of {self._budget} queries spent")
            self._count += 1
            index = self._count
        return ScoreResult(self._score_text(text), index)

    def restore_query_count(self, count: int) -> None:
        """Fast-forward the counter when a persisted session reloads."""
        with self._lock:
            self._count = max(self._count, int(count))

    def _score_text(self, text: str) -> float:
        raise NotImplementedError


class LexiconClassifier(Classifier):
    """Mean valence of lexicon hits, with a short negation window.

    A hit's valence flips sign when any of the preceding NEGATION_WINDOW
    word tokens is a negator. No hits at all score 0.0 (neutral).
    """

    kind = "builtin-lexicon"

    def __init__(self, lexicon: Mapping[str, float], budget: int | None = None):
        super().__init__(budget)
        self.lexicon = dict(lexicon)

    def _lookup(self, norm: str) -> float | None:
        return self.lexicon.get(norm)

    def _score_text(self, text: str) -> float:
        norms = tokenize(text).words()
        hits: list[float] = []
        for i, norm in enumerate(norms):
            valence = self._lookup(norm)
            if valence is None:
                continue
            window = norms[max(0, i - NEGATION_WINDOW) : i]
            if any(_is_negator(w) for w in window):
                valence = -valence
            hits.append(valence)
        if not hits:
            return 0.0
        return max(-1.0, min(1.0, sum(hits) / len(hits)))


class HardenedLexiconClassifier(LexiconClassifier):
    """Lexicon scorer that canonicalizes words to cluster ids first.

    Swapping a word for another member of its cluster cannot move the
    score, which makes this variant strictly harder to attack than the
    plain lexicon over the same vocabulary.
    """

    kind = "builtin-hardened"

    def __init__(
        self,
        lexicon: Mapping[str, float],
        clusters: Mapping[str, str],
        budget: int | None = None,
    ):
        super().__init__(lexicon, budget)
        self.clusters = dict(clusters)

    def _lookup(self, norm: str) -> float | None:
        return self.lexicon.get(self.clusters.get(norm, norm))


class RemoteClassifier(Classifier):
    """POSTs {"text": ...} to an endpoint and expects {"score": r}.

    The score must be numeric and within [-1, 1]. An Authorization header
    is passed through from the environment when AUTH_ENV_VAR is set.
    """

    kind = "remote-http"

    def __init__(self, endpoint: str, timeout: float = 10.0, budget: int | None = None):
        super().__init__(budget)
        self.endpoint = endpoint
        self.timeout = timeout
        headers = {}
        auth = os.environ.get(AUTH_ENV_VAR)
        if auth:
            headers["Authorization"] = auth
        self._client = httpx.Client(timeout=timeout, headers=headers)

    def _score_text(self, text: str) -> float:
        try:
            resp = self._client.post(self.endpoint, json={"text": text})
        except httpx.HTTPError as exc:
            raise RemoteUnavailable(f"{self.endpoint}: {exc}") from exc
        if resp.status_code != 200:
            raise RemoteUnavailable(f"{self.endpoint}: HTTP {resp.status_code}")
        try:
            score = resp.json()["score"]
        except Exception as exc:
            raise InvalidRemoteScore(f"{self.endpoint}: unparseable body") from exc
        if isinstance(score, bool) or not isinstance(score, (int, float)):
            raise InvalidRemoteScore(f"{self.endpoint}: non-numeric score {score!r}")
        if not -1.0 <= float(score) <= 1.0:
            raise InvalidRemoteScore(f"{self.endpoint}: score {score} outside [-1, 1]")
        return float(score)

    def close(self) -> None:
        self._client.close()


def make_classifier(
    ref: Mapping,
    lexicon: Mapping[str, float],
    clusters: Mapping[str, str] | None = None,
) -> Classifier:
    """Build a classifier from a reference dict.

    The reference carries kind ("lexicon", "hardened", or "remote"), a
    url for remote classifiers, and an optional query budget.
    """
    kind = ref.get("kind", "lexicon")
    budget = ref.get("budget")
    if budget is not None and (isinstance(budget, bool) or not isinstance(budget, int)):
        raise InvalidConfig(f"budget must be an integer, got {budget!r}")
    if kind == "lexicon":
        return LexiconClassifier(lexicon, budget=budget)
    if kind == "hardened":
        return HardenedLexiconClassifier(lexicon, clusters or {}, budget=budget)
    if kind == "remote":
        url = ref.get("url")
        if not url:
            raise InvalidConfig("remote classifier needs a url")
        return RemoteClassifier(url, budget=budget)
    raise InvalidConfig(f"unknown classifier kind {kind!r}")


def load_lexicon(path: str | Path) -> dict[str, float]:
    """TSV of word<TAB>valence with valences inside [-1, 1]."""
    out: dict[str, float] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        word, _, value = line.partition("\t")
        valence = float(value)
        if not -1.0 <= valence <= 1.0:
            raise ValueError(f"{path}: valence for {word!r} outside [-1, 1]")
        out[word.strip()] = valence
    return out


def load_clusters(path: str | Path) -> dict[str, str]:
    """TSV of word<TAB>cluster id."""
    out: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        word, _, cluster = line.partition("\t")
        out[word.strip()] = cluster.strip()
    return out
