"""Evolutionary word-swap attack engine.

A population of perturbed documents evolves toward a target classifier
score: the max-fitness individual (the elite) is carried unchanged into
every generation, parents are sampled fitness-proportionally, children
take half their words from each parent and then mutate by swapping one
word for an embedding neighbor. Runs are deterministic given a seed and
a deterministic classifier.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from . import analytics
from .classifiers import Classifier
from .embeddings import EmbeddingStore, neighbors
from .errors import InvalidConfig, NoEligiblePosition, QueryBudgetExhausted, ShapeMismatch
from .text import Document, apply_swap

POSITIVE, NEGATIVE = "positive", "negative"

REASON_SCORE = "score_threshold"
REASON_WMD = "wmd_limit"
REASON_DURATION = "duration"
REASON_ACCELERATION = "acceleration"
REASON_MAX_GENERATIONS = "max_generations"
REASON_BUDGET = "budget_exhausted"
REASON_USER = "user_stop"


@dataclass(frozen=True)
class ScoreThreshold:
    """Stop once the elite score passes theta toward the target class."""

    theta: float = 0.0


@dataclass(frozen=True)
class WmdLimit:
    """Stop once the elite drifts delta or more from the original."""

    delta: float


@dataclass(frozen=True)
class Duration:
    """Stop after the running generation once seconds have elapsed."""

    seconds: float


@dataclass(frozen=True)
class Acceleration:
    """Stop when mean elite-fitness improvement over the last window
    generations falls below epsilon."""

    epsilon: float
    window: int = 3


CompletionCondition = Union[ScoreThreshold, WmdLimit, Duration, Acceleration]


@dataclass(frozen=True)
class AttackConfig:
    generations: int = 10
    population_size: int = 20
    tau: float = 0.5
    k_neighbors: int = 8
    mutation_prob: float = 1.0
    mutation_selection: str = "greedy"
    target_direction: str = POSITIVE
    conditions: tuple[CompletionCondition, ...] = ()
    seed: int = 0

    def validate(self) -> None:
        if self.generations < 1:
            raise InvalidConfig(f"generations must be >= 1, got {self.generations}")
        if self.population_size < 2:
            raise InvalidConfig(f"population_size must be >= 2, got {self.population_size}")
        if self.tau <= 0:
            raise InvalidConfig(f"tau must be positive, got {self.tau}")
        if self.k_neighbors < 1:
            raise InvalidConfig(f"k_neighbors must be >= 1, got {self.k_neighbors}")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise InvalidConfig(f"mutation_prob must be in [0,1], got {self.mutation_prob}")
        if self.mutation_selection not in ("greedy", "random"):
            raise InvalidConfig(f"unknown mutation_selection {self.mutation_selection!r}")
        if self.target_direction not in (POSITIVE, NEGATIVE):
            raise InvalidConfig(f"unknown target_direction {self.target_direction!r}")
        for cond in self.conditions:
            if isinstance(cond, Acceleration) and cond.window < 2:
                raise InvalidConfig(f"acceleration window must be >= 2, got {cond.window}")


@dataclass(frozen=True)
class Individual:
    doc: Document
    score: float
    fitness: float


@dataclass(frozen=True)
class GenerationEvent:
    generation: int
    elite: Individual
    wmd: float
    swap_count: int
    queries: int
    elapsed: float

    def to_dict(self, include_elapsed: bool = True) -> dict:
        out = {
            "generation": self.generation,
            "score": self.elite.score,
            "fitness": self.elite.fitness,
            "text": self.elite.doc.text,
            "wmd": self.wmd,
            "swap_count": self.swap_count,
            "queries": self.queries,
        }
        if include_elapsed:
            out["elapsed"] = self.elapsed
        return out

    def to_json(self, include_elapsed: bool = True) -> str:
        return json.dumps(self.to_dict(include_elapsed), sort_keys=True)


@dataclass
class AttackResult:
    elite: Individual
    reason: str
    baseline_score: float
    generations_run: int
    queries_used: int
    events: list[GenerationEvent] = field(default_factory=list)


def fitness_of(score: float, target: str) -> float:
    """Higher is better as the score approaches the target extreme."""
    if target == POSITIVE:
        return score
    if target == NEGATIVE:
        return -score
    raise InvalidConfig(f"unknown target_direction {target!r}")


def select_position(doc: Document, store: EmbeddingStore, tau: float, rng: np.random.Generator) -> int:
    """Sample a mutable position, weighted by its neighbor count.

    Words with more in-threshold neighbors are proportionally more likely
    to be picked. Locked positions, stop words, and words with no
    neighbors are never selected.
    """
    positions, counts = analytics.eligible_positions(doc, store, tau)
    if not positions:
        raise NoEligiblePosition("no unlocked non-stop word has neighbors within tau")
    weights = np.asarray(counts, dtype=float)
    idx = rng.choice(len(positions), p=weights / weights.sum())
    return positions[int(idx)]


def mutate_document(
    doc: Document,
    classifier: Classifier,
    store: EmbeddingStore,
    config: AttackConfig,
    rng: np.random.Generator,
) -> Individual:
    """Swap one sampled position for an embedding neighbor and score it.

    Random mode draws the replacement uniformly from the k nearest
    in-threshold neighbors (one scoring query); greedy mode evaluates
    each candidate swap and keeps the max-fitness one, ties going to the
    nearest neighbor.
    """
    pos = select_position(doc, store, config.tau, rng)
    cands = neighbors(store, doc.tokens[pos].norm, config.tau, config.k_neighbors)
    if config.mutation_selection == "random":
        pick = cands[int(rng.integers(len(cands)))]
        swapped = apply_swap(doc, pos, pick.word)
        score = classifier.score(swapped.text).score
        return Individual(swapped, score, fitness_of(score, config.target_direction))
    best: Individual | None = None
    for cand in cands:
        swapped = apply_swap(doc, pos, cand.word)
        score = classifier.score(swapped.text).score
        fit = fitness_of(score, config.target_direction)
        if best is None or fit > best.fitness:
            best = Individual(swapped, score, fit)
    return best


def mutate(
    ind: Individual,
    classifier: Classifier,
    store: EmbeddingStore,
    config: AttackConfig,
    rng: np.random.Generator,
) -> Individual:
    return mutate_document(ind.doc, classifier, store, config, rng)


def crossover(a: Document, b: Document, rng: np.random.Generator) -> Document:
    """Child taking half its word positions from each parent.

    The partition is uniform over equal splits; an odd word count hands
    the extra position to either parent with equal probability. Non-word
    tokens and locked positions carry the shared value.
    """
    if len(a.tokens) != len(b.tokens):
        raise ShapeMismatch(f"token counts differ: {len(a.tokens)} vs {len(b.tokens)}")
    if a.locks != b.locks:
        raise ShapeMismatch("lock sets differ")
    word_positions = a.word_positions()
    n = len(word_positions)
    if n == 0:
        return a
    take = n // 2
    if n % 2 == 1:
        take += int(rng.integers(2))
    perm = rng.permutation(n)
    from_a = {word_positions[i] for i in perm[:take]}
    tokens = [
        a.tokens[i] if (not t.is_word or i in from_a or i in a.locks) else b.tokens[i]
        for i, t in enumerate(a.tokens)
    ]
    # locked positions are identical in both parents, taking a's copy is the shared value
    return Document(tuple(tokens), a.locks, a.id, a.label, a.trailing_ws)


class PerturbationStrategy:
    """How children are derived; word swapping is the shipped strategy."""

    def crossover(self, a: Document, b: Document, rng: np.random.Generator) -> Document:
        raise NotImplementedError

    def mutate(self, doc: Document, rng: np.random.Generator) -> Individual:
        raise NotImplementedError


class WordSwapStrategy(PerturbationStrategy):
    def __init__(self, classifier: Classifier, store: EmbeddingStore, config: AttackConfig):
        self.classifier = classifier
        self.store = store
        self.config = config

    def crossover(self, a: Document, b: Document, rng: np.random.Generator) -> Document:
        return crossover(a, b, rng)

    def mutate(self, doc: Document, rng: np.random.Generator) -> Individual:
        return mutate_document(doc, self.classifier, self.store, self.config, rng)


def _score_individual(doc: Document, classifier: Classifier, config: AttackConfig) -> Individual:
    score = classifier.score(doc.text).score
    return Individual(doc, score, fitness_of(score, config.target_direction))


def _elite_index(pop: Sequence[Individual]) -> int:
    return int(np.argmax([ind.fitness for ind in pop]))


def evolve_generation(
    pop: Sequence[Individual],
    classifier: Classifier,
    store: EmbeddingStore,
    config: AttackConfig,
    rng: np.random.Generator,
    strategy: PerturbationStrategy | None = None,
) -> list[Individual]:
    """One generational step: elite survives, the rest are bred.

    Parents are sampled with probability proportional to fitness shifted
    by the population minimum (uniform when all fitness is equal).
    """
    strategy = strategy or WordSwapStrategy(classifier, store, config)
    elite = pop[_elite_index(pop)]
    fits = np.asarray([ind.fitness for ind in pop], dtype=float)
    weights = fits - fits.min()
    total = weights.sum()
    probs = weights / total if total > 0 else np.full(len(pop), 1.0 / len(pop))
    out = [elite]
    for _ in range(config.population_size - 1):
        i = int(rng.choice(len(pop), p=probs))
        j = int(rng.choice(len(pop), p=probs))
        child = strategy.crossover(pop[i].doc, pop[j].doc, rng)
        if rng.random() < config.mutation_prob:
            try:
                out.append(strategy.mutate(child, rng))
                continue
            except NoEligiblePosition:
                pass
        out.append(_score_individual(child, classifier, config))
    return out


def evaluate_completion(
    history: Sequence[GenerationEvent],
    conditions: Sequence[CompletionCondition],
    target_direction: str = POSITIVE,
    elapsed: float = 0.0,
) -> str | None:
    """First satisfied condition wins; None means keep going."""
    if not history:
        return None
    last = history[-1]
    for cond in conditions:
        if isinstance(cond, ScoreThreshold):
            passed = (
                last.elite.score >= cond.theta
                if target_direction == POSITIVE
                else last.elite.score <= cond.theta
            )
            if passed:
                return REASON_SCORE
        elif isinstance(cond, WmdLimit):
            if last.wmd >= cond.delta:
                return REASON_WMD
        elif isinstance(cond, Duration):
            if elapsed >= cond.seconds:
                return REASON_DURATION
        elif isinstance(cond, Acceleration):
            if len(history) >= cond.window:
                fits = [ev.elite.fitness for ev in history[-cond.window:]]
                mean_gain = (fits[-1] - fits[0]) / (cond.window - 1)
                if mean_gain < cond.epsilon:
                    return REASON_ACCELERATION
    return None


def run_attack(
    doc: Document,
    classifier: Classifier,
    store: EmbeddingStore,
    config: AttackConfig,
    emit: Callable[[GenerationEvent], None] | None = None,
    clock: Callable[[], float] | None = None,
    should_stop: Callable[[], bool] | None = None,
    original: Document | None = None,
    strategy: PerturbationStrategy | None = None,
) -> AttackResult:
    """Drive the full attack loop and return the final elite.

    The population starts as N independently mutated copies of doc; each
    generation emits one event carrying its elite, measured against
    `original` (doc itself unless the attack starts from an edited
    document). Budget exhaustion mid-generation rolls back to the last
    complete generation's elite; exhaustion before any complete
    generation propagates.
    """
    config.validate()
    clock = clock or time.monotonic
    original = original or doc
    rng = np.random.default_rng(config.seed)
    strategy = strategy or WordSwapStrategy(classifier, store, config)
    start = clock()
    start_queries = classifier.query_index

    baseline = classifier.score(doc.text).score
    pop = [strategy.mutate(doc, rng) for _ in range(config.population_size)]

    def make_event(generation: int) -> GenerationEvent:
        elite = pop[_elite_index(pop)]
        return GenerationEvent(
            generation=generation,
            elite=elite,
            wmd=analytics.wmd(original, elite.doc, store),
            swap_count=analytics.swap_count(original, elite.doc),
            queries=classifier.query_index - start_queries,
            elapsed=clock() - start,
        )

    history: list[GenerationEvent] = []
    reason = REASON_MAX_GENERATIONS
    last_elite = pop[_elite_index(pop)]
    for gen in range(1, config.generations + 1):
        try:
            pop = evolve_generation(pop, classifier, store, config, rng, strategy)
        except QueryBudgetExhausted:
            # the seed population counts as generation 0, so there is
            # always a complete elite to stand once the loop is entered
            reason = REASON_BUDGET
            break
        event = make_event(gen)
        history.append(event)
        last_elite = event.elite
        if emit is not None:
            emit(event)
        stop = evaluate_completion(
            history, config.conditions, config.target_direction, elapsed=clock() - start
        )
        if stop is not None:
            reason = stop
            break
        if should_stop is not None and should_stop():
            reason = REASON_USER
            break
    return AttackResult(
        elite=last_elite,
        reason=reason,
        baseline_score=baseline,
        generations_run=len(history),
        queries_used=classifier.query_index - start_queries,
        events=history,
    )
