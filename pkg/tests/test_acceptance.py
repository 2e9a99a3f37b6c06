"""Acceptance gate: one test per release criterion, timed and toleranced.

Run with -s to see one [PASS] line per criterion. Each test re-derives
its expected values from the independent oracles in tests/oracles.py or
from hand arithmetic, never from the code under test.
"""

from __future__ import annotations

import json
import math
import time

import numpy as np
import pytest
from scipy import stats as scipy_stats

from advtext import analytics, fixtures
from advtext.attack import (
    AttackConfig,
    ScoreThreshold,
    run_attack,
    select_position,
)
from advtext.bench import run_bench
from advtext.classifiers import LexiconClassifier
from advtext.embeddings import EmbeddingStore, neighbors
from advtext.errors import QueryBudgetExhausted
from advtext.server import SessionManager, load_resources
from advtext.text import apply_swap, lock_positions, tokenize

from oracles import brute_force_neighbors, brute_force_wmd

TOY_WORDS = ["good", "great", "fine", "bad", "terrible", "awful", "movie", "film"]


def report(num: int, desc: str, elapsed: float, limit: float) -> None:
    assert elapsed < limit, f"criterion {num} took {elapsed:.2f}s, limit {limit}s"
    print(f"[PASS] criterion {num:2d}: {desc} ({elapsed:.2f}s < {limit:.0f}s)")


def toy_store(**kwargs) -> EmbeddingStore:
    kwargs.setdefault("stop_words", frozenset({"the", "was"}))
    return fixtures.load_toy_store(antonyms={}, **kwargs)


def test_criterion_01_round_trip_identity():
    start = time.perf_counter()
    edge_cases = [
        "",
        " ",
        "\t\n  \n",
        "Bad movie!",
        "  leading spaces",
        "trailing spaces   ",
        "tabs\tbetween\twords",
        "newlines\nsplit\nlines\n",
        "double  spaces   triple",
        "punct!!! clusters??? here...",
        "parens (and) [brackets] {braces}",
        "quotes \"double\" and 'single'",
        "hyphen-ated and under_scored",
        "digits 123 mixed a1b2",
        "don't isn't won't n't",
        "Ünïcödé wörds são bons",
        "emoji 🎬 stays put",
        "comma,no space",
        "semi;colons:and:colons",
        "slash/and\\backslash",
        "ALL CAPS SHOUTING",
        "MiXeD CaSe WoRdS",
        "ellipsis… and—dash",
        "$ % ^ & * symbols alone",
        "a",
        "!",
        "word",
        " x ",
        " nbsp padded ",
        "CRLF\r\nline\r\nends",
    ]
    rng = np.random.default_rng(7)
    words = ["The", "movie", "was", "bad,", "great!", "a", "I", "don't", "it's", "fine..."]
    gaps = [" ", "  ", "\t", "\n", " \n ", ""]
    corpus = list(edge_cases)
    while len(corpus) < 200:
        n = int(rng.integers(1, 12))
        parts = []
        for _ in range(n):
            parts.append(str(rng.choice(gaps)))
            parts.append(str(rng.choice(words)))
        parts.append(str(rng.choice(gaps)))
        corpus.append("".join(parts))
    assert len(corpus) == 200

    for text in corpus:
        assert tokenize(text).text == text, repr(text)
    report(1, "tokenize/detokenize round-trip on 200 strings", time.perf_counter() - start, 1.0)


def test_criterion_02_neighbor_oracle():
    start = time.perf_counter()

    def check(store, raw, word, tau, k, stops):
        got = neighbors(store, word, tau, k)
        want = brute_force_neighbors(raw, word, tau, k, stops)
        assert [n.word for n in got] == [w for w, _ in want], (word, tau, k)
        for n, (_, dist) in zip(got, want):
            assert abs(n.distance - dist) <= 1e-12

    store = toy_store()
    raw = {w: [float(x) for x in store.vectors[w]] for w in TOY_WORDS}
    for word in TOY_WORDS:
        for tau, k in [(0.25, 10), (0.5, 3), (2.5, 8), (0.05, 10)]:
            check(store, raw, word, tau, k, {"the", "was"})

    for seed in range(1, 51):
        rng = np.random.default_rng(seed)
        vocab = [f"w{i:04d}" for i in range(1000)]
        matrix = rng.normal(size=(1000, 8))
        vectors = {w: matrix[i] for i, w in enumerate(vocab)}
        stops = set(rng.choice(vocab, size=20, replace=False))
        random_store = EmbeddingStore(dim=8, vectors=vectors, stop_words=frozenset(stops))
        raw = {w: [float(x) for x in vectors[w]] for w in vocab}
        tau = float(rng.uniform(1.5, 4.0))
        k = int(rng.integers(1, 30))
        for word in rng.choice(vocab, size=5, replace=False):
            check(random_store, raw, word, tau, k, stops)

    report(2, "neighbors() equals brute-force scan, 50 random stores", time.perf_counter() - start, 10.0)


def test_criterion_03_wmd_oracle():
    start = time.perf_counter()
    store = toy_store()
    vectors = {w: [float(x) for x in store.vectors[w]] for w in TOY_WORDS}

    def bag(text: str) -> dict[str, float]:
        counts: dict[str, int] = {}
        for word in text.split():
            if word in vectors:
                counts[word] = counts.get(word, 0) + 1
        total = sum(counts.values())
        return {w: c / total for w, c in counts.items()}

    docs = [
        "good movie",
        "bad film",
        "great great fine movie",
        "terrible awful bad film",
        "movie film good bad",
        "good",
        "awful",
        "fine fine fine",
        "great movie good film",
        "bad bad terrible",
    ]
    pairs = 0
    for i, a in enumerate(docs):
        for b in docs[i:]:
            got = analytics.wmd(tokenize(a), tokenize(b), store)
            want = brute_force_wmd(bag(a), bag(b), vectors)
            assert abs(got - want) <= 1e-9, (a, b, got, want)
            pairs += 1
    assert pairs == 55

    rng = np.random.default_rng(11)
    for _ in range(100):
        a = tokenize(" ".join(rng.choice(TOY_WORDS, size=int(rng.integers(1, 6)))))
        b = tokenize(" ".join(rng.choice(TOY_WORDS, size=int(rng.integers(1, 6)))))
        forward = analytics.wmd(a, b, store)
        assert abs(forward - analytics.wmd(b, a, store)) <= 1e-9
        assert analytics.wmd(a, a, store) == 0.0
        assert forward >= 0.0
    report(3, "exact WMD equals brute-force transport; symmetric, identity-zero", time.perf_counter() - start, 30.0)


def test_criterion_04_ga_invariants():
    start = time.perf_counter()
    store = toy_store()
    lexicon = fixtures.load_toy_lexicon()
    docs = [
        tokenize("the movie was bad"),
        tokenize("the bad movie was terrible"),
        lock_positions(tokenize("the movie was bad and awful"), [1]),
    ]

    def stream(doc, seed):
        config = AttackConfig(
            generations=10, population_size=8, tau=2.5, k_neighbors=5,
            mutation_selection="random", seed=seed,
        )
        result = run_attack(doc, LexiconClassifier(lexicon), store, config)
        return result, "\n".join(ev.to_json(include_elapsed=False) for ev in result.events)

    for run in range(100):
        doc = docs[run % len(docs)]
        result, first = stream(doc, seed=run)
        fitnesses = [ev.elite.fitness for ev in result.events]
        assert fitnesses == sorted(fitnesses), f"elite fitness regressed, seed {run}"
        for event in result.events:
            assert len(event.elite.doc.tokens) == len(doc.tokens)
            assert event.elite.doc.locks == doc.locks
            for pos in doc.locks:
                assert event.elite.doc.tokens[pos].surface == doc.tokens[pos].surface
        _, second = stream(doc, seed=run)
        assert first == second, f"same seed diverged, seed {run}"
    report(4, "100 seeded attacks: monotone elite, locks fixed, deterministic", time.perf_counter() - start, 60.0)


def test_criterion_05_lexicon_attack_success():
    start = time.perf_counter()
    config = AttackConfig(
        generations=10, population_size=20, tau=2.6, k_neighbors=8,
        mutation_selection="greedy", seed=1,
    )
    report_obj = run_bench(
        fixtures.load_bench_corpus(),
        ["builtin:lexicon"],
        config,
        0.0,
        store=fixtures.load_bench_store(),
        lexicon=fixtures.load_bench_lexicon(),
    )
    stats = report_obj.stats["builtin:lexicon"]
    assert stats.attacked == 20
    assert stats.success_rate >= 0.8, f"success rate {stats.success_rate}"
    for row in report_obj.rows:
        assert row.s_orig < 0
        if row.success:
            assert row.s_adv >= 0.0
    report(5, f"lexicon classifier beaten on {stats.success_rate:.0%} of 20 negative docs", time.perf_counter() - start, 60.0)


def test_criterion_06_robustness_ordering():
    start = time.perf_counter()
    store = fixtures.load_bench_store()
    lexicon = fixtures.load_bench_lexicon()
    clusters = fixtures.load_bench_clusters()
    corpus = fixtures.load_bench_corpus()
    for seed in range(1, 6):
        config = AttackConfig(
            generations=15, population_size=20, tau=2.6, k_neighbors=8,
            mutation_selection="random", seed=seed,
        )
        rep = run_bench(
            corpus, ["builtin:lexicon", "builtin:hardened"], config,
            store=store, lexicon=lexicon, clusters=clusters,
        )
        plain = rep.stats["builtin:lexicon"]
        hard = rep.stats["builtin:hardened"]
        assert hard.avg_swap_pct > plain.avg_swap_pct, f"seed {seed}"
        assert hard.avg_wmd > plain.avg_wmd, f"seed {seed}"
        assert hard.avg_improvement_pct < plain.avg_improvement_pct, f"seed {seed}"
    report(6, "hardened needs more swaps and WMD for less improvement, seeds 1-5", time.perf_counter() - start, 120.0)


def test_criterion_07_encoding_correctness():
    start = time.perf_counter()
    store = toy_store()
    lexicon = fixtures.load_toy_lexicon()
    doc = tokenize("the movie was bad")

    influence = analytics.influence_encoding(doc, LexiconClassifier(lexicon), store, tau=0.25)
    # movie's nearest neighbor film carries no valence: influence must be 0
    assert influence[1] == 0.0
    assert influence[3] == pytest.approx(-0.1)
    assert influence[0] == 0.0 and influence[2] == 0.0

    selection = analytics.selection_encoding(doc, store, tau=0.25)
    rng = np.random.default_rng(123)
    draws = [select_position(doc, store, 0.25, rng) for _ in range(10000)]
    observed = [draws.count(1), draws.count(3)]
    expected = [10000 * selection[1], 10000 * selection[3]]
    chi = scipy_stats.chisquare(observed, expected)
    assert chi.pvalue > 0.01, chi

    lm = fixtures.load_toy_lm()
    rng = np.random.default_rng(5)
    for _ in range(20):
        words = rng.choice(TOY_WORDS, size=int(rng.integers(2, 7)))
        semantic = analytics.semantic_encoding(tokenize(" ".join(words)), lm)
        values = [semantic[i] for i in range(len(words))]
        assert all(0.0 <= v <= 1.0 for v in values)
        assert max(values) == 1.0
        if len(set(values)) > 1:
            assert min(values) == 0.0
    report(7, "influence zeros, selection matches sampling, semantic min-max", time.perf_counter() - start, 30.0)


def test_criterion_08_scatterplot_data():
    start = time.perf_counter()
    store = toy_store()
    doc = tokenize("the movie was bad")
    records = analytics.candidate_records(
        doc, 3, LexiconClassifier(fixtures.load_toy_lexicon()), store,
        fixtures.load_toy_lm(), tau=0.25, k=10,
    )
    table = {r.word: r for r in records}
    assert set(table) == {"terrible", "awful"}
    assert table["terrible"].similarity == pytest.approx(0.8761, abs=1e-4)
    assert table["awful"].similarity == pytest.approx(0.8173, abs=1e-4)
    assert table["terrible"].score_delta == pytest.approx(-0.1, abs=1e-4)
    assert table["awful"].score_delta == pytest.approx(-0.1, abs=1e-4)
    assert max(r.lm_norm for r in records) == 1.0
    report(8, "candidate table matches hand-computed similarity/delta values", time.perf_counter() - start, 30.0)


def test_criterion_09_improvement_formula():
    start = time.perf_counter()
    assert analytics.improvement_pct(-0.50, +0.25) == 75.0
    report(9, "improvement_pct(-0.50, +0.25) = 75.0 exactly", time.perf_counter() - start, 30.0)


def test_criterion_10_log_semantics(tmp_path):
    start = time.perf_counter()
    store = toy_store()
    log = analytics.SnapshotLog()
    original = tokenize("the movie was bad")
    log.record("original", original, -0.7, store)
    swapped = apply_swap(original, 3, "fine")
    log.record("swap bad to fine", swapped, 0.4, store)

    assert len(log.snapshots) == 2
    reverted = log.revert(0)
    assert len(log.snapshots) == 3
    assert reverted == original
    assert reverted.text == original.text

    resources = load_resources(data_dir=tmp_path)
    manager = SessionManager(resources)
    sid = manager.create_session({"text": "the movie was bad"})["id"]
    manager.user_swap(sid, {"pos": 3, "word": "fine"})
    manager.revert_to(sid, {"seq": 0})
    state_before = manager.session_state(manager.get(sid))
    events_before = list(manager.get(sid).events)

    reloaded = SessionManager(load_resources(data_dir=tmp_path))
    state_after = reloaded.session_state(reloaded.get(sid))
    assert state_after == state_before
    replayed = list(reloaded.stream(sid, from_seq=0, follow=False))
    rows = [json.loads(line) for line in replayed if line.strip()]
    assert rows == events_before
    assert [r["seq"] for r in rows] == [0, 1, 2]
    assert rows[-1]["description"] == "revert to 0"
    report(10, "revert bit-identical, history grows, sessions reload, replay rebuilds", time.perf_counter() - start, 30.0)


def test_criterion_11_query_accounting():
    start = time.perf_counter()
    store = toy_store()
    lexicon = fixtures.load_toy_lexicon()
    doc = tokenize("the movie was bad")
    config = AttackConfig(
        generations=10, population_size=8, tau=2.5, k_neighbors=5,
        mutation_selection="random", seed=9,
    )
    full = run_attack(doc, LexiconClassifier(lexicon), store, config)
    assert full.generations_run >= 2

    budget = full.events[0].queries + 3  # dies mid generation 2
    classifier = LexiconClassifier(lexicon, budget=budget)
    trimmed = run_attack(doc, classifier, store, config)
    assert classifier.query_index == budget
    with pytest.raises(QueryBudgetExhausted):
        classifier.score("any text")
    assert trimmed.reason == "budget_exhausted"
    assert trimmed.generations_run == 1
    assert trimmed.elite == full.events[0].elite
    report(11, "budget of B stops at exactly B calls with last complete elite", time.perf_counter() - start, 30.0)
