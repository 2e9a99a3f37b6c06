"""Headless robustness benchmark: attack a corpus against classifiers.

Every (classifier, document) pair gets a fresh classifier instance and a
deterministically derived seed, so results do not depend on row order or
worker scheduling. The report certifies the qualitative robustness
ordering: a harder classifier needs more swaps and more semantic drift
for less score improvement.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from . import analytics, fixtures
from .attack import AttackConfig, ScoreThreshold, fitness_of, run_attack
from .classifiers import load_clusters, load_lexicon, make_classifier
from .embeddings import EmbeddingStore, load_antonyms, load_embeddings, load_stopwords
from .errors import (
    EmptyCorpus,
    InvalidConfig,
    InvalidRemoteScore,
    NoEligiblePosition,
    NoEmbeddableContent,
    QueryBudgetExhausted,
    RemoteUnavailable,
)
from .text import tokenize


def parse_classifier_spec(spec: str) -> dict:
    """CLI spec to classifier reference: builtin:* or a remote URL."""
    if spec == "builtin:lexicon":
        return {"kind": "lexicon"}
    if spec == "builtin:hardened":
        return {"kind": "hardened"}
    if spec.startswith(("http://", "https://")):
        return {"kind": "remote", "url": spec}
    raise InvalidConfig(
        f"unknown classifier spec {spec!r}; use builtin:lexicon, builtin:hardened, or a URL"
    )


@dataclass(frozen=True)
class BenchRow:
    classifier: str
    doc_id: str
    s_orig: float | None
    s_adv: float | None
    improvement_pct: float | None
    wmd: float | None
    swap_pct: float | None
    success: bool | None
    queries: int
    seconds: float
    failed: bool = False


@dataclass(frozen=True)
class ClassifierStats:
    baseline_accuracy: float | None
    avg_wmd: float | None
    avg_swap_pct: float | None
    avg_improvement_pct: float | None
    success_rate: float | None
    attacked: int
    failed: int


@dataclass
class BenchReport:
    rows: list[BenchRow]
    stats: dict[str, ClassifierStats]
    config: AttackConfig
    target_score: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["classifier", "doc_id", "s_orig", "s_adv", "improvement_pct",
             "wmd", "swap_pct", "success", "queries", "seconds"]
        )
        for row in self.rows:
            if row.failed:
                success = "failed"
            else:
                success = "true" if row.success else "false"
            writer.writerow(
                [row.classifier, row.doc_id, _fmt(row.s_orig), _fmt(row.s_adv),
                 _fmt(row.improvement_pct), _fmt(row.wmd), _fmt(row.swap_pct),
                 success, row.queries, _fmt(row.seconds)]
            )
        return buf.getvalue()

    def to_json(self) -> str:
        from .server import config_to_dict

        payload = {
            "config": config_to_dict(self.config),
            "target_score": self.target_score,
            "classifiers": {
                label: dataclasses.asdict(stats) for label, stats in self.stats.items()
            },
            "rows": [dataclasses.asdict(row) for row in self.rows],
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def _fmt(value) -> str:
    if value is None:
        return ""
    return f"{value:.6f}"


def _row_seed(base: int, classifier_index: int, doc_index: int) -> int:
    return int(np.random.SeedSequence((base, classifier_index, doc_index)).generate_state(1)[0])


def _attack_row(
    label: str,
    ref: dict,
    record: Mapping,
    config: AttackConfig,
    store: EmbeddingStore,
    lexicon: Mapping[str, float],
    clusters: Mapping[str, str] | None,
    target_score: float,
    clock: Callable[[], float],
) -> BenchRow:
    classifier = make_classifier(ref, lexicon, clusters)
    doc = tokenize(record["text"], doc_id=record["id"], label=record["label"])
    start = clock()
    try:
        result = run_attack(doc, classifier, store, config)
    except (RemoteUnavailable, InvalidRemoteScore, NoEligiblePosition, QueryBudgetExhausted):
        return BenchRow(
            classifier=label, doc_id=record["id"], s_orig=None, s_adv=None,
            improvement_pct=None, wmd=None, swap_pct=None, success=None,
            queries=classifier.query_index, seconds=clock() - start, failed=True,
        )
    finally:
        close = getattr(classifier, "close", None)
        if close is not None:
            close()
    seconds = clock() - start

    elite_doc = result.elite.doc
    if elite_doc.tokens == doc.tokens:
        distance = 0.0
    else:
        try:
            distance = analytics.wmd(doc, elite_doc, store)
        except NoEmbeddableContent:
            distance = 0.0
    swaps = analytics.swap_count(doc, elite_doc)
    word_count = len(doc.word_positions())
    s_adv = result.elite.score
    direction = config.target_direction
    return BenchRow(
        classifier=label,
        doc_id=record["id"],
        s_orig=result.baseline_score,
        s_adv=s_adv,
        improvement_pct=analytics.improvement_pct(result.baseline_score, s_adv),
        wmd=distance,
        swap_pct=100.0 * swaps / word_count if word_count else 0.0,
        success=fitness_of(s_adv, direction) >= fitness_of(target_score, direction),
        queries=result.queries_used,
        seconds=seconds,
    )


def _aggregate(rows: list[BenchRow], labels: Mapping[str, str]) -> ClassifierStats:
    attacked = [r for r in rows if not r.failed]
    failed = len(rows) - len(attacked)
    if not attacked:
        return ClassifierStats(None, None, None, None, None, 0, failed)
    hits = 0
    for row in attacked:
        wants_positive = labels[row.doc_id] == "pos"
        if row.s_orig != 0 and (row.s_orig > 0) == wants_positive:
            hits += 1
    return ClassifierStats(
        baseline_accuracy=hits / len(attacked),
        avg_wmd=float(np.mean([r.wmd for r in attacked])),
        avg_swap_pct=float(np.mean([r.swap_pct for r in attacked])),
        avg_improvement_pct=float(np.mean([r.improvement_pct for r in attacked])),
        success_rate=sum(1 for r in attacked if r.success) / len(attacked),
        attacked=len(attacked),
        failed=failed,
    )


def run_bench(
    corpus: list[dict],
    classifiers: list[str],
    config: AttackConfig,
    target_score: float = 0.0,
    *,
    store: EmbeddingStore,
    lexicon: Mapping[str, float],
    clusters: Mapping[str, str] | None = None,
    workers: int = 4,
    clock: Callable[[], float] | None = None,
) -> BenchReport:
    """Attack every corpus document with every classifier and aggregate.

    Failed rows (unreachable remote, unattackable document) stay in the
    report marked failed but never enter the averages.
    """
    if not corpus:
        raise EmptyCorpus("bench needs at least one corpus document")
    if not classifiers:
        raise InvalidConfig("bench needs at least one classifier spec")
    config.validate()
    clock = clock or time.monotonic
    refs = [(label, parse_classifier_spec(label)) for label in classifiers]

    jobs = []
    for ci, (label, ref) in enumerate(refs):
        for di, record in enumerate(corpus):
            row_config = dataclasses.replace(
                config,
                seed=_row_seed(config.seed, ci, di),
                conditions=(ScoreThreshold(target_score),) + tuple(config.conditions),
            )
            jobs.append((label, ref, record, row_config))

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        rows = list(
            pool.map(
                lambda job: _attack_row(
                    job[0], job[1], job[2], job[3], store, lexicon, clusters,
                    target_score, clock,
                ),
                jobs,
            )
        )

    rows.sort(key=lambda r: (r.classifier, r.doc_id))
    labels = {record["id"]: record["label"] for record in corpus}
    stats = {
        label: _aggregate([r for r in rows if r.classifier == label], labels)
        for label, _ in refs
    }
    return BenchReport(rows=rows, stats=stats, config=config, target_score=target_score)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(
        prog="advtext-bench",
        description="Attack a corpus against classifiers and write a CSV/JSON report.",
    )
    parser.add_argument("--corpus", help="JSONL corpus; packaged review fixture by default")
    parser.add_argument(
        "--classifier",
        action="append",
        default=None,
        help="builtin:lexicon, builtin:hardened, or a remote URL (repeatable)",
    )
    parser.add_argument("--generations", type=int, default=10)
    parser.add_argument("--population", type=int, default=20)
    parser.add_argument("--tau", type=float, default=2.6)
    parser.add_argument("--k", type=int, default=8)
    parser.add_argument("--target-score", type=float, default=0.0)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--mutation", choices=["greedy", "random"], default="greedy")
    parser.add_argument("--workers", type=int, default=4)
    parser.add_argument("--out", default="bench-report.csv")
    parser.add_argument("--embeddings", help="word-vector file; packaged fixture by default")
    parser.add_argument("--lexicon", help="valence TSV; packaged fixture by default")
    parser.add_argument("--stopwords")
    parser.add_argument("--antonyms")
    parser.add_argument("--clusters", help="cluster TSV for builtin:hardened")
    args = parser.parse_args(argv)

    stops = load_stopwords(args.stopwords or fixtures.data_path("stopwords.txt"))
    antos = load_antonyms(args.antonyms or fixtures.data_path("antonyms.tsv"))
    if args.embeddings:
        store = load_embeddings(args.embeddings, stop_words=stops, antonyms=antos)
    else:
        store = fixtures.load_bench_store(stop_words=stops, antonyms=antos)
    lexicon = load_lexicon(args.lexicon) if args.lexicon else fixtures.load_bench_lexicon()
    clusters = load_clusters(args.clusters) if args.clusters else fixtures.load_bench_clusters()
    corpus = fixtures.load_corpus(args.corpus) if args.corpus else fixtures.load_bench_corpus()

    config = AttackConfig(
        generations=args.generations,
        population_size=args.population,
        tau=args.tau,
        k_neighbors=args.k,
        mutation_selection=args.mutation,
        seed=args.seed,
    )
    classifiers = args.classifier or ["builtin:lexicon", "builtin:hardened"]
    report = run_bench(
        corpus,
        classifiers,
        config,
        args.target_score,
        store=store,
        lexicon=lexicon,
        clusters=clusters,
        workers=args.workers,
    )

    out = Path(args.out)
    out.write_text(report.to_csv(), encoding="utf-8")
    out.with_suffix(".json").write_text(report.to_json(), encoding="utf-8")
    for label, stats in report.stats.items():
        if stats.attacked == 0:
            print(f"{label}: all {stats.failed} rows failed")
            continue
        print(
            f"{label}: success {stats.success_rate:.0%}  avg_wmd {stats.avg_wmd:.4f}  "
            f"avg_swap_pct {stats.avg_swap_pct:.2f}  avg_improvement {stats.avg_improvement_pct:.2f}  "
            f"baseline_acc {stats.baseline_accuracy:.0%}"
        )
    print(f"wrote {out} and {out.with_suffix('.json')}")


if __name__ == "__main__":
    main()
