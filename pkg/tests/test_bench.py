"""Bench report tests: row math, aggregates, determinism, failure rows."""

from __future__ import annotations

import csv
import http.server
import io
import json
import math
import re
import socket
import threading

import pytest

from advtext import fixtures
from advtext.attack import AttackConfig
from advtext.bench import BenchRow, parse_classifier_spec, run_bench
from advtext.bench import main as bench_main
from advtext.errors import EmptyCorpus, InvalidConfig

TOY_CORPUS = [
    {"id": "t1", "text": "the movie was bad", "label": "neg"},
    {"id": "t2", "text": "the film was terrible", "label": "neg"},
    {"id": "t3", "text": "the movie was good", "label": "pos"},
]


def toy_resources():
    return fixtures.load_toy_store(), fixtures.load_toy_lexicon()


def toy_config(**overrides):
    base = dict(generations=5, population_size=6, tau=2.5, k_neighbors=5, seed=1)
    base.update(overrides)
    return AttackConfig(**base)


def counter_clock():
    state = {"t": 0.0}

    def tick() -> float:
        state["t"] += 0.25
        return state["t"]

    return tick


def run_toy(classifiers=("builtin:lexicon",), config=None, corpus=None, **kwargs):
    store, lexicon = toy_resources()
    return run_bench(
        corpus if corpus is not None else TOY_CORPUS,
        list(classifiers),
        config or toy_config(),
        0.0,
        store=store,
        lexicon=lexicon,
        clock=kwargs.pop("clock", counter_clock()),
        **kwargs,
    )


def test_parse_classifier_spec():
    assert parse_classifier_spec("builtin:lexicon") == {"kind": "lexicon"}
    assert parse_classifier_spec("builtin:hardened") == {"kind": "hardened"}
    assert parse_classifier_spec("http://h:9/score") == {"kind": "remote", "url": "http://h:9/score"}
    assert parse_classifier_spec("https://h/score")["kind"] == "remote"
    with pytest.raises(InvalidConfig):
        parse_classifier_spec("builtin:vader")
    with pytest.raises(InvalidConfig):
        parse_classifier_spec("lexicon")


def test_empty_corpus_and_no_classifiers():
    store, lexicon = toy_resources()
    with pytest.raises(EmptyCorpus):
        run_bench([], ["builtin:lexicon"], toy_config(), store=store, lexicon=lexicon)
    with pytest.raises(InvalidConfig):
        run_bench(TOY_CORPUS, [], toy_config(), store=store, lexicon=lexicon)


def test_row_fields_on_toy_corpus():
    report = run_toy()
    assert [r.doc_id for r in report.rows] == ["t1", "t2", "t3"]
    by_id = {r.doc_id: r for r in report.rows}

    negative = by_id["t1"]
    assert negative.classifier == "builtin:lexicon"
    assert negative.s_orig == pytest.approx(-0.7)
    assert negative.s_adv >= 0.0
    assert negative.success is True
    assert not negative.failed
    assert negative.improvement_pct == pytest.approx(100.0 * (negative.s_adv - negative.s_orig))
    assert negative.wmd > 0.0
    assert 0.0 < negative.swap_pct <= 100.0
    assert negative.queries > 0
    assert negative.seconds > 0.0

    # already past the target: one generation still runs (completion is
    # checked after each generation), so the elite may gain a swap
    positive = by_id["t3"]
    assert positive.s_orig == pytest.approx(0.7)
    assert positive.success is True
    assert positive.s_adv >= positive.s_orig
    # baseline + greedy init (6 mutants) + one generation of 5 children,
    # each mutate evaluating at most k=5 candidates
    assert positive.queries <= 1 + 6 * 5 + 5 * 5


def test_aggregates_match_hand_recomputation():
    report = run_toy(("builtin:lexicon",))
    rows = [r for r in report.rows if not r.failed]
    stats = report.stats["builtin:lexicon"]
    assert stats.attacked == len(rows) == 3
    assert stats.failed == 0
    assert math.isclose(stats.avg_wmd, sum(r.wmd for r in rows) / len(rows), abs_tol=1e-12)
    assert math.isclose(stats.avg_swap_pct, sum(r.swap_pct for r in rows) / len(rows), abs_tol=1e-12)
    assert math.isclose(
        stats.avg_improvement_pct,
        sum(r.improvement_pct for r in rows) / len(rows),
        abs_tol=1e-12,
    )
    assert stats.success_rate == sum(1 for r in rows if r.success) / len(rows)


def test_baseline_accuracy_counts_sign_agreement():
    report = run_toy()
    assert report.stats["builtin:lexicon"].baseline_accuracy == pytest.approx(1.0)

    mislabeled = TOY_CORPUS + [{"id": "t4", "text": "the movie was awful", "label": "pos"}]
    report = run_toy(corpus=mislabeled)
    assert report.stats["builtin:lexicon"].baseline_accuracy == pytest.approx(3 / 4)


def test_csv_shape_and_formatting():
    report = run_toy(("builtin:lexicon",))
    text = report.to_csv()
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == [
        "classifier", "doc_id", "s_orig", "s_adv", "improvement_pct",
        "wmd", "swap_pct", "success", "queries", "seconds",
    ]
    assert len(rows) == 1 + 3
    float_cell = re.compile(r"^-?\d+\.\d{6}$")
    for row in rows[1:]:
        for cell in (row[2], row[3], row[4], row[5], row[6], row[9]):
            assert float_cell.match(cell), cell
        assert row[7] in {"true", "false"}
        assert row[8].isdigit()


def test_csv_byte_identical_for_same_inputs():
    first = run_toy(("builtin:lexicon",), clock=lambda: 0.0).to_csv()
    second = run_toy(("builtin:lexicon",), clock=lambda: 0.0).to_csv()
    assert first == second

    reseeded = run_toy(("builtin:lexicon",), config=toy_config(seed=2), clock=lambda: 0.0)
    assert reseeded.to_csv() != first or reseeded.rows != []


def test_rows_independent_of_worker_count():
    serial = run_toy(("builtin:lexicon", "builtin:hardened"), workers=1, clock=lambda: 0.0)
    parallel = run_toy(("builtin:lexicon", "builtin:hardened"), workers=8, clock=lambda: 0.0)
    assert serial.to_csv() == parallel.to_csv()


def test_unreachable_remote_marks_rows_failed_and_run_continues():
    url = "http://127.0.0.1:9/score"
    report = run_toy(("builtin:lexicon", url))

    remote_rows = [r for r in report.rows if r.classifier == url]
    assert len(remote_rows) == 3
    for row in remote_rows:
        assert row.failed
        assert row.success is None
        assert row.s_orig is None and row.wmd is None

    remote_stats = report.stats[url]
    assert remote_stats.attacked == 0
    assert remote_stats.failed == 3
    assert remote_stats.avg_wmd is None and remote_stats.success_rate is None

    # the builtin rows are untouched by the remote failures
    assert report.stats["builtin:lexicon"].attacked == 3

    lines = report.to_csv().splitlines()
    failed_line = next(line for line in lines if line.startswith("http"))
    cells = failed_line.split(",")
    assert cells[7] == "failed"
    assert cells[2] == "" and cells[5] == ""


def test_unattackable_document_marks_row_failed():
    corpus = TOY_CORPUS + [{"id": "t9", "text": "zzz qqq", "label": "neg"}]
    report = run_toy(corpus=corpus)
    stuck = next(r for r in report.rows if r.doc_id == "t9")
    assert stuck.failed
    assert report.stats["builtin:lexicon"].attacked == 3
    assert report.stats["builtin:lexicon"].failed == 1


class _ScoreHandler(http.server.BaseHTTPRequestHandler):
    def do_POST(self):
        self.rfile.read(int(self.headers.get("Content-Length", 0)))
        body = json.dumps({"score": -0.5}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture()
def score_server():
    server = http.server.ThreadingHTTPServer(("127.0.0.1", 0), _ScoreHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}/score"
    server.shutdown()


def test_remote_rows_complete_against_live_endpoint(score_server):
    report = run_toy((score_server,), config=toy_config(generations=2))
    for row in report.rows:
        assert not row.failed
        assert row.s_orig == pytest.approx(-0.5)
        assert row.s_adv == pytest.approx(-0.5)
        assert row.success is False
        assert row.queries > 0
    stats = report.stats[score_server]
    assert stats.success_rate == 0.0
    # constant scorer: negative docs lose, positive labels disagree with -0.5
    assert stats.baseline_accuracy == pytest.approx(2 / 3)


def test_json_report_round_trips():
    report = run_toy(("builtin:lexicon",))
    payload = json.loads(report.to_json())
    assert payload["target_score"] == 0.0
    assert payload["config"]["generations"] == 5
    assert len(payload["rows"]) == 3
    stats = payload["classifiers"]["builtin:lexicon"]
    assert stats["attacked"] == 3
    assert stats["success_rate"] == report.stats["builtin:lexicon"].success_rate


def test_hardened_orderings_on_packaged_fixture():
    store = fixtures.load_bench_store()
    lexicon = fixtures.load_bench_lexicon()
    clusters = fixtures.load_bench_clusters()
    corpus = fixtures.load_bench_corpus()
    config = AttackConfig(
        generations=15, population_size=20, tau=2.6, k_neighbors=8,
        mutation_selection="random", seed=1,
    )
    report = run_bench(
        corpus, ["builtin:lexicon", "builtin:hardened"], config,
        store=store, lexicon=lexicon, clusters=clusters, clock=lambda: 0.0,
    )
    plain = report.stats["builtin:lexicon"]
    hard = report.stats["builtin:hardened"]
    assert hard.avg_swap_pct > plain.avg_swap_pct
    assert hard.avg_wmd > plain.avg_wmd
    assert hard.avg_improvement_pct < plain.avg_improvement_pct
    assert plain.baseline_accuracy == 1.0 and hard.baseline_accuracy == 1.0


def test_cli_writes_csv_and_json(tmp_path):
    corpus_path = tmp_path / "corpus.jsonl"
    corpus_path.write_text(
        "\n".join(json.dumps(rec) for rec in TOY_CORPUS[:2]) + "\n", encoding="utf-8"
    )
    out = tmp_path / "report.csv"
    bench_main([
        "--corpus", str(corpus_path),
        "--classifier", "builtin:lexicon",
        "--embeddings", str(fixtures.data_path("toy/embeddings.txt")),
        "--lexicon", str(fixtures.data_path("toy/lexicon.tsv")),
        "--generations", "3",
        "--population", "6",
        "--tau", "2.5",
        "--k", "5",
        "--seed", "1",
        "--out", str(out),
    ])
    assert out.exists()
    header = out.read_text(encoding="utf-8").splitlines()[0]
    assert header.startswith("classifier,doc_id,s_orig")
    payload = json.loads(out.with_suffix(".json").read_text(encoding="utf-8"))
    assert [row["doc_id"] for row in payload["rows"]] == ["t1", "t2"]
