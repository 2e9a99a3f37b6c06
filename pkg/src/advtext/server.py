"""HTTP workbench server: sessions, attacks, edits, streams, persistence.

One process hosts many sessions. Each session owns an append-only
document history, a classifier instance with its own query counter, and
at most one running attack. Write commands (and reads that spend
classifier queries) are rejected while an attack is active; stop
requests, state reads, and the event stream are always available.
Sessions persist as one JSON file each when a data directory is given.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import queue
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, Mapping

import uvicorn
from fastapi import Body, FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse

from . import fixtures
from .analytics import (
    SnapshotLog,
    Snapshot,
    adversary_summary,
    candidate_records,
    compute_encodings,
    improvement_pct,
)
from .attack import (
    Acceleration,
    AttackConfig,
    Duration,
    REASON_BUDGET,
    ScoreThreshold,
    WmdLimit,
    run_attack,
)
from .classifiers import Classifier, load_lexicon, load_clusters, make_classifier
from .embeddings import EmbeddingStore, load_antonyms, load_embeddings, load_stopwords
from .errors import (
    AdvTextError,
    AttackAlreadyRunning,
    InvalidConfig,
    InvalidRemoteScore,
    LockedPosition,
    NoEligiblePosition,
    NotAWord,
    OutOfVocabulary,
    QueryBudgetExhausted,
    RemoteUnavailable,
    ShapeMismatch,
    UnknownCorpusRecord,
    UnknownSession,
    UnknownSnapshot,
)
from .lm import NGramModel, load_arpa
from .text import Document, apply_swap, lock_positions, tokenize

_ERROR_STATUS = {
    UnknownSession: 404,
    UnknownSnapshot: 404,
    UnknownCorpusRecord: 404,
    OutOfVocabulary: 404,
    AttackAlreadyRunning: 409,
    LockedPosition: 409,
    NoEligiblePosition: 409,
    QueryBudgetExhausted: 409,
    RemoteUnavailable: 502,
    InvalidRemoteScore: 502,
}

_CONDITION_TYPES = {
    "score_threshold": ScoreThreshold,
    "wmd_limit": WmdLimit,
    "duration": Duration,
    "acceleration": Acceleration,
}


def condition_from_dict(data: Mapping) -> object:
    kind = data.get("type")
    cls = _CONDITION_TYPES.get(kind)
    if cls is None:
        raise InvalidConfig(f"unknown condition type {kind!r}")
    kwargs = {k: v for k, v in data.items() if k != "type"}
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise InvalidConfig(f"bad {kind} condition: {exc}") from exc


def condition_to_dict(cond) -> dict:
    name = next(k for k, v in _CONDITION_TYPES.items() if isinstance(cond, v))
    return {"type": name, **dataclasses.asdict(cond)}


def config_from_dict(data: Mapping | None) -> AttackConfig:
    data = dict(data or {})
    raw_conditions = data.pop("conditions", [])
    allowed = {f.name for f in dataclasses.fields(AttackConfig)} - {"conditions"}
    unknown = set(data) - allowed
    if unknown:
        raise InvalidConfig(f"unknown config fields: {sorted(unknown)}")
    if not isinstance(raw_conditions, (list, tuple)):
        raise InvalidConfig("conditions must be a list")
    conditions = tuple(condition_from_dict(c) for c in raw_conditions)
    try:
        config = AttackConfig(conditions=conditions, **data)
    except TypeError as exc:
        raise InvalidConfig(str(exc)) from exc
    config.validate()
    return config


def config_to_dict(config: AttackConfig) -> dict:
    out = dataclasses.asdict(config)
    out["conditions"] = [condition_to_dict(c) for c in config.conditions]
    return out


def normalize_classifier_ref(ref: Mapping | None) -> dict:
    ref = dict(ref or {"kind": "lexicon"})
    unknown = set(ref) - {"kind", "url", "budget"}
    if unknown:
        raise InvalidConfig(f"unknown classifier fields: {sorted(unknown)}")
    ref.setdefault("kind", "lexicon")
    return ref


@dataclass
class Resources:
    """Everything sessions share: vectors, language model, lexicons."""

    store: EmbeddingStore
    lm: NGramModel
    lexicon: dict[str, float]
    clusters: dict[str, str]
    corpus: list[dict]
    data_dir: Path | None = None


def load_resources(
    embeddings=None,
    lm=None,
    lexicon=None,
    stopwords=None,
    antonyms=None,
    clusters=None,
    corpus=None,
    data_dir=None,
) -> Resources:
    """Load server resources, defaulting to the packaged fixture data."""
    stops = load_stopwords(stopwords or fixtures.data_path("stopwords.txt"))
    antos = load_antonyms(antonyms or fixtures.data_path("antonyms.tsv"))
    if embeddings:
        store = load_embeddings(embeddings, stop_words=stops, antonyms=antos)
    else:
        store = fixtures.load_toy_store(stop_words=stops, antonyms=antos)
    return Resources(
        store=store,
        lm=load_arpa(lm) if lm else fixtures.load_toy_lm(),
        lexicon=load_lexicon(lexicon) if lexicon else fixtures.load_toy_lexicon(),
        clusters=load_clusters(clusters) if clusters else {},
        corpus=fixtures.load_corpus(corpus) if corpus else [],
        data_dir=Path(data_dir) if data_dir else None,
    )


class _Session:
    def __init__(
        self,
        sid: str,
        config: AttackConfig,
        classifier_ref: dict,
        classifier: Classifier,
        clock: Callable[[], str] | None,
    ):
        self.id = sid
        self.config = config
        self.classifier_ref = classifier_ref
        self.classifier = classifier
        self.log = SnapshotLog(clock=clock)
        self.current: Document | None = None
        self.status = "idle"
        self.stop_reason: str | None = None
        self.lock = threading.RLock()
        self.events: list[dict] = []
        self.listeners: list[queue.SimpleQueue] = []
        self.stop_requested = False
        self.encodings_cache: tuple[int, dict] | None = None


def _event_from_snapshot(snap: Snapshot, type_: str, generation: int | None = None) -> dict:
    event = {
        "type": type_,
        "seq": snap.seq,
        "score": snap.score,
        "wmd": snap.wmd,
        "swap_count": snap.swap_count,
        "description": snap.description,
        "timestamp": snap.timestamp,
        "text": snap.doc.text,
        "tokens": [t.surface for t in snap.doc.tokens],
        "locks": sorted(snap.doc.locks),
    }
    if generation is not None:
        event["generation"] = generation
    return event


class SessionManager:
    """All session state plus the shared resources behind the routes."""

    def __init__(self, resources: Resources, snapshot_clock: Callable[[], str] | None = None):
        self.resources = resources
        self.snapshot_clock = snapshot_clock
        self.sessions: dict[str, _Session] = {}
        self.corpus: dict[str, dict] = {r["id"]: r for r in resources.corpus}
        self._lock = threading.Lock()
        self._load_persisted()

    # -- lookup -------------------------------------------------------

    def get(self, sid: str) -> _Session:
        session = self.sessions.get(sid)
        if session is None:
            raise UnknownSession(f"no session {sid!r}")
        return session

    def index(self) -> dict:
        with self._lock:
            sessions = list(self.sessions.values())
        return {
            "sessions": [
                {"id": s.id, "status": s.status, "stop_reason": s.stop_reason}
                for s in sessions
            ]
        }

    @staticmethod
    def _require_not_attacking(session: _Session) -> None:
        if session.status == "attacking":
            raise AttackAlreadyRunning(f"session {session.id} has an active attack")

    # -- commands -----------------------------------------------------

    def create_session(self, payload: Mapping) -> dict:
        text, record_id = payload.get("text"), payload.get("record_id")
        if (text is None) == (record_id is None):
            raise InvalidConfig("provide exactly one of text or record_id")
        if record_id is not None:
            record = self.corpus.get(record_id)
            if record is None:
                raise UnknownCorpusRecord(f"no corpus record {record_id!r}")
            doc = tokenize(record["text"], doc_id=record_id, label=record["label"])
        else:
            doc = tokenize(str(text), label=payload.get("label"))
        config = config_from_dict(payload.get("config"))
        ref = normalize_classifier_ref(payload.get("classifier"))
        classifier = make_classifier(ref, self.resources.lexicon, self.resources.clusters)

        session = _Session(uuid.uuid4().hex[:12], config, ref, classifier, self.snapshot_clock)
        baseline = classifier.score(doc.text).score
        snap = session.log.record("original", doc, baseline, self.resources.store)
        session.current = doc
        session.events.append(_event_from_snapshot(snap, "original"))
        with self._lock:
            self.sessions[session.id] = session
        self._persist(session)
        return self.session_state(session)

    def start_attack(self, sid: str) -> dict:
        session = self.get(sid)
        with session.lock:
            self._require_not_attacking(session)
            session.status = "attacking"
            session.stop_reason = None
            session.stop_requested = False
            start_doc = session.current
        thread = threading.Thread(
            target=self._attack_loop, args=(session, start_doc), daemon=True
        )
        thread.start()
        return {"id": sid, "status": "attacking"}

    def _attack_loop(self, session: _Session, start_doc: Document) -> None:
        store = self.resources.store
        reason = "error"
        try:

            def emit(event):
                with session.lock:
                    snap = session.log.record(
                        f"generation {event.generation}",
                        event.elite.doc,
                        event.elite.score,
                        store,
                    )
                    session.current = event.elite.doc
                    self._publish(session, _event_from_snapshot(snap, "generation", event.generation))

            result = run_attack(
                start_doc,
                session.classifier,
                store,
                session.config,
                emit=emit,
                should_stop=lambda: session.stop_requested,
                original=session.log.original,
            )
            reason = result.reason
            with session.lock:
                if result.elite.doc.tokens != session.current.tokens:
                    # budget died before generation 1 finished; keep the
                    # seed population's elite rather than dropping it
                    snap = session.log.record(
                        "generation 0", result.elite.doc, result.elite.score, store
                    )
                    session.current = result.elite.doc
                    self._publish(session, _event_from_snapshot(snap, "generation", 0))
        except QueryBudgetExhausted:
            reason = REASON_BUDGET
        except NoEligiblePosition:
            reason = "no_eligible_position"
        except AdvTextError as exc:
            reason = f"error:{type(exc).__name__}"
        finally:
            with session.lock:
                session.status = "stopped"
                session.stop_reason = reason
                latest = session.log.latest()
                self._publish(
                    session,
                    {
                        "type": "stopped",
                        "seq": latest.seq,
                        "reason": reason,
                        "score": latest.score,
                        "description": f"stopped: {reason}",
                    },
                )
            self._persist(session)

    def stop_attack(self, sid: str) -> dict:
        session = self.get(sid)
        with session.lock:
            if session.status == "attacking":
                session.stop_requested = True
            return {
                "id": sid,
                "status": session.status,
                "stop_requested": session.stop_requested,
            }

    def user_swap(self, sid: str, payload: Mapping) -> dict:
        pos, word = payload.get("pos"), payload.get("word")
        if isinstance(pos, bool) or not isinstance(pos, int):
            raise InvalidConfig(f"pos must be an integer, got {pos!r}")
        if not isinstance(word, str) or not word:
            raise InvalidConfig(f"word must be a non-empty string, got {word!r}")
        session = self.get(sid)
        with session.lock:
            self._require_not_attacking(session)
            # a re-edit of an already locked position replaces the word
            doc = apply_swap(session.current, pos, word, allow_locked=True)
            doc = lock_positions(doc, [pos])
            score = session.classifier.score(doc.text).score
            snap = session.log.record("user swap", doc, score, self.resources.store)
            session.current = doc
            self._publish(session, _event_from_snapshot(snap, "swap"))
        self._persist(session)
        return self.session_state(session)

    def revert_to(self, sid: str, payload: Mapping) -> dict:
        seq = payload.get("seq")
        if isinstance(seq, bool) or not isinstance(seq, int):
            raise InvalidConfig(f"seq must be an integer, got {seq!r}")
        session = self.get(sid)
        with session.lock:
            self._require_not_attacking(session)
            session.current = session.log.revert(seq)
            self._publish(session, _event_from_snapshot(session.log.latest(), "revert"))
        self._persist(session)
        return self.session_state(session)

    # -- reads --------------------------------------------------------

    def session_state(self, session: _Session) -> dict:
        with session.lock:
            latest = session.log.latest()
            return {
                "id": session.id,
                "status": session.status,
                "stop_reason": session.stop_reason,
                "seq": latest.seq,
                "score": latest.score,
                "wmd": latest.wmd,
                "swap_count": latest.swap_count,
                "text": session.current.text,
                "tokens": [t.surface for t in session.current.tokens],
                "locks": sorted(session.current.locks),
                "doc_id": session.current.id,
                "label": session.current.label,
                "queries_used": session.classifier.query_index,
                "snapshots": len(session.log.snapshots),
                "config": config_to_dict(session.config),
                "classifier": dict(session.classifier_ref),
            }

    def encodings(self, sid: str) -> dict:
        session = self.get(sid)
        with session.lock:
            # influence spends classifier queries, so this counts as a
            # command for the single-writer rule
            self._require_not_attacking(session)
            seq = session.log.latest().seq
            if session.encodings_cache and session.encodings_cache[0] == seq:
                return session.encodings_cache[1]
            enc = compute_encodings(
                session.current,
                session.classifier,
                self.resources.store,
                self.resources.lm,
                session.config.tau,
            )
            out = {
                "seq": seq,
                "tokens": [t.surface for t in session.current.tokens],
                "locks": sorted(session.current.locks),
                "influence": list(enc.influence),
                "selection_prob": list(enc.selection_prob),
                "lm_score": list(enc.lm_score),
            }
            session.encodings_cache = (seq, out)
            return out

    def candidates(self, sid: str, pos: int) -> dict:
        session = self.get(sid)
        with session.lock:
            self._require_not_attacking(session)
            records = candidate_records(
                session.current,
                pos,
                session.classifier,
                self.resources.store,
                self.resources.lm,
                session.config.tau,
                session.config.k_neighbors,
            )
            return {
                "pos": pos,
                "current": session.current.tokens[pos].surface,
                "records": [dataclasses.asdict(r) for r in records],
            }

    def summaries(self, sid: str) -> dict:
        self.get(sid)
        rows = []
        with self._lock:
            sessions = list(self.sessions.values())
        for session in sessions:
            with session.lock:
                first, latest = session.log.snapshots[0], session.log.latest()
                try:
                    summary = adversary_summary(
                        session.log.original,
                        session.current,
                        self.resources.lm,
                        self.resources.store,
                    )
                except ShapeMismatch:
                    continue
                rows.append(
                    {
                        "session_id": session.id,
                        "doc_id": session.current.id,
                        "label": session.current.label,
                        "status": session.status,
                        "s_orig": first.score,
                        "s_adv": latest.score,
                        "improvement_pct": improvement_pct(first.score, latest.score),
                        "swap_count": latest.swap_count,
                        "wmd": summary.wmd,
                        "pct_original_remaining": summary.pct_original_remaining,
                        "avg_swap_lm": summary.avg_swap_lm,
                        "min_swap_lm": summary.min_swap_lm,
                        "summary": summary.summary,
                    }
                )
        # lowest summary first: the weakest adversaries need editing most
        rows.sort(key=lambda r: (r["summary"], r["session_id"]))
        return {"sessions": rows}

    def stream(self, sid: str, from_seq: int, follow: bool) -> Iterator[str]:
        session = self.get(sid)
        with session.lock:
            backlog = [e for e in session.events if e["seq"] >= from_seq]
            subscription: queue.SimpleQueue | None = None
            if follow:
                subscription = queue.SimpleQueue()
                session.listeners.append(subscription)

        def generate():
            try:
                for event in backlog:
                    yield json.dumps(event) + "\n"
                while subscription is not None:
                    try:
                        event = subscription.get(timeout=15.0)
                    except queue.Empty:
                        yield "\n"  # keep-alive
                        continue
                    yield json.dumps(event) + "\n"
            finally:
                if subscription is not None:
                    with session.lock:
                        if subscription in session.listeners:
                            session.listeners.remove(subscription)

        return generate()

    def _publish(self, session: _Session, event: dict) -> None:
        # caller holds session.lock, so replay + subscribe cannot race
        session.events.append(event)
        for listener in session.listeners:
            listener.put(event)

    # -- corpus -------------------------------------------------------

    def ingest_corpus(self, body: str) -> dict:
        records = []
        for lineno, line in enumerate(body.splitlines(), 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InvalidConfig(f"corpus line {lineno}: {exc}") from exc
            for key in ("id", "text", "label"):
                if key not in record:
                    raise InvalidConfig(f"corpus line {lineno}: missing {key!r}")
            records.append(record)
        with self._lock:
            for record in records:
                self.corpus[record["id"]] = record
            self._persist_corpus()
        return {"ingested": len(records), "total": len(self.corpus)}

    def corpus_index(self) -> dict:
        with self._lock:
            return {
                "records": [
                    {"id": r["id"], "label": r["label"]}
                    for r in sorted(self.corpus.values(), key=lambda r: r["id"])
                ]
            }

    # -- persistence --------------------------------------------------

    def _session_dir(self) -> Path | None:
        if self.resources.data_dir is None:
            return None
        return self.resources.data_dir / "sessions"

    def _persist(self, session: _Session) -> None:
        directory = self._session_dir()
        if directory is None:
            return
        directory.mkdir(parents=True, exist_ok=True)
        with session.lock:
            status, reason = session.status, session.stop_reason
            if status == "attacking":
                status, reason = "stopped", "interrupted"
            payload = {
                "id": session.id,
                "status": status,
                "stop_reason": reason,
                "config": config_to_dict(session.config),
                "classifier": dict(session.classifier_ref),
                "queries_used": session.classifier.query_index,
                "log": json.loads(session.log.to_json()),
                "events": list(session.events),
            }
        path = directory / f"{session.id}.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(payload, indent=2), encoding="utf-8")
        tmp.replace(path)

    def _persist_corpus(self) -> None:
        if self.resources.data_dir is None:
            return
        self.resources.data_dir.mkdir(parents=True, exist_ok=True)
        lines = [
            json.dumps(self.corpus[key]) for key in sorted(self.corpus)
        ]
        path = self.resources.data_dir / "corpus.jsonl"
        path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")

    def _load_persisted(self) -> None:
        if self.resources.data_dir is None:
            return
        corpus_path = self.resources.data_dir / "corpus.jsonl"
        if corpus_path.exists():
            for record in fixtures.load_corpus(corpus_path):
                self.corpus.setdefault(record["id"], record)
        directory = self._session_dir()
        if directory is None or not directory.exists():
            return
        for path in sorted(directory.glob("*.json")):
            data = json.loads(path.read_text(encoding="utf-8"))
            config = config_from_dict(data["config"])
            ref = normalize_classifier_ref(data["classifier"])
            classifier = make_classifier(ref, self.resources.lexicon, self.resources.clusters)
            classifier.restore_query_count(data["queries_used"])
            session = _Session(data["id"], config, ref, classifier, self.snapshot_clock)
            session.log = SnapshotLog.from_json(json.dumps(data["log"]))
            session.log.clock = self.snapshot_clock
            session.current = session.log.latest().doc
            session.status = data["status"]
            session.stop_reason = data["stop_reason"]
            session.events = list(data["events"])
            self.sessions[session.id] = session


def create_app(resources: Resources | None = None, snapshot_clock: Callable[[], str] | None = None) -> FastAPI:
    resources = resources or load_resources()
    app = FastAPI(title="advtext workbench")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    manager = SessionManager(resources, snapshot_clock)
    app.state.manager = manager

    @app.exception_handler(AdvTextError)
    def handle_domain_error(request: Request, exc: AdvTextError):
        status = 400
        for cls in type(exc).__mro__:
            if cls in _ERROR_STATUS:
                status = _ERROR_STATUS[cls]
                break
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(ValueError)
    def handle_value_error(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=400,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict = Body(...)):
        return manager.create_session(payload)

    @app.get("/sessions")
    def list_sessions():
        return manager.index()

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        return manager.session_state(manager.get(sid))

    @app.post("/sessions/{sid}/attack", status_code=202)
    def start_attack(sid: str):
        return manager.start_attack(sid)

    @app.post("/sessions/{sid}/stop")
    def stop_attack(sid: str):
        return manager.stop_attack(sid)

    @app.post("/sessions/{sid}/swap")
    def user_swap(sid: str, payload: dict = Body(...)):
        return manager.user_swap(sid, payload)

    @app.post("/sessions/{sid}/revert")
    def revert_to(sid: str, payload: dict = Body(...)):
        return manager.revert_to(sid, payload)

    @app.get("/sessions/{sid}/encodings")
    def encodings(sid: str):
        return manager.encodings(sid)

    @app.get("/sessions/{sid}/candidates")
    def candidates(sid: str, pos: int):
        return manager.candidates(sid, pos)

    @app.get("/sessions/{sid}/summaries")
    def summaries(sid: str):
        return manager.summaries(sid)

    @app.get("/sessions/{sid}/stream")
    def stream(sid: str, from_seq: int = Query(0, alias="from", ge=0), follow: bool = True):
        return StreamingResponse(
            manager.stream(sid, from_seq, follow), media_type="application/x-ndjson"
        )

    @app.post("/corpus")
    async def ingest_corpus(request: Request):
        body = (await request.body()).decode("utf-8")
        return manager.ingest_corpus(body)

    @app.get("/corpus")
    def corpus_index():
        return manager.corpus_index()

    return app


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(
        prog="advtext-serve",
        description="Run the adversarial-text workbench server.",
    )
    parser.add_argument("--port", type=int, default=8008)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--data-dir", help="directory for session persistence")
    parser.add_argument("--embeddings", help="word-vector file (header: count dim)")
    parser.add_argument("--lm", help="ARPA n-gram model")
    parser.add_argument("--lexicon", help="TSV valence lexicon")
    parser.add_argument("--stopwords", help="stop-word list, one per line")
    parser.add_argument("--antonyms", help="TSV antonym map")
    parser.add_argument("--clusters", help="TSV word-to-cluster map for the hardened classifier")
    parser.add_argument("--corpus", help="JSONL corpus to preload")
    args = parser.parse_args(argv)
    resources = load_resources(
        embeddings=args.embeddings,
        lm=args.lm,
        lexicon=args.lexicon,
        stopwords=args.stopwords,
        antonyms=args.antonyms,
        clusters=args.clusters,
        corpus=args.corpus,
        data_dir=args.data_dir,
    )
    uvicorn.run(create_app(resources), host=args.host, port=args.port)


if __name__ == "__main__":
    main()
