"""Packaged fixture data: a tiny 8-word space for worked examples and a
larger movie-review vocabulary for the bench and the demos.

These double as the default resources for the server and bench CLIs, so
everything runs out of the box.
"""

from __future__ import annotations

import json
from pathlib import Path

from .classifiers import load_clusters, load_lexicon
from .embeddings import EmbeddingStore, load_antonyms, load_embeddings, load_stopwords
from .lm import NGramModel, load_arpa

DATA_DIR = Path(__file__).parent / "data"


def data_path(name: str) -> Path:
    return DATA_DIR / name


def load_toy_store(**kwargs) -> EmbeddingStore:
    kwargs.setdefault("stop_words", load_stopwords(data_path("stopwords.txt")))
    kwargs.setdefault("antonyms", load_antonyms(data_path("antonyms.tsv")))
    return load_embeddings(data_path("toy/embeddings.txt"), **kwargs)


def load_toy_lexicon() -> dict[str, float]:
    return load_lexicon(data_path("toy/lexicon.tsv"))


def load_toy_lm() -> NGramModel:
    return load_arpa(data_path("toy/lm.arpa"))


def load_bench_store(**kwargs) -> EmbeddingStore:
    kwargs.setdefault("stop_words", load_stopwords(data_path("stopwords.txt")))
    kwargs.setdefault("antonyms", load_antonyms(data_path("antonyms.tsv")))
    return load_embeddings(data_path("bench/embeddings.txt"), **kwargs)


def load_bench_lexicon() -> dict[str, float]:
    return load_lexicon(data_path("bench/lexicon.tsv"))


def load_bench_clusters() -> dict[str, str]:
    return load_clusters(data_path("bench/clusters.tsv"))


def load_bench_lm() -> NGramModel:
    return load_arpa(data_path("bench/lm.arpa"))


def load_bench_corpus() -> list[dict]:
    return load_corpus(data_path("bench/corpus.jsonl"))


def load_corpus(path: str | Path) -> list[dict]:
    """JSONL records with id, text, and label fields."""
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        for key in ("id", "text", "label"):
            if key not in rec:
                raise ValueError(f"{path}: corpus record missing {key!r}: {line[:80]}")
        records.append(rec)
    return records
