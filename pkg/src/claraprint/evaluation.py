"""Retrieval-quality experiments, pairwise fingerprint statistics, timings.

The central protocol: per clique, one recording is drawn (seeded) and held
out; every other recording in the clique queries the full index with its own
document excluded.  Two numbers summarize a run:

* **MT10**: mean count of same-clique documents among the top 10 results
  per query (at most clique size minus one);
* **MT1**: fraction of queries whose rank-1 result belongs to the same
  clique.

Scores are averaged over queries within a round, then over five independent
rounds.  Randomness comes from one master seed split with
``numpy.random.SeedSequence`` per (round, clique), so runs are reproducible
even if cliques are processed out of order or in parallel.

Two variations reuse the same counting:

* the **combination study** merges a recording's fingerprints from several
  extraction sources into one document before indexing;
* the **multi-recording study** merges several recordings of a clique into a
  single reference document, indexes one reference per clique, and lets the
  remaining recordings query that reference index.

Pairwise statistics compare fingerprints within a clique (edit-distance
similarity on the raw strings, shared-word counts on the shingle bags), and
the benchmark measures per-document shingle+insert and query wall-clock
times, warm-up excluded.
"""

from __future__ import annotations

import csv
import time
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from statistics import fmean, pstdev

import numpy as np

from .bm25 import BM25Index, DocRecord, _insert_postings
from .corpus import CorpusSnapshot, docs_by_source, make_doc_id
from .encoder import source_kind
from .errors import MissingSourceError, ProtocolError
from .shingles import combine, multi_shingle


# ---------------------------------------------------------------------------
# String and bag comparisons
# ---------------------------------------------------------------------------

def levenshtein(a: str, b: str) -> int:
    """Minimum number of single-character edits transforming ``a`` into ``b``."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i] + [0] * len(b)
        for j, cb in enumerate(b, 1):
            current[j] = min(
                previous[j] + 1,         # deletion
                current[j - 1] + 1,      # insertion
                previous[j - 1] + (ca != cb),
            )
        previous = current
    return previous[-1]


def lev_similarity(a: str, b: str) -> float:
    """Edit similarity in [0, 1]: ``1 - distance / max(|a|, |b|)``.

    Two empty strings are identical, hence 1.0.
    """
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def common_words(a: Counter[str], b: Counter[str]) -> int:
    """Number of distinct terms present in both bags (multiplicity ignored)."""
    return len(a.keys() & b.keys())


def jaccard(a: Counter[str], b: Counter[str]) -> float:
    """Jaccard similarity of the distinct-term sets; 1.0 when both are empty."""
    union = len(a.keys() | b.keys())
    if union == 0:
        return 1.0
    return common_words(a, b) / union


# ---------------------------------------------------------------------------
# Result containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RetrievalMetrics:
    mt10: float
    mt1: float
    n_queries: int
    repeats: int


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    min: float
    max: float
    std: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "SummaryStats":
        # Population standard deviation: these are exhaustive pair sets,
        # not samples from a larger population.
        return cls(
            mean=fmean(values),
            min=min(values),
            max=max(values),
            std=pstdev(values),
        )


@dataclass(frozen=True)
class PairwiseStats:
    source: str
    n_pairs: int
    lev_similarity: SummaryStats
    common_words: SummaryStats
    jaccard: SummaryStats


@dataclass(frozen=True)
class TimingRow:
    source: str
    n_docs: int
    ingest_mean_ms: float
    ingest_std_ms: float
    query_mean_ms: float
    query_std_ms: float


@dataclass
class TimingReport:
    rows: list[TimingRow]


# ---------------------------------------------------------------------------
# Retrieval protocol
# ---------------------------------------------------------------------------

def _cliques_of(docs: Iterable[DocRecord]) -> list[tuple[str, list[DocRecord]]]:
    groups: dict[str, list[DocRecord]] = {}
    for doc in docs:
        groups.setdefault(doc.work_id, []).append(doc)
    return [
        (work_id, sorted(group, key=lambda d: d.doc_id))
        for work_id, group in sorted(groups.items())
    ]


def _clique_rng(seed: int, repeat: int, clique_index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(repeat, clique_index))
    )


def protocol_repeat(
    index: BM25Index, repeat: int, *, seed: int, top_k: int = 10
) -> tuple[float, float, int]:
    """One round of the hold-out protocol; returns (mt10, mt1, n_queries).

    Deterministic given (seed, repeat).  Exposed separately so callers can
    verify that a multi-round run equals the mean of its rounds.
    """
    cliques = _cliques_of(index.docs_.values())
    too_small = [work_id for work_id, group in cliques if len(group) < 2]
    if too_small:
        raise ProtocolError(
            f"cliques with fewer than 2 recordings cannot be evaluated: {too_small}"
        )

    mt10_values: list[float] = []
    mt1_values: list[float] = []
    for clique_index, (work_id, group) in enumerate(cliques):
        rng = _clique_rng(seed, repeat, clique_index)
        held_out = group[int(rng.integers(len(group)))]
        for query_doc in group:
            if query_doc.doc_id == held_out.doc_id:
                continue
            results = index.search(
                query_doc.bag, top_k=top_k, exclude={query_doc.doc_id}
            )
            same = sum(
                1 for doc_id, _ in results if index.docs_[doc_id].work_id == work_id
            )
            mt10_values.append(float(same))
            top_hit = bool(results) and index.docs_[results[0][0]].work_id == work_id
            mt1_values.append(1.0 if top_hit else 0.0)
    return fmean(mt10_values), fmean(mt1_values), len(mt10_values)


def run_retrieval_protocol(
    index: BM25Index, *, seed: int, repeats: int = 5, top_k: int = 10
) -> RetrievalMetrics:
    """Hold-out retrieval over every clique in the index, averaged over rounds."""
    per_round = [
        protocol_repeat(index, repeat, seed=seed, top_k=top_k)
        for repeat in range(repeats)
    ]
    return RetrievalMetrics(
        mt10=fmean(mt10 for mt10, _, _ in per_round),
        mt1=fmean(mt1 for _, mt1, _ in per_round),
        n_queries=sum(n for _, _, n in per_round),
        repeats=repeats,
    )


# ---------------------------------------------------------------------------
# Combination studies
# ---------------------------------------------------------------------------

def combined_documents(
    snapshot: CorpusSnapshot, combo: Iterable[str]
) -> list[DocRecord]:
    """Merge each recording's fingerprints for the given sources into one doc.

    Raises :class:`MissingSourceError` if any recording lacks one of the
    requested sources.  The result is independent of combo order.
    """
    tags = tuple(sorted(set(combo)))
    if not tags:
        raise ValueError("combo must name at least one source")
    for tag in tags:
        source_kind(tag)
    label = "+".join(tags)

    by_recording: dict[str, dict[str, DocRecord]] = {}
    for doc in snapshot.docs:
        by_recording.setdefault(doc.meta["recording_id"], {})[doc.meta["source"]] = doc

    merged: list[DocRecord] = []
    for recording_id in sorted(by_recording):
        available = by_recording[recording_id]
        missing = [tag for tag in tags if tag not in available]
        if missing:
            raise MissingSourceError(
                f"recording {recording_id!r} has no fingerprint for {missing}"
            )
        parts = [available[tag] for tag in tags]
        bag = combine((part.meta["letters"] for part in parts), snapshot.config.widths)
        merged.append(
            DocRecord(
                doc_id=make_doc_id(recording_id, label, snapshot.config.duration_s),
                work_id=parts[0].work_id,
                bag=bag,
                meta={
                    "recording_id": recording_id,
                    "source": label,
                    "duration_s": snapshot.config.duration_s,
                },
            )
        )
    return merged


def run_combination_study(
    snapshot: CorpusSnapshot,
    combos: Iterable[Iterable[str]],
    *,
    seed: int,
    repeats: int = 5,
    top_k: int = 10,
) -> dict[str, RetrievalMetrics]:
    """Retrieval protocol over source-combined documents, one entry per combo."""
    config = snapshot.config
    results: dict[str, RetrievalMetrics] = {}
    for combo in combos:
        docs = combined_documents(snapshot, combo)
        label = "+".join(sorted(set(combo)))
        index = BM25Index(
            k1=config.k1, b=config.b, idf_variant=config.idf_variant
        ).fit(docs)
        results[label] = run_retrieval_protocol(
            index, seed=seed, repeats=repeats, top_k=top_k
        )
    return results


def run_multi_recording_study(
    snapshot: CorpusSnapshot,
    source: str,
    n_refs: int,
    *,
    seed: int,
    repeats: int = 5,
    top_k: int = 10,
) -> RetrievalMetrics:
    """Merge ``n_refs`` recordings per clique into one reference and query it.

    Per round: each clique contributes one combined reference document; the
    clique's remaining recordings query the reference index.  MT10/MT1 then
    measure whether the right reference shows up in the top 10 / at rank 1.
    """
    if n_refs < 1:
        raise ValueError(f"n_refs must be >= 1, got {n_refs}")
    source_docs = docs_by_source(snapshot).get(source)
    if not source_docs:
        raise ProtocolError(f"snapshot has no documents for source {source!r}")
    cliques = _cliques_of(source_docs)
    too_small = [work_id for work_id, group in cliques if len(group) <= n_refs]
    if too_small:
        raise ProtocolError(
            f"cliques must hold more than n_refs={n_refs} recordings: {too_small}"
        )

    config = snapshot.config
    mt10_rounds: list[float] = []
    mt1_rounds: list[float] = []
    n_queries = 0
    for repeat in range(repeats):
        references: list[DocRecord] = []
        queries: list[DocRecord] = []
        for clique_index, (work_id, group) in enumerate(cliques):
            rng = _clique_rng(seed, repeat, clique_index)
            chosen = sorted(
                int(i) for i in rng.choice(len(group), size=n_refs, replace=False)
            )
            refs = [group[i] for i in chosen]
            ref_ids = {doc.doc_id for doc in refs}
            references.append(
                DocRecord(
                    doc_id=f"{work_id}:reference",
                    work_id=work_id,
                    bag=combine(
                        (doc.meta["letters"] for doc in refs), config.widths
                    ),
                    meta={"source": source, "n_refs": n_refs},
                )
            )
            queries.extend(doc for doc in group if doc.doc_id not in ref_ids)

        index = BM25Index(
            k1=config.k1, b=config.b, idf_variant=config.idf_variant
        ).fit(references)
        hits10: list[float] = []
        hits1: list[float] = []
        for query_doc in queries:
            results = index.search(query_doc.bag, top_k=top_k)
            same = [
                doc_id
                for doc_id, _ in results
                if index.docs_[doc_id].work_id == query_doc.work_id
            ]
            hits10.append(1.0 if same else 0.0)
            top_hit = bool(results) and (
                index.docs_[results[0][0]].work_id == query_doc.work_id
            )
            hits1.append(1.0 if top_hit else 0.0)
        mt10_rounds.append(fmean(hits10))
        mt1_rounds.append(fmean(hits1))
        n_queries += len(queries)

    return RetrievalMetrics(
        mt10=fmean(mt10_rounds),
        mt1=fmean(mt1_rounds),
        n_queries=n_queries,
        repeats=repeats,
    )


# ---------------------------------------------------------------------------
# Pairwise statistics
# ---------------------------------------------------------------------------

def run_pairwise(snapshot: CorpusSnapshot) -> dict[str, PairwiseStats]:
    """Within-clique fingerprint similarity statistics, per source."""
    stats: dict[str, PairwiseStats] = {}
    for source, docs in docs_by_source(snapshot).items():
        sims: list[float] = []
        shared: list[float] = []
        jaccards: list[float] = []
        for _, group in _cliques_of(docs):
            for left, right in combinations(group, 2):
                sims.append(lev_similarity(left.meta["letters"], right.meta["letters"]))
                shared.append(float(common_words(left.bag, right.bag)))
                jaccards.append(jaccard(left.bag, right.bag))
        if not sims:
            continue
        stats[source] = PairwiseStats(
            source=source,
            n_pairs=len(sims),
            lev_similarity=SummaryStats.of(sims),
            common_words=SummaryStats.of(shared),
            jaccard=SummaryStats.of(jaccards),
        )
    return stats


# ---------------------------------------------------------------------------
# Timing benchmark
# ---------------------------------------------------------------------------

def run_bench(snapshot: CorpusSnapshot, *, top_k: int = 10) -> TimingReport:
    """Per-source mean ingestion (shingle + postings insert) and query times.

    Single-threaded on purpose; a full warm-up pass runs before each
    measured pass so interpreter and cache effects stay out of the numbers.
    """
    config = snapshot.config
    rows: list[TimingRow] = []
    for source, docs in docs_by_source(snapshot).items():
        letters = [doc.meta["letters"] for doc in docs]

        warmup: dict[str, list[tuple[int, int]]] = {}
        for i, s in enumerate(letters):
            _insert_postings(warmup, i, multi_shingle(s, config.widths))

        ingest_ms: list[float] = []
        postings: dict[str, list[tuple[int, int]]] = {}
        for i, s in enumerate(letters):
            started = time.perf_counter()
            bag = multi_shingle(s, config.widths)
            _insert_postings(postings, i, bag)
            ingest_ms.append((time.perf_counter() - started) * 1000.0)

        index = BM25Index(
            k1=config.k1, b=config.b, idf_variant=config.idf_variant
        ).fit(docs)
        for doc in docs:
            index.search(doc.bag, top_k=top_k)
        query_ms: list[float] = []
        for doc in docs:
            started = time.perf_counter()
            index.search(doc.bag, top_k=top_k)
            query_ms.append((time.perf_counter() - started) * 1000.0)

        rows.append(
            TimingRow(
                source=source,
                n_docs=len(docs),
                ingest_mean_ms=fmean(ingest_ms),
                ingest_std_ms=pstdev(ingest_ms) if len(ingest_ms) > 1 else 0.0,
                query_mean_ms=fmean(query_ms),
                query_std_ms=pstdev(query_ms) if len(query_ms) > 1 else 0.0,
            )
        )
    return TimingReport(rows=rows)


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

def write_retrieval_csv(
    rows: Iterable[tuple[str, int, int, RetrievalMetrics]], path: str | Path
) -> None:
    """One row per configuration: sources, duration_s, n_refs, mt10, mt1."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["sources", "duration_s", "n_refs", "mt10", "mt1"])
        for sources, duration_s, n_refs, metrics in rows:
            writer.writerow([sources, duration_s, n_refs, metrics.mt10, metrics.mt1])


def write_pairwise_csv(stats: dict[str, PairwiseStats], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["source", "metric", "mean", "min", "max", "std", "n_pairs"])
        for source in sorted(stats):
            entry = stats[source]
            for metric, summary in (
                ("lev_similarity", entry.lev_similarity),
                ("common_words", entry.common_words),
                ("jaccard", entry.jaccard),
            ):
                writer.writerow(
                    [
                        source,
                        metric,
                        summary.mean,
                        summary.min,
                        summary.max,
                        summary.std,
                        entry.n_pairs,
                    ]
                )


def write_timing_csv(report: TimingReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["source", "phase", "mean_ms", "std_ms", "n_docs"])
        for row in report.rows:
            writer.writerow(
                [row.source, "ingest", row.ingest_mean_ms, row.ingest_std_ms, row.n_docs]
            )
            writer.writerow(
                [row.source, "query", row.query_mean_ms, row.query_std_ms, row.n_docs]
            )
