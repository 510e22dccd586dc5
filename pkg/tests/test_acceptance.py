"""Acceptance suite: one test per release criterion, one PASS line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; every tolerance and threshold is pinned here, not configurable.
"""

import math
import string
import time
from collections import Counter
from contextlib import contextmanager

import numpy as np
import pytest

from claraprint import (
    BM25Index,
    DocRecord,
    EncoderConfig,
    MELODY_ALPHABET,
    AnnotationDoc,
    AnnotationEvent,
    clean_events,
    dedup,
    fingerprint,
    levenshtein,
    load_snapshot,
    multi_shingle,
    run_multi_recording_study,
    run_retrieval_protocol,
    save_snapshot,
    shingle,
)
from claraprint.cli import main
from conftest import clique_docs, snapshot_of
from reference_impls import (
    brute_force_ranking,
    brute_force_scores,
    random_corpus_case,
    recursive_levenshtein,
)


@contextmanager
def criterion(name):
    try:
        yield
    except Exception:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


def test_01_bm25_oracle_equivalence():
    with criterion("1. BM25 search matches brute-force scorer on 200 random corpora (<= 1e-9, < 10 s)"):
        rng = np.random.default_rng(20240)
        started = time.perf_counter()
        for _ in range(200):
            docs, query, params, exclude = random_corpus_case(rng)
            index = BM25Index(**params).fit(
                [DocRecord(doc_id, "w", Counter(bag)) for doc_id, bag in docs]
            )
            got = index.search(Counter(query), top_k=len(docs), exclude=exclude)
            want = brute_force_ranking(docs, query, top_k=len(docs), exclude=exclude, **params)
            assert [d for d, _ in got] == [d for d, _ in want]
            for (_, got_score), (_, want_score) in zip(got, want):
                assert abs(got_score - want_score) <= 1e-9
            oracle = brute_force_scores(docs, query, **params)
            for doc_id, _ in docs:
                assert abs(index.score(doc_id, Counter(query)) - oracle[doc_id]) <= 1e-9
        elapsed = time.perf_counter() - started
        assert elapsed < 10.0, f"oracle comparison took {elapsed:.1f} s"


def test_02_idf_spot_values():
    with criterion("2. IDF spot values: (N=2,n=1,paper) = 0; (N=1,n=1,nonneg) = ln(4/3) +- 1e-12"):
        balanced = BM25Index(idf_variant="paper").fit(
            [
                DocRecord("d1", "w", Counter({"xx": 1})),
                DocRecord("d2", "w", Counter({"yy": 1})),
            ]
        )
        assert balanced.idf("xx") == 0.0
        single = BM25Index(idf_variant="nonneg").fit(
            [DocRecord("d1", "w", Counter({"xx": 1}))]
        )
        assert abs(single.idf("xx") - math.log(4 / 3)) <= 1e-12


def test_03_encoder_golden_pipelines():
    with criterion("3. Encoder goldens: chords C,C,G,C -> 'hf'; melody 440,880,261.63 Hz -> [9,0] -> one letter"):
        chords = AnnotationDoc(
            recording_id="r", work_id="w", source="ch",
            events=[
                AnnotationEvent(0.0, 1.0, "C", 0.9),
                AnnotationEvent(1.0, 1.0, "C", 0.9),
                AnnotationEvent(2.0, 1.0, "G", 0.9),
                AnnotationEvent(3.0, 1.0, "C", 0.9),
            ],
        )
        assert fingerprint(chords, EncoderConfig()).letters == "hf"

        melody = AnnotationDoc(
            recording_id="r", work_id="w", source="me",
            events=[
                AnnotationEvent(0.0, 0.1, 440.0),
                AnnotationEvent(1.0, 0.1, 880.0),
                AnnotationEvent(2.0, 0.1, 261.63),
            ],
        )
        assert dedup(clean_events(melody, EncoderConfig())) == [9, 0]
        letters = fingerprint(melody, EncoderConfig()).letters
        assert len(letters) == 1
        # interval (0 - 9) mod 12 = 3
        assert letters == MELODY_ALPHABET[3]


def test_04_shingle_laws():
    with criterion("4. Shingle laws on 1000 random strings, all widths; reference string yields its 6 words"):
        rng = np.random.default_rng(4)
        alphabet = "bcdefghijkl"
        for _ in range(1000):
            length = int(rng.integers(0, 31))
            s = "".join(alphabet[int(i)] for i in rng.integers(len(alphabet), size=length))
            per_width = []
            for w in range(2, 8):
                words = shingle(s, w)
                assert len(words) == max(0, len(s) - w + 1)
                per_width.append(len(words))
            assert multi_shingle(s, range(2, 8)).total() == sum(per_width)
        assert shingle("abfhqjfui", 4) == ["abfh", "bfhq", "fhqj", "hqjf", "qjfu", "jfui"]


def test_05_synthetic_clique_retrieval():
    with criterion("5. 50x5 synthetic cliques (10% edits): MT10 >= 3.5, MT1 >= 0.95, < 30 s"):
        started = time.perf_counter()
        docs = clique_docs(
            n_cliques=50, clique_size=5, length=150, edit_rate=0.10, seed=7
        )
        index = BM25Index().fit(docs)
        metrics = run_retrieval_protocol(index, seed=42, repeats=5)
        elapsed = time.perf_counter() - started
        assert metrics.mt10 >= 3.5, f"MT10 {metrics.mt10:.3f} below 3.5"
        assert metrics.mt1 >= 0.95, f"MT1 {metrics.mt1:.3f} below 0.95"
        assert elapsed < 30.0, f"protocol took {elapsed:.1f} s"


def test_06_longer_window_not_worse():
    with criterion("6. Fingerprints truncated to 150 letters score MT10 >= the 40-letter truncation"):
        short = clique_docs(
            n_cliques=50, clique_size=5, length=150, edit_rate=0.30, seed=7, prefix_len=40
        )
        long = clique_docs(
            n_cliques=50, clique_size=5, length=150, edit_rate=0.30, seed=7, prefix_len=150
        )
        short_metrics = run_retrieval_protocol(BM25Index().fit(short), seed=42, repeats=3)
        long_metrics = run_retrieval_protocol(BM25Index().fit(long), seed=42, repeats=3)
        assert long_metrics.mt10 >= short_metrics.mt10, (
            f"MT10 {long_metrics.mt10:.3f} (150 letters) < "
            f"{short_metrics.mt10:.3f} (40 letters)"
        )


def test_07_more_references_not_worse():
    with criterion("7. Multi-recording references: MT10(n_refs=4) >= MT10(n_refs=1), same seed"):
        snapshot = snapshot_of(
            clique_docs(n_cliques=50, clique_size=5, length=150, edit_rate=0.35, seed=7)
        )
        one = run_multi_recording_study(snapshot, "ch", 1, seed=42, repeats=3)
        four = run_multi_recording_study(snapshot, "ch", 4, seed=42, repeats=3)
        assert four.mt10 >= one.mt10, f"{four.mt10:.3f} < {one.mt10:.3f}"


def test_08_determinism_and_persistence(annotations_dir, tmp_path):
    with criterion("8. Same-seed evaluate CSVs byte-identical; snapshot save->load->save byte-identical"):
        snap = tmp_path / "corpus.snap"
        assert main(["ingest", str(annotations_dir), str(snap)]) == 0

        first, second = tmp_path / "eval-a.csv", tmp_path / "eval-b.csv"
        args = ["evaluate", str(snap), "--seed", "42", "--n-refs", "1,2", "--repeats", "2"]
        assert main(args + ["--out", str(first)]) == 0
        assert main(args + ["--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()

        resaved = tmp_path / "resaved.snap"
        save_snapshot(load_snapshot(snap), resaved)
        assert snap.read_bytes() == resaved.read_bytes()


def test_09_levenshtein_metric_properties():
    with criterion("9. Levenshtein: 500 random pairs agree exactly with recursive oracle; metric laws hold"):
        rng = np.random.default_rng(9)
        pool = string.ascii_lowercase

        def random_string():
            length = int(rng.integers(0, 31))
            return "".join(pool[int(i)] for i in rng.integers(26, size=length))

        strings = [(random_string(), random_string()) for _ in range(500)]
        for a, b in strings:
            d = levenshtein(a, b)
            assert d == recursive_levenshtein(a, b)
            assert d == levenshtein(b, a)
            assert (d == 0) == (a == b)
        for i in range(0, 498, 2):
            a, b = strings[i]
            c, _ = strings[i + 1]
            assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


def test_10_performance_sanity():
    with criterion("10. 500-doc corpus: full rebuild < 2 s, mean query < 50 ms"):
        docs = clique_docs(
            n_cliques=100, clique_size=5, length=150, edit_rate=0.10, seed=10
        )
        started = time.perf_counter()
        index = BM25Index().fit(docs)
        build_s = time.perf_counter() - started
        assert build_s < 2.0, f"rebuild took {build_s:.2f} s"

        index.search(docs[0].bag, top_k=10)  # warm-up
        started = time.perf_counter()
        for doc in docs:
            index.search(doc.bag, top_k=10)
        mean_ms = (time.perf_counter() - started) * 1000.0 / len(docs)
        assert mean_ms < 50.0, f"mean query latency {mean_ms:.1f} ms"
