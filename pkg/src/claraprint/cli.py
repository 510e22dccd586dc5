"""Command-line interface: ingest, query, evaluate, pairwise, bench."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bm25 import BM25Index
from .corpus import (
    CorpusConfig,
    CorpusSnapshot,
    load_annotation,
    load_snapshot,
    materialize,
    save_snapshot,
    sources_in,
)
from .encoder import fingerprint
from .errors import ClaraprintError, DegenerateFingerprintError
from .evaluation import (
    run_bench,
    run_combination_study,
    run_multi_recording_study,
    run_pairwise,
    write_pairwise_csv,
    write_retrieval_csv,
    write_timing_csv,
)
from .shingles import multi_shingle
from .validation import DEFAULT_WIDTHS, IDF_VARIANTS, VALID_DURATIONS


def _parse_widths(text: str) -> tuple[int, ...]:
    """Accept '2-7' range syntax or a comma list like '2,3,4'."""
    text = text.strip()
    if "-" in text and "," not in text:
        low, _, high = text.partition("-")
        return tuple(range(int(low), int(high) + 1))
    return tuple(int(part) for part in text.split(",") if part.strip())


def _parse_combos(text: str) -> list[tuple[str, ...]]:
    """'ch,cr,ch+me' -> [('ch',), ('cr',), ('ch', 'me')]."""
    combos = []
    for item in text.split(","):
        item = item.strip()
        if item:
            combos.append(tuple(sorted(item.split("+"))))
    return combos


def _parse_n_refs(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _print_table(header: list[str], rows: list[list[str]]) -> None:
    widths = [
        max(len(header[i]), *(len(row[i]) for row in rows)) if rows else len(header[i])
        for i in range(len(header))
    ]
    line = "  ".join(h.ljust(w) for h, w in zip(header, widths))
    print(line)
    print("  ".join("-" * w for w in widths))
    for row in rows:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))


def _build_index(snapshot: CorpusSnapshot) -> BM25Index:
    config = snapshot.config
    return BM25Index(
        k1=config.k1, b=config.b, idf_variant=config.idf_variant
    ).fit(snapshot.docs)


def cmd_ingest(args: argparse.Namespace) -> int:
    input_dir = Path(args.input_dir)
    if not input_dir.is_dir():
        print(f"error: {input_dir} is not a directory", file=sys.stderr)
        return 1
    files = sorted(input_dir.glob("*.json"))
    if not files:
        print(f"error: no annotation files (*.json) in {input_dir}", file=sys.stderr)
        return 1

    annotations = []
    warnings: list[str] = []
    for path in files:
        try:
            annotations.append(load_annotation(path))
        except ClaraprintError as exc:
            warnings.append(str(exc))
    if not annotations:
        for warning in warnings:
            print(f"warning: {warning}", file=sys.stderr)
        print(f"error: no parseable annotation files in {input_dir}", file=sys.stderr)
        return 1

    config = CorpusConfig(
        duration_s=args.duration,
        confidence_min=args.confidence_min,
        widths=args.widths,
        k1=args.k1,
        b=args.b,
        idf_variant=args.idf,
    )
    snapshot, report = materialize(annotations, config)
    save_snapshot(snapshot, args.snapshot)

    warnings.extend(report.warnings)
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(
        f"{report.n_docs} docs, {report.n_cliques} cliques, "
        f"{len(report.degenerate_doc_ids)} degenerate fingerprints, "
        f"{len(warnings)} warnings -> {args.snapshot}"
    )
    return 0


def cmd_query(args: argparse.Namespace) -> int:
    snapshot = load_snapshot(args.snapshot)
    config = snapshot.config
    # Fingerprints from different settings are not comparable; refuse
    # explicit overrides that contradict the snapshot instead of re-encoding.
    if args.duration is not None and args.duration != config.duration_s:
        print(
            f"error: snapshot was built with --duration {config.duration_s}, "
            f"refusing mismatched --duration {args.duration}",
            file=sys.stderr,
        )
        return 1
    if args.confidence_min is not None and args.confidence_min != config.confidence_min:
        print(
            f"error: snapshot was built with --confidence-min "
            f"{config.confidence_min}, refusing mismatched value",
            file=sys.stderr,
        )
        return 1

    annotation = load_annotation(args.annotation_file)
    print_ = fingerprint(annotation, config.encoder_config())
    if print_.is_degenerate:
        raise DegenerateFingerprintError(
            "query too short: the annotation yields fewer than 2 "
            "fingerprint letters in the analysis window"
        )

    index = _build_index(snapshot)
    results = index.search(multi_shingle(print_.letters, config.widths), top_k=args.top_k)
    if not results:
        print("no matches")
        return 0
    rows = []
    for rank, (doc_id, score) in enumerate(results, 1):
        doc = index.docs_[doc_id]
        rows.append(
            [str(rank), doc.work_id, doc.meta.get("recording_id", doc_id), f"{score:.4f}"]
        )
    _print_table(["rank", "work_id", "recording_id", "score"], rows)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    snapshot = load_snapshot(args.snapshot)
    combos = (
        _parse_combos(args.sources)
        if args.sources
        else [(source,) for source in sources_in(snapshot)]
    )
    combo_metrics = run_combination_study(
        snapshot, combos, seed=args.seed, repeats=args.repeats, top_k=args.top_k
    )

    rows = [
        (label, snapshot.config.duration_s, 1, combo_metrics[label])
        for label in sorted(combo_metrics)
    ]
    for n_refs in args.n_refs:
        for source in sources_in(snapshot):
            metrics = run_multi_recording_study(
                snapshot,
                source,
                n_refs,
                seed=args.seed,
                repeats=args.repeats,
                top_k=args.top_k,
            )
            rows.append((source, snapshot.config.duration_s, n_refs, metrics))

    write_retrieval_csv(rows, args.out)
    _print_table(
        ["sources", "duration_s", "n_refs", "mt10", "mt1"],
        [
            [sources, str(duration), str(n_refs), f"{m.mt10:.3f}", f"{m.mt1:.3f}"]
            for sources, duration, n_refs, m in rows
        ],
    )
    print(f"wrote {args.out}")
    return 0


def cmd_pairwise(args: argparse.Namespace) -> int:
    snapshot = load_snapshot(args.snapshot)
    stats = run_pairwise(snapshot)
    write_pairwise_csv(stats, args.out)
    rows = []
    for source in sorted(stats):
        entry = stats[source]
        rows.append(
            [
                source,
                f"{entry.lev_similarity.mean:.3f}",
                f"{entry.common_words.mean:.1f}",
                f"{entry.jaccard.mean:.3f}",
                str(entry.n_pairs),
            ]
        )
    _print_table(["source", "lev_sim", "common_words", "jaccard", "pairs"], rows)
    print(f"wrote {args.out}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    snapshot = load_snapshot(args.snapshot)
    report = run_bench(snapshot, top_k=args.top_k)
    write_timing_csv(report, args.out)
    rows = [
        [
            row.source,
            f"{row.ingest_mean_ms:.3f}",
            f"{row.ingest_std_ms:.3f}",
            f"{row.query_mean_ms:.3f}",
            f"{row.query_std_ms:.3f}",
            str(row.n_docs),
        ]
        for row in report.rows
    ]
    _print_table(
        ["source", "ingest_ms", "ingest_std", "query_ms", "query_std", "docs"], rows
    )
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="claraprint",
        description=(
            "Fingerprint chord/melody annotations of classical-music "
            "recordings and retrieve which work a recording belongs to."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="build a corpus snapshot from annotation files")
    ingest.add_argument("input_dir", help="directory of annotation *.json files")
    ingest.add_argument("snapshot", help="output snapshot path")
    ingest.add_argument("--duration", type=int, default=120, choices=VALID_DURATIONS)
    ingest.add_argument("--confidence-min", type=float, default=0.0)
    ingest.add_argument("--widths", type=_parse_widths, default=DEFAULT_WIDTHS)
    ingest.add_argument("--k1", type=float, default=1.2)
    ingest.add_argument("--b", type=float, default=0.75)
    ingest.add_argument("--idf", choices=IDF_VARIANTS, default="nonneg")
    ingest.set_defaults(func=cmd_ingest)

    query = sub.add_parser("query", help="rank snapshot recordings against one annotation file")
    query.add_argument("snapshot")
    query.add_argument("annotation_file")
    query.add_argument("--top-k", type=int, default=10)
    query.add_argument("--duration", type=int, default=None, choices=VALID_DURATIONS)
    query.add_argument("--confidence-min", type=float, default=None)
    query.set_defaults(func=cmd_query)

    evaluate = sub.add_parser("evaluate", help="run the retrieval protocols and write a CSV")
    evaluate.add_argument("snapshot")
    evaluate.add_argument(
        "--sources",
        default=None,
        help="comma list of sources/combos, e.g. 'ch,cr,ch+cr' (default: every single source)",
    )
    evaluate.add_argument(
        "--n-refs",
        type=_parse_n_refs,
        default=[],
        help="comma list of reference-combination sizes to evaluate, e.g. '1,2,3,4'",
    )
    evaluate.add_argument("--seed", type=int, default=42)
    evaluate.add_argument("--repeats", type=int, default=5)
    evaluate.add_argument("--top-k", type=int, default=10)
    evaluate.add_argument("--out", default="retrieval.csv")
    evaluate.set_defaults(func=cmd_evaluate)

    pairwise = sub.add_parser("pairwise", help="within-clique fingerprint statistics")
    pairwise.add_argument("snapshot")
    pairwise.add_argument("--out", default="pairwise.csv")
    pairwise.set_defaults(func=cmd_pairwise)

    bench = sub.add_parser("bench", help="ingestion and query timing per source")
    bench.add_argument("snapshot")
    bench.add_argument("--top-k", type=int, default=10)
    bench.add_argument("--out", default="bench.csv")
    bench.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ClaraprintError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
