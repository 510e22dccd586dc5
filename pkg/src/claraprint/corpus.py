"""Load annotation files, materialize fingerprint documents, persist snapshots.

Annotation files are UTF-8 JSON, one recording+source pair per file:

    {
      "recording_id": "rec-001",
      "work_id": "work-17",
      "source": "ch",                  // ch | cr | me | mp
      "start_at_s": 4.2,               // where the music actually starts
      "live": false,
      "events": [
        {"time_s": 4.2, "duration_s": 1.9, "value": "C:maj", "confidence": 0.91},
        {"time_s": 6.1, "duration_s": 2.3, "value": "G", "confidence": 0.84}
      ]
    }

Chord sources carry label strings, melody sources carry frequencies in Hz
(negative values mark unvoiced frames and are kept as-is here; filtering is
the encoder's job).  Unknown top-level fields are ignored, so files converted
from richer annotation formats only need the fields above.

A corpus snapshot is a line-oriented JSON file: a header record with the
format version and the configuration used, then one record per document,
then one per clique.  Records are written with sorted keys, compact
separators and canonical (doc_id / work_id) ordering, so save -> load ->
save reproduces the file byte for byte.
"""

from __future__ import annotations

import json
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path

from .bm25 import DocRecord
from .encoder import SOURCE_KINDS, AnnotationDoc, AnnotationEvent, EncoderConfig, fingerprint
from .errors import ParseError, SchemaError, SnapshotVersionError
from .shingles import multi_shingle
from .validation import (
    DEFAULT_WIDTHS,
    check_bm25_params,
    check_confidence_min,
    check_duration,
    check_widths,
)

FORMAT_VERSION = "1.0"

_REQUIRED_FIELDS = ("recording_id", "work_id", "source", "events")


@dataclass(frozen=True)
class CorpusConfig:
    """Everything that shaped a snapshot's documents and scoring.

    Captured at ingest time and stored in the snapshot header; fingerprints
    produced under different settings are not comparable, so query and
    evaluation commands read their settings from here instead of re-deciding.
    """

    duration_s: int = 120
    confidence_min: float = 0.0
    widths: tuple[int, ...] = DEFAULT_WIDTHS
    k1: float = 1.2
    b: float = 0.75
    idf_variant: str = "nonneg"

    def __post_init__(self):
        object.__setattr__(self, "duration_s", check_duration(self.duration_s))
        object.__setattr__(
            self, "confidence_min", check_confidence_min(self.confidence_min)
        )
        object.__setattr__(self, "widths", check_widths(self.widths))
        k1, b, variant = check_bm25_params(self.k1, self.b, self.idf_variant)
        object.__setattr__(self, "k1", k1)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "idf_variant", variant)

    def encoder_config(self) -> EncoderConfig:
        return EncoderConfig(
            duration_s=self.duration_s, confidence_min=self.confidence_min
        )


@dataclass(frozen=True)
class Clique:
    """All recordings (interpretations) of one musical work."""

    work_id: str
    recording_ids: tuple[str, ...]
    meta: dict = field(default_factory=dict)


@dataclass
class CorpusSnapshot:
    version: str
    config: CorpusConfig
    docs: list[DocRecord]
    cliques: list[Clique]


@dataclass
class BuildReport:
    """What happened while materializing a batch; not persisted."""

    n_docs: int
    n_cliques: int
    degenerate_doc_ids: list[str]
    warnings: list[str]


def make_doc_id(recording_id: str, source: str, duration_s: int) -> str:
    """Index key for one (recording, source, window) combination.

    Including source and duration lets the same recording appear under
    several configurations in one index without colliding.
    """
    return f"{recording_id}:{source}:{duration_s}"


def _schema_error(path: Path, where: str, problem: str) -> SchemaError:
    return SchemaError(f"{path}: {where}: {problem}")


def _require_number(path: Path, where: str, name: str, value) -> float:
    # bool is an int subclass; reject it explicitly.
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _schema_error(path, where, f"{name} must be a number, got {value!r}")
    return float(value)


def load_annotation(path: str | Path) -> AnnotationDoc:
    """Parse one annotation file.

    Raises :class:`ParseError` for malformed JSON and :class:`SchemaError`
    when required fields are missing or carry the wrong type.  Events are
    returned sorted by onset time; missing confidences default to 1.0.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc

    if not isinstance(raw, dict):
        raise _schema_error(path, "top level", "expected a JSON object")
    missing = [name for name in _REQUIRED_FIELDS if name not in raw]
    if missing:
        raise _schema_error(path, "top level", f"missing required fields {missing}")

    source = raw["source"]
    if source not in SOURCE_KINDS:
        raise _schema_error(
            path, "source", f"unknown source {source!r}; expected one of {sorted(SOURCE_KINDS)}"
        )
    kind = SOURCE_KINDS[source]

    recording_id = raw["recording_id"]
    work_id = raw["work_id"]
    if not isinstance(recording_id, str) or not recording_id:
        raise _schema_error(path, "recording_id", "must be a non-empty string")
    if not isinstance(work_id, str) or not work_id:
        raise _schema_error(path, "work_id", "must be a non-empty string")

    start_at_s = _require_number(path, "start_at_s", "start_at_s", raw.get("start_at_s", 0.0))
    if start_at_s < 0:
        raise _schema_error(path, "start_at_s", "must be >= 0")
    live = raw.get("live", False)
    if not isinstance(live, bool):
        raise _schema_error(path, "live", "must be a boolean")

    if not isinstance(raw["events"], list):
        raise _schema_error(path, "events", "must be a list")
    events: list[AnnotationEvent] = []
    for i, entry in enumerate(raw["events"]):
        where = f"events[{i}]"
        if not isinstance(entry, dict):
            raise _schema_error(path, where, "expected a JSON object")
        if "time_s" not in entry or "value" not in entry:
            raise _schema_error(path, where, "missing time_s or value")
        time_s = _require_number(path, where, "time_s", entry["time_s"])
        if time_s < 0:
            raise _schema_error(path, where, "time_s must be >= 0")
        duration_s = _require_number(path, where, "duration_s", entry.get("duration_s", 0.0))
        value = entry["value"]
        if kind == "chord":
            if not isinstance(value, str):
                raise _schema_error(path, where, f"chord value must be a string, got {value!r}")
        else:
            value = _require_number(path, where, "value", value)
        confidence = _require_number(path, where, "confidence", entry.get("confidence", 1.0))
        if not 0.0 <= confidence <= 1.0:
            raise _schema_error(path, where, "confidence must lie in [0, 1]")
        events.append(AnnotationEvent(time_s, duration_s, value, confidence))

    events.sort(key=lambda e: e.time_s)
    return AnnotationDoc(
        recording_id=recording_id,
        work_id=work_id,
        source=source,
        start_at_s=start_at_s,
        live=live,
        events=events,
    )


def load_annotations(path: str | Path) -> list[AnnotationDoc]:
    """Parse one annotation file, or every ``*.json`` file in a directory.

    Strict: the first bad file raises.  Batch ingestion with per-file
    tolerance lives in the CLI.
    """
    path = Path(path)
    if path.is_dir():
        return [load_annotation(p) for p in sorted(path.glob("*.json"))]
    return [load_annotation(path)]


def materialize(
    annotations: Iterable[AnnotationDoc], config: CorpusConfig | None = None
) -> tuple[CorpusSnapshot, BuildReport]:
    """Fingerprint and shingle a batch of annotations into a snapshot.

    Per-document failures (and duplicate recording+source pairs) become
    warnings in the report; the batch itself never aborts.  Degenerate
    fingerprints are kept as empty-bag documents, since dropping them would
    silently shrink the denominator of every retrieval metric; their ids
    are listed in the report.
    """
    config = config or CorpusConfig()
    encoder_config = config.encoder_config()

    docs: list[DocRecord] = []
    seen: set[str] = set()
    degenerate: list[str] = []
    warnings: list[str] = []
    clique_members: dict[str, set[str]] = {}

    for ann in annotations:
        doc_id = make_doc_id(ann.recording_id, ann.source, config.duration_s)
        try:
            print_ = fingerprint(ann, encoder_config)
        except Exception as exc:  # keep the batch alive, surface the cause
            warnings.append(f"{doc_id}: {exc}")
            continue
        if doc_id in seen:
            warnings.append(f"{doc_id}: duplicate recording+source pair ignored")
            continue
        seen.add(doc_id)
        if print_.is_degenerate:
            degenerate.append(doc_id)
        docs.append(
            DocRecord(
                doc_id=doc_id,
                work_id=ann.work_id,
                bag=multi_shingle(print_.letters, config.widths),
                meta={
                    "recording_id": ann.recording_id,
                    "source": ann.source,
                    "duration_s": config.duration_s,
                    "live": ann.live,
                    "letters": print_.letters,
                },
            )
        )
        clique_members.setdefault(ann.work_id, set()).add(ann.recording_id)

    docs.sort(key=lambda d: d.doc_id)
    cliques = [
        Clique(work_id=work_id, recording_ids=tuple(sorted(members)))
        for work_id, members in sorted(clique_members.items())
    ]
    snapshot = CorpusSnapshot(
        version=FORMAT_VERSION, config=config, docs=docs, cliques=cliques
    )
    report = BuildReport(
        n_docs=len(docs),
        n_cliques=len(cliques),
        degenerate_doc_ids=degenerate,
        warnings=warnings,
    )
    return snapshot, report


def _dump(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def save_snapshot(snapshot: CorpusSnapshot, path: str | Path) -> None:
    """Write a snapshot in canonical form (stable key and record ordering)."""
    lines = [
        _dump(
            {
                "format": "claraprint-snapshot",
                "version": snapshot.version,
                "config": {
                    "duration_s": snapshot.config.duration_s,
                    "confidence_min": snapshot.config.confidence_min,
                    "widths": list(snapshot.config.widths),
                    "k1": snapshot.config.k1,
                    "b": snapshot.config.b,
                    "idf_variant": snapshot.config.idf_variant,
                },
            }
        )
    ]
    for doc in sorted(snapshot.docs, key=lambda d: d.doc_id):
        lines.append(
            _dump(
                {
                    "type": "doc",
                    "doc_id": doc.doc_id,
                    "work_id": doc.work_id,
                    "meta": doc.meta,
                    "terms": dict(doc.bag),
                }
            )
        )
    for clique in sorted(snapshot.cliques, key=lambda c: c.work_id):
        lines.append(
            _dump(
                {
                    "type": "clique",
                    "work_id": clique.work_id,
                    "recording_ids": sorted(clique.recording_ids),
                    "meta": clique.meta,
                }
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_snapshot(path: str | Path) -> CorpusSnapshot:
    """Read a snapshot written by :func:`save_snapshot`.

    Raises :class:`SnapshotVersionError` for files written by a different
    major format version, :class:`ParseError`/:class:`SchemaError` for
    anything structurally wrong.
    """
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ParseError(f"{path}: empty snapshot file")

    def parse_line(i: int) -> dict:
        try:
            record = json.loads(lines[i])
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: line {i + 1}: invalid JSON: {exc.msg}") from exc
        if not isinstance(record, dict):
            raise _schema_error(path, f"line {i + 1}", "expected a JSON object")
        return record

    header = parse_line(0)
    version = header.get("version")
    if not isinstance(version, str):
        raise _schema_error(path, "header", "missing version")
    major = version.split(".", 1)[0]
    if major != FORMAT_VERSION.split(".", 1)[0]:
        raise SnapshotVersionError(
            f"{path}: snapshot version {version} is incompatible with "
            f"reader version {FORMAT_VERSION}"
        )
    raw_config = header.get("config")
    if not isinstance(raw_config, dict):
        raise _schema_error(path, "header", "missing config")
    try:
        config = CorpusConfig(
            duration_s=raw_config["duration_s"],
            confidence_min=raw_config["confidence_min"],
            widths=tuple(raw_config["widths"]),
            k1=raw_config["k1"],
            b=raw_config["b"],
            idf_variant=raw_config["idf_variant"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise _schema_error(path, "header", f"bad config: {exc}") from exc

    docs: list[DocRecord] = []
    cliques: list[Clique] = []
    for i in range(1, len(lines)):
        record = parse_line(i)
        kind = record.get("type")
        if kind == "doc":
            try:
                docs.append(
                    DocRecord(
                        doc_id=record["doc_id"],
                        work_id=record["work_id"],
                        bag=Counter(
                            {term: int(count) for term, count in record["terms"].items()}
                        ),
                        meta=record["meta"],
                    )
                )
            except (KeyError, AttributeError, TypeError) as exc:
                raise _schema_error(path, f"line {i + 1}", f"bad doc record: {exc}") from exc
        elif kind == "clique":
            try:
                cliques.append(
                    Clique(
                        work_id=record["work_id"],
                        recording_ids=tuple(record["recording_ids"]),
                        meta=record.get("meta", {}),
                    )
                )
            except (KeyError, TypeError) as exc:
                raise _schema_error(path, f"line {i + 1}", f"bad clique record: {exc}") from exc
        else:
            raise _schema_error(path, f"line {i + 1}", f"unknown record type {kind!r}")

    return CorpusSnapshot(version=version, config=config, docs=docs, cliques=cliques)


def docs_by_source(snapshot: CorpusSnapshot) -> dict[str, list[DocRecord]]:
    """Group snapshot documents by extraction source, each group sorted by id."""
    groups: dict[str, list[DocRecord]] = {}
    for doc in snapshot.docs:
        groups.setdefault(doc.meta["source"], []).append(doc)
    return {source: sorted(group, key=lambda d: d.doc_id) for source, group in sorted(groups.items())}


def sources_in(snapshot: CorpusSnapshot) -> list[str]:
    return sorted({doc.meta["source"] for doc in snapshot.docs})
