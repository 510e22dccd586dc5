"""Interval-letter fingerprints and BM25 retrieval for classical-music works.

Typical flow: parse annotation files into :class:`AnnotationDoc` values,
encode them into :class:`Claraprint` letter strings, shingle the strings
into term bags, index the bags with :class:`BM25Index` and search.  The
:mod:`claraprint.corpus` helpers bundle the first three steps and persist
the result; :mod:`claraprint.evaluation` measures retrieval quality.
"""

from .bm25 import BM25Index, DocRecord
from .corpus import (
    BuildReport,
    Clique,
    CorpusConfig,
    CorpusSnapshot,
    load_annotation,
    load_annotations,
    load_snapshot,
    make_doc_id,
    materialize,
    save_snapshot,
)
from .encoder import (
    CHORD_ALPHABET,
    MELODY_ALPHABET,
    SOURCE_KINDS,
    AnnotationDoc,
    AnnotationEvent,
    Claraprint,
    ClaraprintEncoder,
    EncoderConfig,
    clean_events,
    dedup,
    encode_letters,
    fingerprint,
    hz_to_pitch_class,
    parse_chord_root,
    source_kind,
    to_intervals,
)
from .errors import (
    ClaraprintError,
    DegenerateFingerprintError,
    DuplicateDocIdError,
    MissingSourceError,
    ParseError,
    ProtocolError,
    SchemaError,
    SnapshotVersionError,
    UnknownDocIdError,
)
from .evaluation import (
    PairwiseStats,
    RetrievalMetrics,
    SummaryStats,
    TimingReport,
    TimingRow,
    combined_documents,
    common_words,
    jaccard,
    lev_similarity,
    levenshtein,
    protocol_repeat,
    run_bench,
    run_combination_study,
    run_multi_recording_study,
    run_pairwise,
    run_retrieval_protocol,
    write_pairwise_csv,
    write_retrieval_csv,
    write_timing_csv,
)
from .shingles import ShingleVectorizer, combine, multi_shingle, shingle
from .validation import DEFAULT_WIDTHS

__version__ = "0.1.0"

__all__ = [
    "AnnotationDoc",
    "AnnotationEvent",
    "BM25Index",
    "BuildReport",
    "CHORD_ALPHABET",
    "Claraprint",
    "ClaraprintEncoder",
    "ClaraprintError",
    "Clique",
    "CorpusConfig",
    "CorpusSnapshot",
    "DEFAULT_WIDTHS",
    "DegenerateFingerprintError",
    "DocRecord",
    "DuplicateDocIdError",
    "EncoderConfig",
    "MELODY_ALPHABET",
    "MissingSourceError",
    "PairwiseStats",
    "ParseError",
    "ProtocolError",
    "RetrievalMetrics",
    "SOURCE_KINDS",
    "SchemaError",
    "ShingleVectorizer",
    "SnapshotVersionError",
    "SummaryStats",
    "TimingReport",
    "TimingRow",
    "UnknownDocIdError",
    "clean_events",
    "combine",
    "combined_documents",
    "common_words",
    "dedup",
    "encode_letters",
    "fingerprint",
    "hz_to_pitch_class",
    "jaccard",
    "lev_similarity",
    "levenshtein",
    "load_annotation",
    "load_annotations",
    "load_snapshot",
    "make_doc_id",
    "materialize",
    "multi_shingle",
    "parse_chord_root",
    "protocol_repeat",
    "run_bench",
    "run_combination_study",
    "run_multi_recording_study",
    "run_pairwise",
    "run_retrieval_protocol",
    "save_snapshot",
    "shingle",
    "source_kind",
    "to_intervals",
    "write_pairwise_csv",
    "write_retrieval_csv",
    "write_timing_csv",
]
