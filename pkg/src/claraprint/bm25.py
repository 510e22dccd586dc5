"""Embedded inverted index with Okapi BM25 ranking.

The index is a plain in-memory postings map built once over a batch of term
bags.  Scoring follows the standard Okapi formulation: for a query Q and a
document D,

    score(D, Q) = sum over distinct terms q in Q of
                  IDF(q) * f(q, D) * (k1 + 1) / (f(q, D) + k1 * (1 - b + b * |D| / avgdl))

where f(q, D) is the term's frequency in D, |D| the document length in words
and avgdl the mean document length over the collection.  Query-side
multiplicities are ignored; only the document side is frequency-weighted.

Two IDF variants are available.  ``"paper"`` is the textbook
``log((N - n + 0.5) / (n + 0.5))``, which goes negative for terms present in
more than half the collection and therefore makes very common words actively
penalize a match.  The default ``"nonneg"`` wraps the ratio in ``log1p`` the
way production search engines do, keeping every contribution positive.

Corpora at the intended scale (a few thousand documents) rebuild in
milliseconds, so there are no incremental updates: refitting replaces the
whole snapshot, which keeps N and avgdl consistent by construction.  A fitted
index is never mutated and may be shared freely across threads.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .errors import DuplicateDocIdError, UnknownDocIdError
from .validation import check_bm25_params, check_top_k


@dataclass(frozen=True)
class DocRecord:
    """An indexable document: a term bag plus identity and provenance."""

    doc_id: str
    work_id: str
    bag: Counter[str]
    meta: dict = field(default_factory=dict)

    @property
    def doc_len(self) -> int:
        """Document length |D|: total term count including multiplicities."""
        return self.bag.total()


def _insert_postings(
    postings: dict[str, list[tuple[int, int]]], doc_index: int, bag: Mapping[str, int]
) -> None:
    """Append one document's term frequencies to a postings map.

    Non-positive counts are skipped so every posting satisfies tf >= 1 even
    for hand-built bags.
    """
    for term, tf in bag.items():
        if tf > 0:
            postings.setdefault(term, []).append((doc_index, tf))


class BM25Index(BaseEstimator):
    """Inverted index over :class:`DocRecord` bags, ranked with Okapi BM25.

    Scikit-learn style estimator: hyper-parameters are set in ``__init__``,
    ``fit(docs)`` builds the immutable index and the fitted state lives in
    trailing-underscore attributes (``postings_``, ``docs_``, ``n_docs_``,
    ``avgdl_``).  Documents with empty bags are stored and retrievable by id
    but can never match a query.

    Parameters
    ----------
    k1, b:
        Okapi free parameters (term-frequency saturation and length
        normalization); defaults 1.2 and 0.75.
    idf_variant:
        ``"nonneg"`` (default) or ``"paper"``, see the module docstring.
    """

    def __init__(self, k1: float = 1.2, b: float = 0.75, idf_variant: str = "nonneg"):
        self.k1 = k1
        self.b = b
        self.idf_variant = idf_variant

    def fit(self, docs: Sequence[DocRecord], y=None):
        """Build the index over ``docs``.

        Bags are referenced, not copied; do not mutate them after fitting.
        Raises :class:`DuplicateDocIdError` on a repeated doc_id.
        """
        k1, b, _ = check_bm25_params(self.k1, self.b, self.idf_variant)

        doc_ids: list[str] = []
        records: dict[str, DocRecord] = {}
        postings: dict[str, list[tuple[int, int]]] = {}
        lengths: list[int] = []

        for doc in docs:
            if doc.doc_id in records:
                raise DuplicateDocIdError(f"doc_id {doc.doc_id!r} appears twice")
            records[doc.doc_id] = doc
            _insert_postings(postings, len(doc_ids), doc.bag)
            doc_ids.append(doc.doc_id)
            lengths.append(doc.doc_len)

        n = len(doc_ids)
        avgdl = sum(lengths) / n if n else 0.0
        # Per-document denominator constant k1 * (1 - b + b * |D| / avgdl);
        # only documents with a matching term are ever scored, and those are
        # non-empty, so avgdl > 0 whenever the constant is used.
        if avgdl > 0:
            norms = [k1 * (1.0 - b + b * dl / avgdl) for dl in lengths]
        else:
            norms = [k1 * (1.0 - b)] * n

        self.doc_ids_ = doc_ids
        self.docs_ = records
        self.postings_ = postings
        self._id_index = {doc_id: i for i, doc_id in enumerate(doc_ids)}
        self.doc_lens_ = lengths
        self.n_docs_ = n
        self.avgdl_ = avgdl
        self._norms = norms
        return self

    def term_doc_count(self, term: str) -> int:
        """Number of documents containing ``term`` (n(q) in the IDF formula)."""
        check_is_fitted(self, "postings_")
        return len(self.postings_.get(term, ()))

    def idf(self, term: str) -> float:
        """Inverse document frequency of ``term`` under the configured variant.

        Defined for unseen terms (n = 0); an empty collection returns 0 by
        convention.
        """
        check_is_fitted(self, "postings_")
        return self._idf_from_count(self.term_doc_count(term))

    def _idf_from_count(self, n_containing: int) -> float:
        if self.n_docs_ == 0:
            return 0.0
        ratio = (self.n_docs_ - n_containing + 0.5) / (n_containing + 0.5)
        if self.idf_variant == "paper":
            return math.log(ratio)
        return math.log1p(ratio)

    def score(self, doc_id: str, query: Mapping[str, int] | Iterable[str]) -> float:
        """BM25 score of one stored document against ``query``.

        Distinct query terms count once each regardless of query-side
        multiplicity; terms absent from the document contribute 0.  Raises
        :class:`UnknownDocIdError` for an id the index does not hold.
        """
        check_is_fitted(self, "postings_")
        doc = self.docs_.get(doc_id)
        if doc is None:
            raise UnknownDocIdError(f"doc_id {doc_id!r} is not in the index")
        k1, _, _ = check_bm25_params(self.k1, self.b, self.idf_variant)
        norm = self._norms[self._id_index[doc_id]]

        total = 0.0
        for term in sorted(set(query)):
            tf = doc.bag.get(term, 0)
            if tf == 0:
                continue
            total += self.idf(term) * (tf * (k1 + 1.0)) / (tf + norm)
        return total

    def search(
        self,
        query: Mapping[str, int] | Iterable[str],
        top_k: int = 10,
        exclude: set[str] | None = None,
    ) -> list[tuple[str, float]]:
        """Rank stored documents against ``query``.

        Returns up to ``top_k`` ``(doc_id, score)`` pairs with strictly
        positive score, best first; ties break on ascending doc_id so equal
        corpora and queries always produce byte-identical rankings.  Ids in
        ``exclude`` are omitted.  Only documents sharing at least one query
        term are scored; every other document would score exactly 0.
        """
        check_is_fitted(self, "postings_")
        check_top_k(top_k)
        k1, _, _ = check_bm25_params(self.k1, self.b, self.idf_variant)
        k1p1 = k1 + 1.0
        norms = self._norms

        scores = [0.0] * self.n_docs_
        candidates: set[int] = set()
        # Sorted term order fixes the floating-point summation order, making
        # scores reproducible and equal to score() for every document.
        for term in sorted(set(query)):
            plist = self.postings_.get(term)
            if not plist:
                continue
            idf = self._idf_from_count(len(plist))
            for doc_index, tf in plist:
                scores[doc_index] += idf * (tf * k1p1) / (tf + norms[doc_index])
            candidates.update(doc_index for doc_index, _ in plist)

        excluded = exclude or ()
        ranked = [
            (self.doc_ids_[i], scores[i])
            for i in candidates
            if scores[i] > 0.0 and self.doc_ids_[i] not in excluded
        ]
        ranked.sort(key=lambda pair: (-pair[1], pair[0]))
        return ranked[:top_k]
