"""Slice fingerprints into overlapping fixed-width words ("shingles").

A fingerprint string is turned into the bag of all its contiguous substrings
of the configured widths; the bag (a ``collections.Counter``) is what gets
indexed and queried, so repeated substrings keep their multiplicity.  Several
fingerprints (different extractors over one recording, or several recordings
of one work) combine by shingling each string separately and summing the
bags.  Shingling per source first is equivalent to shingling a concatenation,
minus only the meaningless boundary words that would mix two alphabets.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable

from sklearn.base import BaseEstimator, TransformerMixin

from .encoder import Claraprint
from .validation import DEFAULT_WIDTHS, check_width, check_widths


def shingle(s: str, w: int) -> list[str]:
    """All contiguous substrings of length ``w`` in order, duplicates kept.

    A string shorter than ``w`` yields no shingles; otherwise there are
    exactly ``len(s) - w + 1``.
    """
    check_width(w)
    return [s[i : i + w] for i in range(len(s) - w + 1)]


def multi_shingle(s: str, widths: Iterable[int] = DEFAULT_WIDTHS) -> Counter[str]:
    """Bag-union of ``shingle(s, w)`` over all widths, with multiplicities."""
    widths = check_widths(widths)
    bag: Counter[str] = Counter()
    for w in widths:
        bag.update(shingle(s, w))
    return bag


def combine(
    prints: Iterable[Claraprint | str], widths: Iterable[int] = DEFAULT_WIDTHS
) -> Counter[str]:
    """Bag-sum of independently shingled fingerprints.

    Accepts :class:`Claraprint` values or raw letter strings.  The result is
    independent of input order, and never contains a word spanning two
    fingerprints, so chord and melody terms stay within their own alphabets.
    Degenerate fingerprints contribute nothing; an all-degenerate input
    yields an empty bag.
    """
    widths = check_widths(widths)
    bag: Counter[str] = Counter()
    for p in prints:
        letters = p.letters if isinstance(p, Claraprint) else p
        bag.update(multi_shingle(letters, widths))
    return bag


class ShingleVectorizer(BaseEstimator, TransformerMixin):
    """Stateless transformer from fingerprints to shingle bags.

    ``transform`` maps a sequence of :class:`Claraprint` (or plain strings)
    to a list of ``Counter`` term bags; there is nothing to learn, so ``fit``
    only validates the widths.
    """

    def __init__(self, widths: Iterable[int] = DEFAULT_WIDTHS):
        self.widths = widths

    def fit(self, X=None, y=None):
        check_widths(self.widths)
        return self

    def transform(self, X) -> list[Counter[str]]:
        widths = check_widths(self.widths)
        return [
            multi_shingle(x.letters if isinstance(x, Claraprint) else x, widths)
            for x in X
        ]
