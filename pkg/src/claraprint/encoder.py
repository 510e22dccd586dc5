"""Turn timed chord/melody annotations into interval-letter fingerprints.

A fingerprint is built from one recording's annotation stream in a fixed chain
of passes:

1. keep only events whose onset falls in the analysis window
   ``[start_at_s, start_at_s + duration_s)`` and whose confidence clears the
   configured floor;
2. reduce each surviving event to a pitch class 0..11 (chord labels keep only
   their root, frequencies lose their octave); events that carry no usable
   pitch ("N"/"X" labels, unvoiced negative frequencies) are dropped;
3. collapse consecutive repeats of the same pitch class;
4. replace the pitch progression by its successive semitone intervals, stored
   mod 12 (values 1..11; consecutive duplicates are already gone, so 0 cannot
   occur);
5. spell each interval as one letter from a per-source alphabet.

Chord fingerprints draw from ``a..n`` and melody fingerprints from
``o..z$%``; the alphabets are disjoint so fingerprints from different
extractors can be concatenated or indexed together without colliding.
Because step 4 works on differences, transposing the whole input leaves the
letter string unchanged, which is what makes the fingerprint robust to
recordings played up to a tone away from the nominal key.

Everything here is a pure function over immutable inputs and is safe to call
from concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import groupby, pairwise

from sklearn.base import BaseEstimator, TransformerMixin

from .validation import check_confidence_min, check_duration

# Recognized extraction sources.  The two-letter tag travels with every
# fingerprint; the kind decides which alphabet and event-value parser apply.
SOURCE_KINDS = {
    "ch": "chord",
    "cr": "chord",
    "me": "melody",
    "mp": "melody",
}

# Interval value v (1..11) maps to alphabet[v].  Positions 0, 12 and 13 are
# reserved and never emitted: interval 0 cannot occur after deduplication and
# the two trailing symbols are kept free for future sentinels.
CHORD_ALPHABET = "abcdefghijklmn"
MELODY_ALPHABET = "opqrstuvwxyz$%"

# Semitone offsets of the natural note names.
_NATURALS = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}

# Shortest letter string that can produce at least one shingle.
MIN_FINGERPRINT_LETTERS = 2


def source_kind(tag: str) -> str:
    """Return ``"chord"`` or ``"melody"`` for a source tag, or raise ValueError."""
    try:
        return SOURCE_KINDS[tag]
    except KeyError:
        raise ValueError(
            f"unknown source tag {tag!r}; expected one of {sorted(SOURCE_KINDS)}"
        ) from None


@dataclass(frozen=True)
class AnnotationEvent:
    """One timed observation from an extractor.

    ``value`` is a chord label (str) for chord sources and a frequency in Hz
    (float) for melody sources.  Extractors that emit unweighted labels carry
    no confidence; those events default to 1.0.
    """

    time_s: float
    duration_s: float
    value: str | float
    confidence: float = 1.0


@dataclass
class AnnotationDoc:
    """One extraction run over one recording."""

    recording_id: str
    work_id: str
    source: str
    start_at_s: float = 0.0
    live: bool = False
    events: list[AnnotationEvent] = field(default_factory=list)

    @property
    def kind(self) -> str:
        return source_kind(self.source)


@dataclass(frozen=True)
class EncoderConfig:
    """Fingerprint window and filtering settings.

    duration_s: length of the analysis window (30 or 120 seconds).
    confidence_min: events below this confidence are dropped; the default 0.0
        keeps every event that carries a defined value.
    """

    duration_s: int = 120
    confidence_min: float = 0.0

    def __post_init__(self):
        check_duration(self.duration_s)
        check_confidence_min(self.confidence_min)


@dataclass(frozen=True)
class Claraprint:
    """A letter-string fingerprint plus its provenance."""

    letters: str
    source: str
    recording_id: str
    work_id: str
    duration_s: int

    @property
    def kind(self) -> str:
        return source_kind(self.source)

    @property
    def is_degenerate(self) -> bool:
        """True when the string is too short to produce any shingle."""
        return len(self.letters) < MIN_FINGERPRINT_LETTERS


def parse_chord_root(label: str) -> int | None:
    """Extract the root pitch class from a chord label, or None.

    Accepts a natural A-G followed by any run of ``#``/``b`` accidentals;
    everything after that (quality, extensions, inversions) is ignored, so
    ``"Dmaj7"`` reduces to D and ``"C#:min7/b3"`` to C#.  Labels that do not
    start with a natural, including the no-chord markers ``"N"`` and
    ``"X"``, yield None and are filtered out upstream.
    """
    if not label:
        return None
    root = _NATURALS.get(label[0])
    if root is None:
        return None
    for ch in label[1:]:
        if ch == "#":
            root += 1
        elif ch == "b":
            root -= 1
        else:
            break
    return root % 12


def hz_to_pitch_class(frequency_hz: float) -> int | None:
    """Map a frequency to its pitch class 0..11, discarding the octave.

    Uses the equal-tempered scale anchored at A4 = 440 Hz; the real-valued
    note number is rounded half away from zero so the result does not depend
    on platform rounding modes.  Non-positive frequencies (unvoiced markers
    emitted by melody extractors) yield None.
    """
    if frequency_hz <= 0:
        return None
    midi = 69.0 + 12.0 * math.log2(frequency_hz / 440.0)
    return _round_half_away_from_zero(midi) % 12


def _round_half_away_from_zero(x: float) -> int:
    if x >= 0:
        return math.floor(x + 0.5)
    return math.ceil(x - 0.5)


def clean_events(doc: AnnotationDoc, config: EncoderConfig) -> list[int]:
    """Reduce an annotation stream to an ordered pitch-class progression.

    Keeps events whose onset lies in ``[start_at_s, start_at_s + duration_s)``
    and whose confidence is at least ``confidence_min``, maps each to a pitch
    class (root for chord sources, octave-free note for melody sources) and
    drops events with no usable pitch.  Only onset order survives; precise
    timing and durations are discarded.
    """
    kind = doc.kind
    window_start = doc.start_at_s
    window_end = doc.start_at_s + config.duration_s

    progression: list[int] = []
    for event in sorted(doc.events, key=lambda e: e.time_s):
        if not window_start <= event.time_s < window_end:
            continue
        if event.confidence < config.confidence_min:
            continue
        if kind == "chord":
            pc = parse_chord_root(event.value) if isinstance(event.value, str) else None
        else:
            value = event.value
            pc = hz_to_pitch_class(value) if isinstance(value, (int, float)) else None
        if pc is not None:
            progression.append(pc)
    return progression


def dedup(progression: list[int]) -> list[int]:
    """Collapse runs of consecutive equal pitch classes to one occurrence."""
    return [pc for pc, _ in groupby(progression)]


def to_intervals(progression: list[int]) -> list[int]:
    """Successive differences of a deduplicated progression, mod 12.

    Each value lies in 1..11 and is bijective with the signed
    shortest-path interval (signed = v if v <= 6 else v - 12), so no
    direction information is lost.
    """
    return [(b - a) % 12 for a, b in pairwise(progression)]


def encode_letters(intervals: list[int], kind: str) -> str:
    """Spell intervals as letters from the chord or melody alphabet."""
    if kind == "chord":
        alphabet = CHORD_ALPHABET
    elif kind == "melody":
        alphabet = MELODY_ALPHABET
    else:
        raise ValueError(f"kind must be 'chord' or 'melody', got {kind!r}")
    for v in intervals:
        if not 1 <= v <= 11:
            raise ValueError(f"interval values must lie in 1..11, got {v}")
    return "".join(alphabet[v] for v in intervals)


def fingerprint(doc: AnnotationDoc, config: EncoderConfig) -> Claraprint:
    """Run the full encoding chain over one annotation document.

    Deterministic: the same document and config always produce byte-identical
    letters.  The result may be degenerate (fewer than 2 letters, so no
    shingle can be formed); callers decide whether to index it as an empty
    document or reject it; check ``Claraprint.is_degenerate``.
    """
    progression = dedup(clean_events(doc, config))
    letters = encode_letters(to_intervals(progression), doc.kind)
    return Claraprint(
        letters=letters,
        source=doc.source,
        recording_id=doc.recording_id,
        work_id=doc.work_id,
        duration_s=config.duration_s,
    )


class ClaraprintEncoder(BaseEstimator, TransformerMixin):
    """Stateless transformer from annotation documents to fingerprints.

    Follows the scikit-learn estimator protocol so it can sit in a
    ``Pipeline`` in front of :class:`~claraprint.shingles.ShingleVectorizer`:
    ``fit`` only validates parameters, ``transform`` maps a sequence of
    :class:`AnnotationDoc` to a list of :class:`Claraprint`.
    """

    def __init__(self, duration_s: int = 120, confidence_min: float = 0.0):
        self.duration_s = duration_s
        self.confidence_min = confidence_min

    def _config(self) -> EncoderConfig:
        return EncoderConfig(
            duration_s=self.duration_s, confidence_min=self.confidence_min
        )

    def fit(self, X=None, y=None):
        self._config()
        return self

    def transform(self, X) -> list[Claraprint]:
        config = self._config()
        return [fingerprint(doc, config) for doc in X]
