"""Input validation helpers shared by estimators and the CLI.

Each check either returns a normalized value or raises ``ValueError`` with a
message naming the offending parameter, mirroring scikit-learn's convention of
validating hyper-parameters at ``fit`` time rather than in ``__init__``.
"""

from __future__ import annotations

from collections.abc import Iterable

VALID_DURATIONS = (30, 120)
MIN_SHINGLE_WIDTH = 2
MAX_SHINGLE_WIDTH = 7
DEFAULT_WIDTHS = tuple(range(MIN_SHINGLE_WIDTH, MAX_SHINGLE_WIDTH + 1))
IDF_VARIANTS = ("paper", "nonneg")


def check_duration(duration_s: int) -> int:
    if duration_s not in VALID_DURATIONS:
        raise ValueError(
            f"duration_s must be one of {VALID_DURATIONS}, got {duration_s!r}"
        )
    return int(duration_s)


def check_confidence_min(confidence_min: float) -> float:
    confidence_min = float(confidence_min)
    if confidence_min < 0.0:
        raise ValueError(f"confidence_min must be >= 0, got {confidence_min!r}")
    return confidence_min


def check_widths(widths: Iterable[int]) -> tuple[int, ...]:
    """Normalize shingle widths to a sorted, deduplicated tuple in 2..7."""
    out = sorted(set(int(w) for w in widths))
    if not out:
        raise ValueError("widths must not be empty")
    for w in out:
        if not MIN_SHINGLE_WIDTH <= w <= MAX_SHINGLE_WIDTH:
            raise ValueError(
                f"shingle widths must lie in "
                f"{MIN_SHINGLE_WIDTH}..{MAX_SHINGLE_WIDTH}, got {w}"
            )
    return tuple(out)


def check_width(w: int) -> int:
    if not MIN_SHINGLE_WIDTH <= w <= MAX_SHINGLE_WIDTH:
        raise ValueError(
            f"shingle width must lie in "
            f"{MIN_SHINGLE_WIDTH}..{MAX_SHINGLE_WIDTH}, got {w}"
        )
    return int(w)


def check_bm25_params(k1: float, b: float, idf_variant: str) -> tuple[float, float, str]:
    k1 = float(k1)
    b = float(b)
    if k1 < 0.0:
        raise ValueError(f"k1 must be >= 0, got {k1!r}")
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"b must lie in [0, 1], got {b!r}")
    if idf_variant not in IDF_VARIANTS:
        raise ValueError(
            f"idf variant must be one of {IDF_VARIANTS}, got {idf_variant!r}"
        )
    return k1, b, idf_variant


def check_top_k(top_k: int) -> int:
    if top_k < 1:
        raise ValueError(f"top_k must be >= 1, got {top_k!r}")
    return int(top_k)
