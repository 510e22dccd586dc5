"""Shared fixtures: synthetic fingerprint corpora and annotation files."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from claraprint import (
    Clique,
    CorpusConfig,
    CorpusSnapshot,
    DocRecord,
    make_doc_id,
    multi_shingle,
)

# Letters actually emitted for interval values 1..11.
CHORD_LETTERS = "bcdefghijkl"
MELODY_LETTERS = "pqrstuvwxyz"

PITCH_NAMES = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"]


def random_letters(rng: np.random.Generator, length: int, pool: str = CHORD_LETTERS) -> str:
    return "".join(pool[int(i)] for i in rng.integers(len(pool), size=length))


def perturb(rng: np.random.Generator, s: str, edit_rate: float, pool: str = CHORD_LETTERS) -> str:
    """Substitute a seeded fraction of positions with different pool letters."""
    n_edits = round(edit_rate * len(s))
    if n_edits == 0:
        return s
    chars = list(s)
    for p in rng.choice(len(s), size=n_edits, replace=False):
        current = chars[int(p)]
        options = [c for c in pool if c != current]
        chars[int(p)] = options[int(rng.integers(len(options)))]
    return "".join(chars)


def clique_docs(
    n_cliques: int = 50,
    clique_size: int = 5,
    length: int = 150,
    edit_rate: float = 0.10,
    seed: int = 7,
    widths: tuple[int, ...] = (2, 3, 4, 5, 6, 7),
    prefix_len: int | None = None,
    source: str = "ch",
    pool: str = CHORD_LETTERS,
) -> list[DocRecord]:
    """Cliques of edit-distance variants of a random base string.

    Each clique gets one random base string of ``length`` letters; each of
    its recordings is the base with ``edit_rate`` seeded substitutions,
    optionally truncated to ``prefix_len`` (shorter analysis window).
    """
    rng = np.random.default_rng(seed)
    docs: list[DocRecord] = []
    for c in range(n_cliques):
        base = random_letters(rng, length, pool)
        work_id = f"work{c:03d}"
        for v in range(clique_size):
            letters = perturb(rng, base, edit_rate, pool)
            if prefix_len is not None:
                letters = letters[:prefix_len]
            recording_id = f"{work_id}-rec{v}"
            docs.append(
                DocRecord(
                    doc_id=make_doc_id(recording_id, source, 120),
                    work_id=work_id,
                    bag=multi_shingle(letters, widths),
                    meta={
                        "recording_id": recording_id,
                        "source": source,
                        "duration_s": 120,
                        "live": False,
                        "letters": letters,
                    },
                )
            )
    return docs


def snapshot_of(docs: list[DocRecord], config: CorpusConfig | None = None) -> CorpusSnapshot:
    """Wrap prebuilt documents in a snapshot (cliques derived from meta)."""
    members: dict[str, set[str]] = {}
    for doc in docs:
        members.setdefault(doc.work_id, set()).add(doc.meta["recording_id"])
    cliques = [
        Clique(work_id=work_id, recording_ids=tuple(sorted(ids)))
        for work_id, ids in sorted(members.items())
    ]
    return CorpusSnapshot(
        version="1.0",
        config=config or CorpusConfig(),
        docs=sorted(docs, key=lambda d: d.doc_id),
        cliques=cliques,
    )


def chord_events(pitch_names: list[str], spacing_s: float = 2.0, confidence: float = 0.9) -> list[dict]:
    return [
        {"time_s": i * spacing_s, "duration_s": spacing_s, "value": name, "confidence": confidence}
        for i, name in enumerate(pitch_names)
    ]


def melody_events(pitch_classes: list[int], rng: np.random.Generator, spacing_s: float = 1.0) -> list[dict]:
    """Frequencies for the given pitch classes, octaves randomized."""
    events = []
    for i, pc in enumerate(pitch_classes):
        octave = int(rng.integers(-1, 2))
        freq = 440.0 * 2 ** ((pc - 9) / 12 + octave)
        events.append(
            {"time_s": i * spacing_s, "duration_s": spacing_s, "value": freq, "confidence": 0.8}
        )
    return events


def write_annotation(directory: Path, name: str, payload: dict) -> Path:
    path = directory / f"{name}.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def pitch_walk(rng: np.random.Generator, length: int) -> list[str]:
    """Random pitch-name sequence with no two consecutive names equal."""
    names = []
    previous = None
    for _ in range(length):
        while True:
            candidate = PITCH_NAMES[int(rng.integers(12))]
            if candidate != previous:
                break
        names.append(candidate)
        previous = candidate
    return names


def perturb_names(rng: np.random.Generator, names: list[str], n_edits: int) -> list[str]:
    out = list(names)
    for p in rng.choice(len(out), size=n_edits, replace=False):
        options = [n for n in PITCH_NAMES if n != out[int(p)]]
        out[int(p)] = options[int(rng.integers(len(options)))]
    return out


@pytest.fixture
def annotations_dir(tmp_path: Path) -> Path:
    """A small on-disk corpus: 4 works x 3 recordings, chord + melody files.

    Recordings of one work are light edit-variants of shared pitch material,
    so a recording queried against the ingested corpus ranks itself first
    and its siblings right after.
    """
    rng = np.random.default_rng(2024)
    directory = tmp_path / "annotations"
    directory.mkdir()
    for w in range(4):
        work_id = f"work-{w}"
        base = pitch_walk(rng, 30)
        for r in range(3):
            recording_id = f"{work_id}-rec{r}"
            names = perturb_names(rng, base, n_edits=3)
            pcs = [PITCH_NAMES.index(n) for n in names]
            write_annotation(
                directory,
                f"{recording_id}-ch",
                {
                    "recording_id": recording_id,
                    "work_id": work_id,
                    "source": "ch",
                    "start_at_s": 0.0,
                    "live": False,
                    "events": chord_events(names),
                },
            )
            write_annotation(
                directory,
                f"{recording_id}-me",
                {
                    "recording_id": recording_id,
                    "work_id": work_id,
                    "source": "me",
                    "start_at_s": 0.0,
                    "live": False,
                    "events": melody_events(pcs, rng),
                },
            )
    return directory
