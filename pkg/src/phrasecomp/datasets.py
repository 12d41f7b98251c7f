"""Gold-standard compound datasets.

Two TSV layouts are supported:

* ``reddy``      -- ``w1 w2<TAB>score`` with score in [0, 5]
                    (5 = fully compositional); also used for the extended
                    180-compound variant.
* ``farahmand``  -- ``w1 w2<TAB>j1<TAB>j2<TAB>j3<TAB>j4`` with four binary
                    expert judgments; the gold score is their sum in
                    {0..4} (4 = fully idiomatic, note the inverted polarity).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

__all__ = ["CompoundEntry", "DatasetReport", "load_dataset", "FORMATS"]

FORMATS = ("reddy", "farahmand")

_DEFAULT_IDS = {"reddy": "RD", "farahmand": "FD"}


@dataclass(frozen=True)
class CompoundEntry:
    w1: str
    w2: str
    phrase: str  # "w1 w2", lowercased
    gold: float
    dataset_id: str


@dataclass
class DatasetReport:
    rows_kept: int = 0
    errors: list[tuple[int, str]] = field(default_factory=list)


def _split_phrase(raw: str) -> Optional[tuple[str, str]]:
    parts = raw.strip().lower().split()
    if len(parts) == 1 and parts[0].count("_") == 1:
        parts = parts[0].split("_")
    if len(parts) != 2 or not all(parts):
        return None
    return parts[0], parts[1]


def load_dataset(
    path: str,
    fmt: str,
    dataset_id: Optional[str] = None,
    phrase_col: int = 0,
    score_col: int = 1,
) -> tuple[list[CompoundEntry], DatasetReport]:
    """Load gold compounds; bad rows are reported, zero usable rows is fatal.

    ``phrase_col``/``score_col`` remap columns for off-spec ``reddy``-style
    releases; the ``farahmand`` layout is fixed at five columns.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown dataset format {fmt!r}")
    dataset_id = dataset_id or _DEFAULT_IDS[fmt]
    entries: list[CompoundEntry] = []
    report = DatasetReport()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            cols = line.rstrip("\n").split("\t")
            err = _parse_row(cols, fmt, dataset_id, phrase_col, score_col, entries)
            if err is not None:
                report.errors.append((line_no, err))
    if not entries:
        raise ValueError(f"{path}: no usable rows ({len(report.errors)} errors)")
    report.rows_kept = len(entries)
    return entries, report


def _parse_row(cols, fmt, dataset_id, phrase_col, score_col, entries) -> Optional[str]:
    if fmt == "reddy":
        needed = max(phrase_col, score_col) + 1
        if len(cols) < needed:
            return f"expected at least {needed} columns, got {len(cols)}"
        split = _split_phrase(cols[phrase_col])
        if split is None:
            return f"phrase is not two tokens: {cols[phrase_col]!r}"
        try:
            gold = float(cols[score_col])
        except ValueError:
            return f"unparseable score: {cols[score_col]!r}"
        if not 0.0 <= gold <= 5.0:
            return f"score {gold} outside [0, 5]"
    else:
        if len(cols) != 5:
            return f"expected 5 columns, got {len(cols)}"
        split = _split_phrase(cols[0])
        if split is None:
            return f"phrase is not two tokens: {cols[0]!r}"
        judgments = []
        for raw in cols[1:]:
            if raw.strip() not in ("0", "1"):
                return f"non-binary judgment: {raw!r}"
            judgments.append(int(raw))
        gold = float(sum(judgments))
    w1, w2 = split
    entries.append(CompoundEntry(w1, w2, f"{w1} {w2}", gold, dataset_id))
    return None
