"""Aggregation, log-normalized weighting, and training-list construction
for extracted hyponym-hypernym pairs.

A pair's weight is its count divided by the natural log of the hypernym's
global frequency in the list (floored at 1.0, so hypernyms seen once do
not divide by ln(1) = 0). This downranks pairs whose "hypernym" is a
frequent noisy extraction.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .extraction import PairOccurrence
from .lookup import surface_variants

__all__ = [
    "WeightedPair",
    "RankedPairList",
    "TrainingListReport",
    "aggregate",
    "normalize",
    "drop_top_percent",
    "build_training_list",
]


@dataclass(frozen=True)
class WeightedPair:
    hyponym: str
    hypernym: str
    count: int
    weight: float


def aggregate(occurrences: Iterable[PairOccurrence]) -> dict[tuple[str, str], int]:
    """Multiplicity of each (hyponym, hypernym) pair in the stream."""
    counts: Counter[tuple[str, str]] = Counter()
    for occ in occurrences:
        counts[(occ.hyponym, occ.hypernym)] += 1
    return dict(counts)


def _floored_log(total: int) -> float:
    return max(math.log(total), 1.0)


def normalize(counts: Mapping[tuple[str, str], int]) -> "RankedPairList":
    """Weight and sort raw pair counts into a :class:`RankedPairList`."""
    hypernym_totals: Counter[str] = Counter()
    for (_, hyper), count in counts.items():
        if count < 1:
            raise ValueError(f"count below 1 for pair with hypernym {hyper!r}")
        hypernym_totals[hyper] += count
    pairs = [
        WeightedPair(hypo, hyper, count, count / _floored_log(hypernym_totals[hyper]))
        for (hypo, hyper), count in counts.items()
    ]
    pairs.sort(key=lambda wp: (-wp.weight, wp.hyponym, wp.hypernym))
    return RankedPairList(pairs)


def drop_top_percent(ranked: "RankedPairList", p: float) -> "RankedPairList":
    """Remove the first floor(p/100 * N) entries of the sorted list."""
    if not 0 <= p <= 100:
        raise ValueError("p must lie in [0, 100]")
    n_drop = math.floor(p * len(ranked.pairs) / 100.0)
    return RankedPairList(ranked.pairs[n_drop:])


@dataclass
class TrainingListReport:
    n_target_pairs: int = 0
    n_frequent_pairs: int = 0
    uncovered_targets: list[str] = field(default_factory=list)


@dataclass
class RankedPairList:
    """Pairs sorted by weight descending, ties broken lexicographically."""

    pairs: list[WeightedPair]

    def __post_init__(self) -> None:
        self._by_hyponym: Optional[dict[str, list[WeightedPair]]] = None
        self._by_hypernym: Optional[dict[str, list[WeightedPair]]] = None

    def __len__(self) -> int:
        return len(self.pairs)

    def _index(self) -> None:
        if self._by_hyponym is not None:
            return
        # Indexed lowercase so externally produced lists match regardless of case.
        by_hypo: dict[str, list[WeightedPair]] = {}
        by_hyper: dict[str, list[WeightedPair]] = {}
        for wp in self.pairs:
            by_hypo.setdefault(wp.hyponym.lower(), []).append(wp)
            by_hyper.setdefault(wp.hypernym.lower(), []).append(wp)
        self._by_hyponym = by_hypo
        self._by_hypernym = by_hyper

    def _lookup(self, index: dict, surface: str) -> list[WeightedPair]:
        for variant in surface_variants(surface.lower()):
            hits = index.get(variant)
            if hits:
                return hits
        return []

    def pairs_with_hyponym(self, surface: str) -> list[WeightedPair]:
        self._index()
        return self._lookup(self._by_hyponym, surface)

    def pairs_with_hypernym(self, surface: str) -> list[WeightedPair]:
        self._index()
        return self._lookup(self._by_hypernym, surface)

    def top_hypernyms(self, surface: str, k: int) -> list[str]:
        """Up to ``k`` hypernyms of ``surface`` in descending weight order."""
        if k < 1:
            raise ValueError("k must be at least 1")
        out: list[str] = []
        for wp in self.pairs_with_hyponym(surface):
            if wp.hypernym not in out:
                out.append(wp.hypernym)
            if len(out) == k:
                break
        return out

    def top_hyponyms(self, surface: str, k: int) -> list[str]:
        if k < 1:
            raise ValueError("k must be at least 1")
        out: list[str] = []
        for wp in self.pairs_with_hypernym(surface):
            if wp.hyponym not in out:
                out.append(wp.hyponym)
            if len(out) == k:
                break
        return out

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for wp in self.pairs:
                fh.write(f"{wp.hyponym}\t{wp.hypernym}\t{wp.count}\t{repr(wp.weight)}\n")

    @classmethod
    def load(cls, path: str) -> "RankedPairList":
        pairs: list[WeightedPair] = []
        seen: set[tuple[str, str]] = set()
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                fields = line.rstrip("\n").split("\t")
                if len(fields) != 4:
                    raise ValueError(f"{path}:{line_no}: expected 4 tab-separated fields")
                hypo, hyper, count_s, weight_s = fields
                try:
                    count, weight = int(count_s), float(weight_s)
                except ValueError:
                    raise ValueError(f"{path}:{line_no}: bad count or weight") from None
                if count < 1:
                    raise ValueError(f"{path}:{line_no}: count must be at least 1")
                if (hypo, hyper) in seen:
                    raise ValueError(f"{path}:{line_no}: duplicate pair")
                seen.add((hypo, hyper))
                wp = WeightedPair(hypo, hyper, count, weight)
                if pairs and (-pairs[-1].weight, pairs[-1].hyponym, pairs[-1].hypernym) > (
                    -wp.weight,
                    wp.hyponym,
                    wp.hypernym,
                ):
                    raise ValueError(f"{path}:{line_no}: list is not sorted")
                pairs.append(wp)
        return cls(pairs)


def build_training_list(
    ranked: RankedPairList,
    targets: Sequence[str],
    k: int,
    m: float,
) -> tuple[list[tuple[str, str]], TrainingListReport]:
    """Training pairs for the embedding: per-target top-k plus the global top m%.

    For each target surface, its top-k pairs as hyponym and its top-k as
    hypernym come first (in target order, deduplicated); the top
    floor(m/100 * N) pairs of the whole list are appended after. Targets
    with no pairs at all are recorded in the report, not treated as errors.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if not 0 <= m <= 100:
        raise ValueError("m must lie in [0, 100]")
    report = TrainingListReport()
    seen: set[tuple[str, str]] = set()
    out: list[tuple[str, str]] = []

    def add(wp: WeightedPair) -> None:
        key = (wp.hyponym, wp.hypernym)
        if key not in seen:
            seen.add(key)
            out.append(key)

    seen_targets: set[str] = set()
    for target in targets:
        target = target.lower()
        if target in seen_targets:
            continue
        seen_targets.add(target)
        hits = ranked.pairs_with_hyponym(target)[:k] + ranked.pairs_with_hypernym(target)[:k]
        if not hits:
            report.uncovered_targets.append(target)
            continue
        for wp in hits:
            add(wp)
    report.n_target_pairs = len(out)

    n_top = math.floor(m * len(ranked.pairs) / 100.0)
    for wp in ranked.pairs[:n_top]:
        add(wp)
    report.n_frequent_pairs = len(out) - report.n_target_pairs
    return out, report
