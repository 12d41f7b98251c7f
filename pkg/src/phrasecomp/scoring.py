"""The combined compositionality score.

For a phrase w1 w2 the score interpolates the distributional similarity
with a hypernymy term computed in the Poincare ball:

    score = (1 - alpha) * score_d
            + alpha * max over (a, b, c) of sim(v(a), project(v(b) + v(c)))

where a ranges over the phrase's top-k hypernyms and b, c over the
constituents' top-k hypernyms. Entries without dense vectors are
uncovered; entries without usable hypernym data either fall back to a
rescaled distributional score or, with fallback disabled, drop out of the
reduced dataset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .datasets import CompoundEntry
from .dense import DenseEmbedding, UncoveredError, score_d
from .hyperbolic import PoincareEmbedding, poincare_similarity, project
from .ranking import RankedPairList

__all__ = [
    "SOURCE_COMBINED",
    "SOURCE_FALLBACK",
    "SOURCE_UNCOVERED",
    "ScoredEntry",
    "CoverageReport",
    "hypernym_sets",
    "fallback_scale",
    "CompositionalityScorer",
]

SOURCE_COMBINED = "combined"
SOURCE_FALLBACK = "fallback-distributional"
SOURCE_UNCOVERED = "uncovered"


@dataclass(frozen=True)
class ScoredEntry:
    entry: CompoundEntry
    score: float  # NaN when uncovered
    source: str


@dataclass
class CoverageReport:
    combined: int = 0
    fallback: int = 0
    uncovered: int = 0

    @property
    def total(self) -> int:
        return self.combined + self.fallback + self.uncovered


def hypernym_sets(
    entry: CompoundEntry, ranked: RankedPairList, k: int
) -> tuple[list[str], list[str], list[str]]:
    """Top-k hypernym lists for the phrase and both constituents (any may be empty)."""
    return (
        ranked.top_hypernyms(entry.phrase, k),
        ranked.top_hypernyms(entry.w1, k),
        ranked.top_hypernyms(entry.w2, k),
    )


def fallback_scale(
    covered_combined: Sequence[float],
    covered_dsm: Sequence[float],
    uncovered_dsm: Sequence[float],
) -> list[float]:
    """Rescale uncovered distributional scores by the ratio of covered means.

    The factor is mean(combined scores on covered items) / mean(score_d on
    the same items), so fallback scores land on the combined score's scale
    while preserving their relative order.
    """
    if len(covered_combined) == 0 or len(covered_combined) != len(covered_dsm):
        raise ValueError("need matching, non-empty covered score lists")
    values = list(covered_combined) + list(covered_dsm) + list(uncovered_dsm)
    if not all(math.isfinite(v) for v in values):
        raise ValueError("non-finite score")
    denom = float(np.mean(covered_dsm))
    if denom == 0.0:
        raise ValueError("zero mean of covered distributional scores")
    factor = float(np.mean(covered_combined)) / denom
    return [s * factor for s in uncovered_dsm]


class CompositionalityScorer(BaseEstimator):
    """Scores compound entries against fitted dense and Poincare models.

    Parameters
    ----------
    dense : DenseEmbedding
    poincare : PoincareEmbedding
    ranked : RankedPairList
        Weighted hyponym-hypernym list used to build hypernym sets.
    alpha : float, default=0.4
        Weight of the hypernymy term; 0 reproduces the distributional
        score bit for bit, 1 the hypernymy term alone.
    k : int, default=5
        Hypernyms per surface.
    fallback : bool, default=True
        Whether entries without usable hypernym data receive the rescaled
        distributional score instead of dropping out.
    """

    def __init__(
        self,
        dense: DenseEmbedding,
        poincare: PoincareEmbedding,
        ranked: RankedPairList,
        alpha: float = 0.4,
        k: int = 5,
        fallback: bool = True,
    ) -> None:
        self.dense = dense
        self.poincare = poincare
        self.ranked = ranked
        self.alpha = alpha
        self.k = k
        self.fallback = fallback

    def _check_params(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.k < 1:
            raise ValueError("k must be at least 1")

    def _poincare_vectors(self, surfaces: Sequence[str]) -> list[np.ndarray]:
        # Hypernyms without a Poincare vector are dropped, not fatal.
        out = []
        for s in surfaces:
            vec = self.poincare.get(s)
            if vec is not None:
                out.append(vec)
        return out

    def _max_hypernymy_term(self, vecs_phrase, vecs_w1, vecs_w2) -> float:
        best = -math.inf
        for b in vecs_w1:
            for c in vecs_w2:
                composed = project(b + c)
                for a in vecs_phrase:
                    sim = poincare_similarity(a, composed)
                    if sim > best:
                        best = sim
        return best

    def _mix(self, d: float, p: float) -> float:
        # Endpoint alphas return the raw component so degenerate runs are
        # exactly comparable with single-component scoring.
        if self.alpha == 0.0:
            return d
        if self.alpha == 1.0:
            return p
        return (1.0 - self.alpha) * d + self.alpha * p

    def combined_score(self, entry: CompoundEntry) -> ScoredEntry:
        """Score one entry; fallback entries carry their raw distributional
        score here and are rescaled at dataset level."""
        self._check_params()
        try:
            d = score_d(entry.phrase, entry.w1, entry.w2, self.dense)
        except UncoveredError:
            return ScoredEntry(entry, math.nan, SOURCE_UNCOVERED)
        sets = hypernym_sets(entry, self.ranked, self.k)
        vecs = [self._poincare_vectors(s) for s in sets]
        if all(vecs):
            return ScoredEntry(entry, self._mix(d, self._max_hypernymy_term(*vecs)), SOURCE_COMBINED)
        if self.fallback:
            return ScoredEntry(entry, d, SOURCE_FALLBACK)
        return ScoredEntry(entry, math.nan, SOURCE_UNCOVERED)

    def score_entries(
        self, entries: Sequence[CompoundEntry]
    ) -> tuple[list[ScoredEntry], CoverageReport]:
        """Score a dataset, applying the fallback rescaling pass at the end."""
        self._check_params()
        results: list[ScoredEntry] = []
        covered_combined: list[float] = []
        covered_d: list[float] = []
        fallback_positions: list[int] = []
        report = CoverageReport()
        for entry in entries:
            try:
                d = score_d(entry.phrase, entry.w1, entry.w2, self.dense)
            except UncoveredError:
                results.append(ScoredEntry(entry, math.nan, SOURCE_UNCOVERED))
                report.uncovered += 1
                continue
            sets = hypernym_sets(entry, self.ranked, self.k)
            vecs = [self._poincare_vectors(s) for s in sets]
            if all(vecs):
                score = self._mix(d, self._max_hypernymy_term(*vecs))
                results.append(ScoredEntry(entry, score, SOURCE_COMBINED))
                covered_combined.append(score)
                covered_d.append(d)
                report.combined += 1
            elif self.fallback:
                fallback_positions.append(len(results))
                results.append(ScoredEntry(entry, d, SOURCE_FALLBACK))
                report.fallback += 1
            else:
                results.append(ScoredEntry(entry, math.nan, SOURCE_UNCOVERED))
                report.uncovered += 1
        if fallback_positions:
            raw = [results[i].score for i in fallback_positions]
            if covered_combined:
                scaled = fallback_scale(covered_combined, covered_d, raw)
            else:
                scaled = raw  # nothing to normalize against
            for i, score in zip(fallback_positions, scaled):
                results[i] = ScoredEntry(results[i].entry, score, SOURCE_FALLBACK)
        return results, report

    def predict(self, entries: Sequence[CompoundEntry]) -> np.ndarray:
        """Scores as an array, NaN where an entry is uncovered."""
        scored, _ = self.score_entries(entries)
        return np.array([se.score for se in scored], dtype=float)
