"""Pretrained dense word vectors and the distributional compositionality score.

The score for a two-word phrase compares the phrase vector against the sum
of its L2-normalized constituent vectors:

    score_d(w1 w2) = cos(v(w1w2), v(w1)/||v(w1)|| + v(w2)/||v(w2)||)
"""

from __future__ import annotations

import gzip
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .lookup import surface_variants

__all__ = ["DenseEmbedding", "DenseLoadReport", "UncoveredError", "load_dense", "cosine", "score_d"]


class UncoveredError(LookupError):
    """A required surface has no vector; drives reduced-set and fallback handling."""

    def __init__(self, surface: str):
        super().__init__(surface)
        self.surface = surface


@dataclass
class DenseLoadReport:
    rows_kept: int = 0
    dim_mismatch: int = 0
    duplicates: int = 0
    zero_norm: int = 0
    unparseable: int = 0

    @property
    def rows_skipped(self) -> int:
        return self.dim_mismatch + self.duplicates + self.zero_norm + self.unparseable


@dataclass
class DenseEmbedding:
    """Vocabulary-indexed Euclidean vectors from a pretrained model."""

    vocab: dict[str, int]
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, surface: str) -> bool:
        return self.get(surface) is not None

    def get(self, surface: str) -> Optional[np.ndarray]:
        """Vector for ``surface``, trying the underscore-joined form first."""
        for variant in surface_variants(surface):
            idx = self.vocab.get(variant)
            if idx is not None:
                return self.vectors[idx]
        return None

    def vector(self, surface: str) -> np.ndarray:
        vec = self.get(surface)
        if vec is None:
            raise UncoveredError(surface)
        return vec


def _open_text(path: str):
    if str(path).endswith(".gz"):
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def load_dense(path: str) -> tuple[DenseEmbedding, DenseLoadReport]:
    """Read word-vector text format: a ``count dim`` header, then one
    ``word v1 ... vd`` row per entry (optionally gzip-compressed).

    Rows with the wrong arity, duplicate words, unparseable floats, or a
    zero-norm vector are skipped and tallied in the report; the load is
    fatal only when no usable row remains.
    """
    report = DenseLoadReport()
    with _open_text(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}:1: expected 'count dim' header")
        try:
            declared, dim = int(header[0]), int(header[1])
        except ValueError:
            raise ValueError(f"{path}:1: non-integer header fields") from None
        if dim < 1:
            raise ValueError(f"{path}:1: dimension must be positive")
        vocab: dict[str, int] = {}
        rows: list[np.ndarray] = []
        for line in fh:
            fields = line.split()
            if not fields:
                continue
            word, coords = fields[0], fields[1:]
            if len(coords) != dim:
                report.dim_mismatch += 1
                continue
            if word in vocab:
                report.duplicates += 1
                continue
            try:
                vec = np.array([float(c) for c in coords], dtype=float)
            except ValueError:
                report.unparseable += 1
                continue
            if not np.all(np.isfinite(vec)) or float(vec @ vec) == 0.0:
                report.zero_norm += 1
                continue
            vocab[word] = len(rows)
            rows.append(vec)
    if not rows:
        raise ValueError(f"{path}: no usable vector rows (declared {declared})")
    report.rows_kept = len(rows)
    return DenseEmbedding(vocab, np.vstack(rows)), report


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity in [-1, 1]; zero-norm input raises ``ValueError``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine undefined for a zero-norm vector")
    value = float(a @ b) / (na * nb)
    return min(1.0, max(-1.0, value))


def score_d(phrase: str, w1: str, w2: str, emb: DenseEmbedding) -> float:
    """Distributional compositionality score of ``phrase`` = ``w1 w2``.

    Looks the phrase up as ``w1_w2`` then ``w1 w2``; raises
    :class:`UncoveredError` naming the first missing surface.
    """
    v_phrase = emb.vector(phrase)
    v1 = emb.vector(w1)
    v2 = emb.vector(w2)
    composed = v1 / np.linalg.norm(v1) + v2 / np.linalg.norm(v2)
    return cosine(v_phrase, composed)
