"""Poincare-ball geometry and embedding training.

Points live in the open d-dimensional unit ball. Distances follow

    d(x, y) = arccosh(1 + 2 * ||x - y||^2 / ((1 - ||x||^2) * (1 - ||y||^2)))

and similarity is 1 / (1 + d). Embeddings are trained on hyponym-hypernym
pairs with a negative-sampling softmax loss, optimized by Riemannian SGD:
the Euclidean gradient at a point theta is rescaled by (1 - ||theta||^2)^2 / 4
and every update is retracted back inside the ball.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from sklearn.base import BaseEstimator

from .lookup import surface_variants

__all__ = [
    "BOUNDARY_EPS",
    "poincare_distance",
    "poincare_similarity",
    "project",
    "riemannian_scale",
    "negative_sampling_loss",
    "PoincareEmbedding",
    "PoincareModel",
]

# Margin kept between every stored point and the unit sphere.
BOUNDARY_EPS = 1e-5

# Multiplicative safety applied when retracting onto the boundary shell, so
# the containment bound ||theta|| <= 1 - eps survives coordinate rounding.
_RETRACT_SAFETY = 1.0 - 1e-12


def poincare_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Hyperbolic distance between two points strictly inside the unit ball.

    Raises ``ValueError`` if either point lies on or outside the closed ball.
    The arccosh argument is floored at 1 so that coincident points give a
    distance of exactly zero despite rounding in the quotient.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xx = float(x @ x)
    yy = float(y @ y)
    if xx >= 1.0 or yy >= 1.0:
        raise ValueError("point on or outside the closed unit ball")
    diff = x - y
    arg = 1.0 + 2.0 * float(diff @ diff) / ((1.0 - xx) * (1.0 - yy))
    return float(np.arccosh(max(arg, 1.0)))


def poincare_similarity(x: np.ndarray, y: np.ndarray) -> float:
    """Similarity in (0, 1]: 1 / (1 + distance)."""
    return 1.0 / (1.0 + poincare_distance(x, y))


def project(p: np.ndarray, eps: float = BOUNDARY_EPS) -> np.ndarray:
    """Retract ``p`` into the ball of radius 1 - eps.

    Points already inside are returned unchanged; anything on or beyond the
    shell is rescaled onto it. Works on a single vector or an (..., d) array
    of row vectors. Non-finite coordinates raise ``ValueError``.
    """
    p = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(p)):
        raise ValueError("non-finite coordinates")
    norm = np.sqrt(np.sum(p * p, axis=-1, keepdims=True))
    limit = 1.0 - eps
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(norm > limit, limit * _RETRACT_SAFETY / np.where(norm > 0, norm, 1.0), 1.0)
    return p * scale


def riemannian_scale(theta: np.ndarray) -> float:
    """Metric factor converting Euclidean gradients at ``theta``: (1 - ||theta||^2)^2 / 4."""
    theta = np.asarray(theta, dtype=float)
    return (1.0 - float(theta @ theta)) ** 2 / 4.0


def _distance_grad_pair(u, c, uu, cc, gamma):
    # Euclidean gradients of d(u, c) wrt u and c (closed form); gamma is the
    # arccosh argument. Singular at gamma = 1, guarded by a tiny floor.
    alpha = 1.0 - uu
    beta = 1.0 - cc
    denom = np.sqrt(max(gamma * gamma - 1.0, 1e-30))
    uc = float(u @ c)
    grad_u = (4.0 / (beta * denom)) * (((cc - 2.0 * uc + 1.0) / (alpha * alpha)) * u - c / alpha)
    grad_c = (4.0 / (alpha * denom)) * (((uu - 2.0 * uc + 1.0) / (beta * beta)) * c - u / beta)
    return grad_u, grad_c


def negative_sampling_loss(
    theta_u: np.ndarray,
    candidates: np.ndarray,
    l2_coeff: float,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Loss and Euclidean gradients for one positive-pair update.

    ``candidates`` stacks the positive target first, then the negative
    samples, as rows. The loss is

        -log( exp(-d(u, v)) / sum_w exp(-d(u, w)) ) + l2_coeff * ||u||^2

    with w ranging over all candidate rows. Returns ``(loss, grad_u,
    grad_candidates)`` where ``grad_candidates`` has one row per candidate.
    """
    u = np.asarray(theta_u, dtype=float)
    cands = np.atleast_2d(np.asarray(candidates, dtype=float))
    m = len(cands)
    uu = float(u @ u)
    dists = np.empty(m)
    gammas = np.empty(m)
    ccs = np.empty(m)
    for j in range(m):
        c = cands[j]
        cc = float(c @ c)
        diff = u - c
        gamma = 1.0 + 2.0 * float(diff @ diff) / ((1.0 - uu) * (1.0 - cc))
        dists[j] = np.arccosh(max(gamma, 1.0))
        gammas[j] = gamma
        ccs[j] = cc
    scores = -dists
    shift = scores.max()
    exp_scores = np.exp(scores - shift)
    log_norm = shift + np.log(exp_scores.sum())
    loss = -scores[0] + log_norm + l2_coeff * uu
    softmax = exp_scores / exp_scores.sum()

    grad_u = 2.0 * l2_coeff * u
    grad_cands = np.zeros_like(cands)
    for j in range(m):
        dl_dd = -(softmax[j] - (1.0 if j == 0 else 0.0))
        dd_du, dd_dc = _distance_grad_pair(u, cands[j], uu, ccs[j], gammas[j])
        grad_u = grad_u + dl_dd * dd_du
        grad_cands[j] = dl_dd * dd_dc
    return float(loss), grad_u, grad_cands


def _format_float(x: float) -> str:
    return repr(float(x))


@dataclass
class PoincareEmbedding:
    """Vocabulary-indexed points inside the open unit ball."""

    vocab: dict[str, int]
    points: np.ndarray

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2:
            raise ValueError("points must be a 2-d array")
        if len(self.vocab) != len(self.points):
            raise ValueError("vocab size does not match point count")
        if self.points.shape[1] < 2:
            raise ValueError("embedding dimension must be at least 2")
        norms = np.linalg.norm(self.points, axis=1)
        if len(norms) and float(norms.max()) >= 1.0:
            raise ValueError("all points must lie strictly inside the unit ball")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, surface: str) -> bool:
        return self.get(surface) is not None

    def get(self, surface: str) -> Optional[np.ndarray]:
        """Vector for ``surface`` (trying underscore/space variants), or None."""
        for variant in surface_variants(surface):
            idx = self.vocab.get(variant)
            if idx is not None:
                return self.points[idx]
        return None

    def vector(self, surface: str) -> np.ndarray:
        vec = self.get(surface)
        if vec is None:
            raise KeyError(surface)
        return vec

    def save(self, path: str) -> None:
        """Write ``vocab_size dim`` header then one full-precision row per entry.

        Internal spaces in surfaces are stored as underscores, so the format
        round-trips exactly for space-joined surfaces; keys that already
        contain literal underscores load back spaced but stay reachable
        through :meth:`get`'s variant lookup.
        """
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{len(self.vocab)} {self.dim}\n")
            for surface, idx in self.vocab.items():
                coords = " ".join(_format_float(c) for c in self.points[idx])
                fh.write(f"{surface.replace(' ', '_')} {coords}\n")

    @classmethod
    def load(cls, path: str) -> "PoincareEmbedding":
        """Inverse of :meth:`save`; malformed content raises with its line number."""
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline()
            parts = header.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:1: expected 'vocab_size dim' header")
            try:
                count, dim = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:1: non-integer header fields") from None
            if count < 1:
                raise ValueError(f"{path}:1: empty vocabulary")
            vocab: dict[str, int] = {}
            points = np.empty((count, dim), dtype=float)
            for line_no, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                fields = line.split()
                if len(fields) != dim + 1:
                    raise ValueError(
                        f"{path}:{line_no}: expected {dim + 1} fields, got {len(fields)}"
                    )
                surface = fields[0].replace("_", " ")
                if surface in vocab:
                    raise ValueError(f"{path}:{line_no}: duplicate surface {surface!r}")
                idx = len(vocab)
                if idx >= count:
                    raise ValueError(f"{path}:{line_no}: more rows than the header declares")
                try:
                    points[idx] = [float(f) for f in fields[1:]]
                except ValueError:
                    raise ValueError(f"{path}:{line_no}: unparseable coordinate") from None
                if float(points[idx] @ points[idx]) >= 1.0:
                    raise ValueError(f"{path}:{line_no}: point outside the open unit ball")
                vocab[surface] = idx
        if len(vocab) != count:
            raise ValueError(f"{path}: header declares {count} rows, found {len(vocab)}")
        return cls(vocab, points)


class PoincareModel(BaseEstimator):
    """Trains a Poincare embedding from hyponym-hypernym pairs.

    Parameters
    ----------
    dim : int, default=50
        Embedding dimensionality.
    negatives : int, default=2
        Negative samples per positive pair, drawn uniformly from the
        vocabulary excluding the pair itself.
    learning_rate : float, default=0.1
        SGD step size after burn-in.
    l2_coeff : float, default=1.0
        Coefficient of the squared-norm penalty on the hyponym-side vector
        of each update.
    epochs : int, default=200
        Total passes over the pair list, burn-in included.
    burn_in_epochs : int, default=10
        Initial epochs run at learning_rate / burn_in_lr_divisor.
    burn_in_lr_divisor : float, default=10.0
    init_range : float, default=0.001
        Points start uniform in (-init_range, +init_range) per coordinate.
    boundary_eps : float, default=1e-5
        Margin kept between points and the unit sphere.
    seed : int, default=0
        Drives initialization, pair shuffling, and negative sampling; a
        fixed (pairs, params, seed) triple reproduces training bitwise.

    Attributes
    ----------
    embedding_ : PoincareEmbedding
        The trained embedding.
    final_loss_ : float
        Mean per-update loss over the last epoch.
    """

    def __init__(
        self,
        dim: int = 50,
        negatives: int = 2,
        learning_rate: float = 0.1,
        l2_coeff: float = 1.0,
        epochs: int = 200,
        burn_in_epochs: int = 10,
        burn_in_lr_divisor: float = 10.0,
        init_range: float = 0.001,
        boundary_eps: float = BOUNDARY_EPS,
        seed: int = 0,
    ) -> None:
        self.dim = dim
        self.negatives = negatives
        self.learning_rate = learning_rate
        self.l2_coeff = l2_coeff
        self.epochs = epochs
        self.burn_in_epochs = burn_in_epochs
        self.burn_in_lr_divisor = burn_in_lr_divisor
        self.init_range = init_range
        self.boundary_eps = boundary_eps
        self.seed = seed

    def _check_params(self) -> None:
        if self.dim < 2:
            raise ValueError("dim must be at least 2")
        if self.negatives < 1:
            raise ValueError("negatives must be at least 1")
        for name in ("learning_rate", "l2_coeff", "burn_in_lr_divisor", "init_range", "boundary_eps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if not 0 <= self.burn_in_epochs <= self.epochs:
            raise ValueError("burn_in_epochs must lie in [0, epochs]")

    def fit(self, pairs: Iterable[tuple[str, str]], y: None = None) -> "PoincareModel":
        """Train on ``pairs`` of (hyponym, hypernym) surfaces."""
        self._check_params()
        pair_list = [(str(a), str(b)) for a, b in pairs]
        pair_list = [(a, b) for a, b in pair_list if a != b]  # self-pairs are untrainable
        if not pair_list:
            raise ValueError("no trainable pairs")

        vocab: dict[str, int] = {}
        for a, b in pair_list:
            for surface in (a, b):
                if surface not in vocab:
                    vocab[surface] = len(vocab)
        n = len(vocab)
        u_idx = np.array([vocab[a] for a, _ in pair_list], dtype=np.int64)
        v_idx = np.array([vocab[b] for _, b in pair_list], dtype=np.int64)

        rng = np.random.default_rng(self.seed)
        points = rng.uniform(-self.init_range, self.init_range, size=(n, self.dim))
        limit = 1.0 - self.boundary_eps

        last_epoch_mean = 0.0
        for epoch in range(self.epochs):
            lr = self.learning_rate
            if epoch < self.burn_in_epochs:
                lr = self.learning_rate / self.burn_in_lr_divisor
            order = rng.permutation(len(pair_list))
            total = 0.0
            for t in order:
                total += self._apply_update(points, int(u_idx[t]), int(v_idx[t]), lr, rng, limit)
            last_epoch_mean = total / len(pair_list)

        self.embedding_ = PoincareEmbedding(vocab, points)
        self.final_loss_ = last_epoch_mean
        return self

    def _sample_negatives(self, rng: np.random.Generator, n: int, u: int, v: int) -> np.ndarray:
        if n <= 2:
            return np.empty(0, dtype=np.int64)
        lo, hi = (u, v) if u < v else (v, u)
        draws = rng.integers(0, n - 2, size=self.negatives)
        draws = draws + (draws >= lo)
        draws = draws + (draws >= hi)
        return draws

    def _apply_update(
        self,
        points: np.ndarray,
        u: int,
        v: int,
        lr: float,
        rng: np.random.Generator,
        limit: float,
    ) -> float:
        negs = self._sample_negatives(rng, len(points), u, v)
        cand_idx = np.concatenate(([v], negs))
        loss, grad_u, grad_cands = negative_sampling_loss(points[u], points[cand_idx], self.l2_coeff)

        # Accumulate per index before stepping: a negative can repeat.
        grads: dict[int, np.ndarray] = {u: grad_u}
        for j, idx in enumerate(cand_idx):
            idx = int(idx)
            if idx in grads:
                grads[idx] = grads[idx] + grad_cands[j]
            else:
                grads[idx] = grad_cands[j]
        for idx, grad in grads.items():
            theta = points[idx]
            stepped = theta - lr * riemannian_scale(theta) * grad
            norm = float(np.sqrt(stepped @ stepped))
            if norm > limit:
                stepped = stepped * (limit * _RETRACT_SAFETY / norm)
            points[idx] = stepped
        return loss
