"""Supervised compositionality prediction.

Feature rows concatenate the phrase vector with both constituent vectors
from one embedding space; surfaces without a vector contribute a zero
block. A regressor is fitted separately on dense and Poincare features
over repeated random 75/25 splits, and the two predictions are mixed as

    score = (1 - alpha) * dense_prediction + alpha * poincare_prediction
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, clone

from .datasets import CompoundEntry
from .dense import DenseEmbedding
from .hyperbolic import PoincareEmbedding
from .stats import abs_rho

__all__ = [
    "build_feature_matrix",
    "KernelRidgeRegressor",
    "PLSRegressor",
    "KNNRegressor",
    "mixed_score",
    "SplitPlan",
    "make_splits",
    "SplitRow",
    "ProtocolResult",
    "run_protocol",
    "REGRESSORS",
]

Embedding = Union[DenseEmbedding, PoincareEmbedding]


def build_feature_matrix(entries: Sequence[CompoundEntry], emb: Embedding) -> np.ndarray:
    """(n, 3*dim) matrix of concat(v(phrase), v(w1), v(w2)); missing surfaces
    contribute a zero block of matching length."""
    dim = emb.dim
    rows = np.zeros((len(entries), 3 * dim), dtype=float)
    for i, entry in enumerate(entries):
        for j, surface in enumerate((entry.phrase, entry.w1, entry.w2)):
            vec = emb.get(surface)
            if vec is not None:
                rows[i, j * dim : (j + 1) * dim] = vec
    return rows


def _validate_xy(X, y=None, min_rows: int = 1) -> tuple[np.ndarray, Optional[np.ndarray]]:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be 2-d")
    if not np.all(np.isfinite(X)):
        raise ValueError("non-finite features")
    if len(X) < min_rows:
        raise ValueError(f"need at least {min_rows} training rows")
    if y is None:
        return X, None
    y = np.asarray(y, dtype=float)
    if y.shape != (len(X),):
        raise ValueError("y must be 1-d and match X")
    if not np.all(np.isfinite(y)):
        raise ValueError("non-finite targets")
    return X, y


def _sq_distances(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Direct form keeps geometrically equal distances exactly equal, which
    # the index-based tie rule in kNN depends on.
    diff = A - b
    return np.einsum("ij,ij->i", diff, diff)


def _rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    aa = np.einsum("ij,ij->i", A, A)[:, None]
    bb = np.einsum("ij,ij->i", B, B)[None, :]
    sq = np.maximum(aa + bb - 2.0 * (A @ B.T), 0.0)
    return np.exp(-gamma * sq)


class KernelRidgeRegressor(BaseEstimator, RegressorMixin):
    """Kernel ridge regression with an RBF kernel.

    Fitting solves (K + lam * I) c = y for the dual coefficients, with
    K[i, j] = exp(-gamma * ||x_i - x_j||^2); prediction is the query-kernel
    row dotted with c. ``gamma=None`` defaults to 1 / n_features.
    """

    def __init__(self, lam: float = 1.0, gamma: Optional[float] = None) -> None:
        self.lam = lam
        self.gamma = gamma

    def fit(self, X, y) -> "KernelRidgeRegressor":
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        X, y = _validate_xy(X, y, min_rows=1)
        self.gamma_ = self.gamma if self.gamma is not None else 1.0 / X.shape[1]
        K = _rbf_kernel(X, X, self.gamma_)
        self.dual_coef_ = np.linalg.solve(K + self.lam * np.eye(len(X)), y)
        self.X_fit_ = X
        return self

    def predict(self, X) -> np.ndarray:
        X, _ = _validate_xy(X)
        return _rbf_kernel(X, self.X_fit_, self.gamma_) @ self.dual_coef_


class PLSRegressor(BaseEstimator, RegressorMixin):
    """Single-response partial least squares via iterative deflation.

    Features and target are centered; components are extracted until
    ``n_components`` is reached or the residual is exhausted, and the
    prediction applies the resulting linear map to centered features.
    """

    def __init__(self, n_components: int = 10) -> None:
        self.n_components = n_components

    def fit(self, X, y) -> "PLSRegressor":
        X, y = _validate_xy(X, y, min_rows=2)
        n, n_feat = X.shape
        if not 1 <= self.n_components <= min(n - 1, n_feat):
            raise ValueError("n_components must lie in [1, min(n_rows - 1, n_features)]")
        self.x_mean_ = X.mean(axis=0)
        self.y_mean_ = float(y.mean())
        Xd = X - self.x_mean_
        yd = y - self.y_mean_
        if float(yd @ yd) == 0.0:
            raise ValueError("zero-variance target")
        tiny = np.finfo(float).eps * max(1.0, float(np.abs(Xd).max())) ** 2
        W, P, Q = [], [], []
        for _ in range(self.n_components):
            w = Xd.T @ yd
            wn = float(np.linalg.norm(w))
            if wn <= tiny:
                break
            w = w / wn
            t = Xd @ w
            tt = float(t @ t)
            if tt <= tiny:
                break
            p = Xd.T @ t / tt
            q = float(yd @ t) / tt
            Xd = Xd - np.outer(t, p)
            yd = yd - q * t
            W.append(w)
            P.append(p)
            Q.append(q)
        if not W:
            raise ValueError("no usable components (features are constant)")
        Wm = np.column_stack(W)
        Pm = np.column_stack(P)
        self.coef_ = Wm @ np.linalg.solve(Pm.T @ Wm, np.asarray(Q))
        self.n_components_ = len(W)
        return self

    def predict(self, X) -> np.ndarray:
        X, _ = _validate_xy(X)
        return (X - self.x_mean_) @ self.coef_ + self.y_mean_


class KNNRegressor(BaseEstimator, RegressorMixin):
    """k-nearest-neighbours regression, mean target of the k Euclidean-nearest
    rows; distance ties resolve to the lower training-row index."""

    def __init__(self, k: int = 5) -> None:
        self.k = k

    def fit(self, X, y) -> "KNNRegressor":
        X, y = _validate_xy(X, y, min_rows=1)
        if not 1 <= self.k <= len(X):
            raise ValueError("k must lie in [1, n_rows]")
        self.X_fit_ = X
        self.y_fit_ = y
        return self

    def predict(self, X) -> np.ndarray:
        X, _ = _validate_xy(X)
        out = np.empty(len(X))
        for i, q in enumerate(X):
            d2 = _sq_distances(self.X_fit_, q)
            nearest = np.argsort(d2, kind="stable")[: self.k]
            out[i] = float(self.y_fit_[nearest].mean())
        return out


REGRESSORS = {
    "kernel-ridge": KernelRidgeRegressor,
    "pls": PLSRegressor,
    "knn": KNNRegressor,
}


def mixed_score(d_pred, p_pred, alpha: float):
    """(1 - alpha) * d_pred + alpha * p_pred, exact at the endpoints."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    d = np.asarray(d_pred, dtype=float)
    p = np.asarray(p_pred, dtype=float)
    if alpha == 0.0:
        return d.copy()
    if alpha == 1.0:
        return p.copy()
    return (1.0 - alpha) * d + alpha * p


@dataclass(frozen=True)
class SplitPlan:
    seed: int
    n_splits: int = 25
    train_fraction: float = 0.75


def make_splits(plan: SplitPlan, n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Disjoint train/test index partitions, reproducible from the plan seed."""
    if plan.n_splits < 1:
        raise ValueError("n_splits must be at least 1")
    if not 0.0 < plan.train_fraction < 1.0:
        raise ValueError("train_fraction must lie in (0, 1)")
    n_train = math.floor(n * plan.train_fraction)
    if n_train < 1 or n_train >= n:
        raise ValueError(f"dataset of {n} rows cannot support a {plan.train_fraction} split")
    rng = np.random.default_rng(plan.seed)
    splits = []
    for _ in range(plan.n_splits):
        perm = rng.permutation(n)
        splits.append((np.sort(perm[:n_train]), np.sort(perm[n_train:])))
    return splits


@dataclass(frozen=True)
class SplitRow:
    split_id: int
    rho_dsm: float
    rho_poincare: float
    rho_mixed: float


@dataclass
class ProtocolResult:
    mean_abs_rho: float
    std_abs_rho: float
    splits: list[SplitRow]


def run_protocol(
    entries: Sequence[CompoundEntry],
    dense: DenseEmbedding,
    poincare: PoincareEmbedding,
    model: BaseEstimator,
    alpha: float,
    plan: SplitPlan,
) -> ProtocolResult:
    """Fit ``model`` per split on dense and Poincare features, mix the test
    predictions, and aggregate |rho| over all splits (mean, sample std)."""
    X_d = build_feature_matrix(entries, dense)
    X_p = build_feature_matrix(entries, poincare)
    y = np.array([e.gold for e in entries], dtype=float)
    rows: list[SplitRow] = []
    for split_id, (train, test) in enumerate(make_splits(plan, len(entries))):
        d_pred = clone(model).fit(X_d[train], y[train]).predict(X_d[test])
        p_pred = clone(model).fit(X_p[train], y[train]).predict(X_p[test])
        mixed = mixed_score(d_pred, p_pred, alpha)
        rows.append(
            SplitRow(
                split_id,
                abs_rho(d_pred, y[test]),
                abs_rho(p_pred, y[test]),
                abs_rho(mixed, y[test]),
            )
        )
    rhos = np.array([r.rho_mixed for r in rows])
    std = float(rhos.std(ddof=1)) if len(rhos) > 1 else 0.0
    return ProtocolResult(float(rhos.mean()), std, rows)
