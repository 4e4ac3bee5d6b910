"""Seeded k-means over sensor feature vectors.

Lloyd iterations from k-means++ initialization, restarted n_restarts times
with consecutive seeds (seed, seed+1, ...); the lowest-inertia run wins.
All randomness flows through the splitmix64 stream documented in rng.py, so
assignments are reproducible bit-for-bit.  Tie rules, everywhere, break to
the lowest index: point-to-centroid ties pick the lowest centroid index,
k-means++ with zero total mass picks the lowest unchosen point, and the
empty-cluster repair moves the farthest point (lowest index on ties) and
re-centers the empty cluster on it.  Final labels are canonicalized by
order of first appearance so equal partitions compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import FeatureMatrix
from .rng import SplitMix64


@dataclass
class KMeansConfig:
    k: int
    seed: int = 0
    max_iter: int = 300
    tol: float = 1e-9
    n_restarts: int = 10

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.max_iter < 1 or self.n_restarts < 1:
            raise ValueError("max_iter and n_restarts must be positive")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")


@dataclass
class ClusterAssignment:
    labels: np.ndarray
    centroids: np.ndarray
    inertia: float

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


def _feature_values(f) -> np.ndarray:
    if isinstance(f, FeatureMatrix):
        return f.values
    v = np.asarray(f, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    return v


def _dist2(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - centroids[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _kmeanspp_init(x: np.ndarray, k: int, rng: SplitMix64) -> np.ndarray:
    n = x.shape[0]
    chosen = [rng.below(n)]
    d2 = ((x - x[chosen[0]]) ** 2).sum(axis=1)
    taken = np.zeros(n, dtype=bool)
    taken[chosen[0]] = True
    while len(chosen) < k:
        total = float(d2.sum())
        if total <= 0.0:
            idx = int(np.flatnonzero(~taken)[0])
        else:
            r = rng.uniform() * total
            idx = int(np.searchsorted(np.cumsum(d2), r, side="right"))
            idx = min(idx, n - 1)
        chosen.append(idx)
        taken[idx] = True
        d2 = np.minimum(d2, ((x - x[idx]) ** 2).sum(axis=1))
    return x[chosen].copy()


def _repair_empty(x, labels, centroids, d2):
    """Give each empty cluster the farthest point from a multi-member cluster."""
    k = centroids.shape[0]
    counts = np.bincount(labels, minlength=k)
    for empty in np.flatnonzero(counts == 0):
        own = d2[np.arange(x.shape[0]), labels].copy()
        own[counts[labels] <= 1] = -1.0  # never drain a singleton
        point = int(np.argmax(own))
        counts[labels[point]] -= 1
        labels[point] = empty
        counts[empty] += 1
        centroids[empty] = x[point]
        d2[:, empty] = ((x - x[point]) ** 2).sum(axis=1)
    return labels, centroids


def _lloyd(x: np.ndarray, centroids: np.ndarray, max_iter: int, tol: float):
    """One Lloyd run; returns (labels, centroids, inertia, inertia_history)."""
    k = centroids.shape[0]
    history = []
    for _ in range(max_iter):
        d2 = _dist2(x, centroids)
        labels = np.argmin(d2, axis=1)
        labels, centroids = _repair_empty(x, labels, centroids, d2)
        history.append(float(d2[np.arange(x.shape[0]), labels].sum()))
        new_centroids = np.empty_like(centroids)
        for c in range(k):
            new_centroids[c] = x[labels == c].mean(axis=0)
        shift = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
        centroids = new_centroids
        if shift <= tol:
            break
    inertia = float(((x - centroids[labels]) ** 2).sum())
    return labels, centroids, inertia, history


def _canonicalize(labels: np.ndarray, centroids: np.ndarray):
    remap: dict[int, int] = {}
    for lab in labels:
        if int(lab) not in remap:
            remap[int(lab)] = len(remap)
    new_labels = np.array([remap[int(lab)] for lab in labels])
    order = sorted(remap, key=remap.get)
    return new_labels, centroids[order]


def kmeans(f, cfg: KMeansConfig) -> ClusterAssignment:
    """Best-of-restarts seeded k-means; deterministic given (f, cfg)."""
    x = _feature_values(f)
    n = x.shape[0]
    if cfg.k > n:
        raise ValueError(f"cannot form {cfg.k} clusters from {n} points")
    if not np.isfinite(x).all():
        raise ValueError("feature matrix contains non-finite values")
    best = None
    for restart in range(cfg.n_restarts):
        rng = SplitMix64(cfg.seed + restart)
        init = _kmeanspp_init(x, cfg.k, rng)
        labels, centroids, inertia, _ = _lloyd(x, init, cfg.max_iter, cfg.tol)
        if best is None or inertia < best[0]:
            best = (inertia, labels, centroids)
    inertia, labels, centroids = best
    labels, centroids = _canonicalize(labels, centroids)
    return ClusterAssignment(labels, centroids, inertia)
