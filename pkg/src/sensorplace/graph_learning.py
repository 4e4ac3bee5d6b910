"""Smoothness-based graph inference from time-varying signals.

Learns a nonnegative, symmetric, zero-diagonal adjacency A from a pairwise
signal-distance matrix Z by minimizing

    ||A o Z||_1,1  -  lambda1 * 1^T log(A 1)  +  (lambda2 / 2) * ||A||_F^2

over the upper-triangle weight vector with projected gradient descent and
backtracking line search.  The log barrier keeps every node degree strictly
positive (weights are floored at 1e-12 so it stays finite); the Frobenius
term controls the spread of the weights.  Z entries are time-averaged
squared signal differences, so the lambda defaults keep their meaning
across signal lengths.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .graphs import Graph, TimeVertexSignal, signal_values

WEIGHT_FLOOR = 1e-12
_ARMIJO = 1e-4


@dataclass
class LearnConfig:
    lambda1: float = 0.01
    lambda2: float = 0.5
    max_iter: int = 10_000
    rel_tol: float = 1e-6
    prune_ratio: float = 0.0

    def __post_init__(self):
        if not self.lambda1 > 0:
            raise ValueError("lambda1 must be positive")
        if self.lambda2 < 0:
            raise ValueError("lambda2 must be nonnegative")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not 0 <= self.prune_ratio < 1:
            raise ValueError("prune_ratio must lie in [0, 1)")


class ConvergenceError(RuntimeError):
    """Solver failed to reach tolerance; carries the last iterate."""

    def __init__(self, message: str, graph: Graph | None = None, residual: float | None = None):
        super().__init__(message)
        self.graph = graph
        self.residual = residual


def zscore_rows(values: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """Per-row standardization; rows with negligible spread become zeros."""
    v = np.asarray(values, dtype=float)
    mean = v.mean(axis=1, keepdims=True)
    std = v.std(axis=1, keepdims=True)
    out = np.zeros_like(v)
    live = std[:, 0] > eps * (1.0 + np.abs(mean[:, 0]))
    out[live] = (v[live] - mean[live]) / std[live]
    return out


def pairwise_distances(signal) -> np.ndarray:
    """Time-averaged squared distances Z(i,j) = mean_t (X(i,t) - X(j,t))^2."""
    x = signal_values(signal)
    if not np.isfinite(x).all():
        raise ValueError("signal contains non-finite values")
    t = x.shape[1]
    sq = (x * x).sum(axis=1)
    z = (sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)) / t
    z = np.maximum((z + z.T) / 2.0, 0.0)
    np.fill_diagonal(z, 0.0)
    return z


def _validate_distances(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.ndim != 2 or z.shape[0] != z.shape[1]:
        raise ValueError("distance matrix must be square")
    if not np.isfinite(z).all():
        raise ValueError("distance matrix must be finite")
    if np.abs(z - z.T).max(initial=0.0) > 0:
        raise ValueError("distance matrix must be symmetric")
    if np.any(z < 0) or np.any(np.diag(z) != 0):
        raise ValueError("distance matrix must be nonnegative with zero diagonal")
    return z


def learn_graph(
    z: np.ndarray,
    cfg: LearnConfig | None = None,
    warm_start: Graph | None = None,
    callback: Callable[[int, float, float], None] | None = None,
) -> Graph:
    """Minimize the smoothness objective; returns the learned adjacency.

    `callback(iteration, objective, projected_gradient_norm)` is invoked at
    every accepted iterate, which yields a monotone objective log.  Raises
    ConvergenceError (carrying the last iterate and residual) if tolerance
    is not reached within cfg.max_iter iterations.
    """
    cfg = cfg or LearnConfig()
    z = _validate_distances(z)
    n = z.shape[0]
    if n < 2:
        raise ValueError("graph learning needs at least two nodes")

    rows, cols = np.triu_indices(n, 1)
    zv = z[rows, cols]

    def degrees(a):
        return np.bincount(rows, a, n) + np.bincount(cols, a, n)

    def objective(a):
        return (
            2.0 * float(a @ zv)
            - cfg.lambda1 * float(np.log(degrees(a)).sum())
            + cfg.lambda2 * float(a @ a)
        )

    def gradient(a):
        inv = cfg.lambda1 / degrees(a)
        return 2.0 * zv - (inv[rows] + inv[cols]) + 2.0 * cfg.lambda2 * a

    if warm_start is not None:
        if warm_start.n != n:
            raise ValueError("warm start has wrong node count")
        a = np.maximum(warm_start.adjacency[rows, cols], WEIGHT_FLOOR)
    else:
        # per-edge closed form of the decoupled problem lambda2 a^2 + z a -
        # lambda1 = 0, in the cancellation-free form (exact at n = 2)
        if cfg.lambda2 > 0:
            a = (2.0 * cfg.lambda1) / (
                zv + np.sqrt(zv * zv + 4.0 * cfg.lambda2 * cfg.lambda1)
            )
        else:
            a = cfg.lambda1 / np.maximum(zv, cfg.lambda1)
        a = np.maximum(a, WEIGHT_FLOOR)

    def build(a):
        adj = np.zeros((n, n))
        adj[rows, cols] = a
        adj[cols, rows] = a
        return Graph(adj)

    f = objective(a)
    step = 1.0
    for it in range(cfg.max_iter):
        g = gradient(a)
        pg = np.where(a > WEIGHT_FLOOR, g, np.minimum(g, 0.0))
        pg_norm = float(np.linalg.norm(pg))
        if callback is not None:
            callback(it, f, pg_norm)
        frob = np.sqrt(2.0) * float(np.linalg.norm(a))
        if pg_norm <= cfg.rel_tol * (1.0 + frob):
            return build(a)
        step = min(step * 2.0, 1e8)
        while True:
            trial = np.maximum(a - step * g, WEIGHT_FLOOR)
            move = trial - a
            ft = objective(trial)
            if ft <= f - (_ARMIJO / step) * float(move @ move):
                break
            step *= 0.5
            if step < 1e-18:
                raise ConvergenceError(
                    "line search stalled", graph=build(a), residual=pg_norm
                )
        a, f = trial, ft

    g = gradient(a)
    pg = np.where(a > WEIGHT_FLOOR, g, np.minimum(g, 0.0))
    residual = float(np.linalg.norm(pg))
    raise ConvergenceError(
        f"no convergence in {cfg.max_iter} iterations (residual {residual:.3e})",
        graph=build(a),
        residual=residual,
    )


def postprocess(g: Graph, prune_ratio: float = 0.0) -> Graph:
    """Scale weights so the maximum is 1, then drop weights below the ratio."""
    if not 0 <= prune_ratio < 1:
        raise ValueError("prune_ratio must lie in [0, 1)")
    a = g.adjacency
    wmax = float(a.max(initial=0.0))
    if wmax <= 0:
        raise ValueError("cannot postprocess an all-zero graph")
    scaled = a / wmax
    scaled[scaled < prune_ratio] = 0.0
    return Graph(scaled, g.node_labels)


def learn_graph_from_signal(
    signal,
    cfg: LearnConfig | None = None,
    warm_start: Graph | None = None,
    callback: Callable[[int, float, float], None] | None = None,
) -> Graph:
    """Full pipeline: z-score rows, build Z, solve, then scale and prune."""
    cfg = cfg or LearnConfig()
    x = signal_values(signal)
    labels = signal.node_labels if isinstance(signal, TimeVertexSignal) else None
    z = pairwise_distances(zscore_rows(x))
    learned = learn_graph(z, cfg, warm_start=warm_start, callback=callback)
    pruned = postprocess(learned, cfg.prune_ratio)
    return Graph(pruned.adjacency, labels)
