"""Centrality fusion and cluster-representative sensor selection.

Each centrality column is min-max normalized to [0, 1] across all nodes
(constant columns map to zero) and the columns are blended with a
nonnegative weight vector alpha into one score per node.  Within every
cluster the highest-scoring sensor becomes the representative; score ties
break to the lowest sensor index.  The full pipeline chains feature
extraction -> feature z-scoring -> k-means -> centrality table -> scoring
-> per-cluster argmax, with optional mandatory sensors that are excluded
from clustering and appended to the selection.

Min-max normalization makes the uniform default weights meaningful across
measures with very different natural scales, and it preserves each
column's ordering, so the per-cluster argmax is invariant to any strictly
increasing rescaling of a raw centrality column.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .centrality import CentralityTable, LocalizationKernel, centrality_table
from .clustering import ClusterAssignment, KMeansConfig, kmeans
from .evaluation import jaccard
from .features import FeatureConfig, build_feature_matrix, zscore_normalize
from .graphs import Graph, eigendecompose, laplacian, signal_values

UNIFORM_ALPHA = (0.2, 0.2, 0.2, 0.2, 0.2)


@dataclass(frozen=True)
class Weights:
    """Blend weights aligned with the centrality column order."""

    alpha: tuple[float, ...] = UNIFORM_ALPHA

    def __post_init__(self):
        alpha = tuple(float(a) for a in self.alpha)
        if len(alpha) != 5:
            raise ValueError("alpha must have five components")
        if any(a < 0 for a in alpha):
            raise ValueError("alpha components must be nonnegative")
        if not any(a > 0 for a in alpha):
            raise ValueError("alpha must not be all zero")
        object.__setattr__(self, "alpha", alpha)


@dataclass
class SelectionResult:
    """Chosen sensors plus the provenance needed to reproduce them."""

    selected: list[int]
    method: str
    scores: np.ndarray | None = None
    clusters: ClusterAssignment | None = None
    config: dict = field(default_factory=dict)


def minmax_columns(values: np.ndarray) -> np.ndarray:
    """Scale each column to [0, 1]; constant columns become all zeros.

    A column whose spread is within 1e-9 relative of its magnitude counts
    as constant, so float noise on symmetric graphs cannot blow up into a
    full-range score column.
    """
    v = np.asarray(values, dtype=float)
    lo = v.min(axis=0)
    hi = v.max(axis=0)
    out = np.zeros_like(v)
    live = hi - lo > 1e-9 * np.maximum(1.0, np.abs(hi))
    out[:, live] = (v[:, live] - lo[live]) / (hi[live] - lo[live])
    return out


def toposcore(table: CentralityTable, weights: Weights | None = None) -> np.ndarray:
    """Per-node blended score psi = C_normalized @ alpha."""
    weights = weights or Weights()
    values = table.values if isinstance(table, CentralityTable) else np.asarray(table)
    if values.shape[1] != 5:
        raise ValueError("centrality table must have five columns")
    return minmax_columns(values) @ np.asarray(weights.alpha)


def select_representatives(
    scores: np.ndarray,
    clusters: ClusterAssignment,
    method: str = "tvml",
    config: dict | None = None,
    sensor_ids: np.ndarray | None = None,
) -> SelectionResult:
    """Highest-scoring sensor per cluster, ordered by cluster index.

    `sensor_ids` maps clustered row positions back to original sensor
    indices when clustering ran on a subset (mandatory-sensor handling).
    """
    scores = np.asarray(scores, dtype=float)
    labels = clusters.labels
    if sensor_ids is None:
        sensor_ids = np.arange(labels.shape[0])
    if labels.shape[0] != sensor_ids.shape[0]:
        raise ValueError("labels and sensor ids disagree in length")
    selected = []
    for c in range(clusters.k):
        members = sensor_ids[labels == c]
        if members.size == 0:
            raise ValueError(f"cluster {c} is empty")
        member_scores = scores[members]
        selected.append(int(members[int(np.argmax(member_scores))]))
    return SelectionResult(
        selected=selected,
        method=method,
        scores=scores,
        clusters=clusters,
        config=dict(config or {}),
    )


def tvml_select(
    signal,
    g: Graph,
    m: int,
    weights: Weights | None = None,
    kernel: LocalizationKernel | None = None,
    feature_cfg: FeatureConfig | None = None,
    seed: int = 0,
    n_restarts: int = 10,
    mandatory: tuple[int, ...] = (),
) -> SelectionResult:
    """Full selection pipeline on a time-varying signal and its graph.

    With a mandatory set Q the clustering runs on the remaining sensors
    with m - |Q| clusters and Q is appended to the selection.
    """
    x = signal_values(signal)
    n = x.shape[0]
    if g.n != n:
        raise ValueError("graph and signal disagree on sensor count")
    if not 1 <= m <= n:
        raise ValueError(f"m must lie in [1, {n}]")
    mandatory = tuple(sorted(set(int(q) for q in mandatory)))
    if any(not 0 <= q < n for q in mandatory):
        raise ValueError("mandatory sensor index out of range")
    if mandatory and m <= len(mandatory):
        raise ValueError("m must exceed the number of mandatory sensors")
    weights = weights or Weights()
    kernel = kernel or LocalizationKernel()
    feature_cfg = feature_cfg or FeatureConfig()

    feats = zscore_normalize(build_feature_matrix(signal, feature_cfg))
    free = np.array([i for i in range(n) if i not in mandatory])
    m_free = m - len(mandatory)
    clusters = kmeans(
        feats.values[free],
        KMeansConfig(k=m_free, seed=seed, n_restarts=n_restarts),
    )

    basis = eigendecompose(laplacian(g))
    table = centrality_table(g, basis, kernel)
    scores = toposcore(table, weights)

    config = {
        "method": "tvml",
        "m": m,
        "seed": seed,
        "n_restarts": n_restarts,
        "alpha": list(weights.alpha),
        "kernel_decay": kernel.decay if kernel.fn is None else "custom",
        "k_bins": feature_cfg.k_bins,
        "mandatory": list(mandatory),
        "clustered_sensors": [int(i) for i in free],
    }
    result = select_representatives(scores, clusters, "tvml", config, sensor_ids=free)
    result.selected = result.selected + list(mandatory)
    return result


@dataclass
class AlphaSweepEntry:
    alpha: tuple[float, ...]
    result: SelectionResult
    jaccard_vs_uniform: float


def one_at_a_time_grid(steps: int = 11) -> list[tuple[float, ...]]:
    """Vary one weight over [0, 1], splitting the rest equally.

    For each measure i and each grid value v: alpha_i = v and the other
    four weights are (1 - v) / 4, so every point is a convex combination.
    """
    grid = []
    for i in range(5):
        for v in np.linspace(0.0, 1.0, steps):
            alpha = [(1.0 - v) / 4.0] * 5
            alpha[i] = float(v)
            grid.append(tuple(alpha))
    return grid


def alpha_sweep(
    table: CentralityTable,
    clusters: ClusterAssignment,
    grid: list[tuple[float, ...]],
    sensor_ids: np.ndarray | None = None,
) -> list[AlphaSweepEntry]:
    """Selection per weight vector plus overlap with the uniform choice."""
    if not grid:
        raise ValueError("alpha grid must be nonempty")
    baseline = select_representatives(
        toposcore(table, Weights()), clusters, "tvml", sensor_ids=sensor_ids
    )
    entries = []
    for alpha in grid:
        w = Weights(tuple(alpha))
        res = select_representatives(
            toposcore(table, w),
            clusters,
            "tvml",
            {"alpha": list(w.alpha)},
            sensor_ids=sensor_ids,
        )
        entries.append(
            AlphaSweepEntry(w.alpha, res, jaccard(res.selected, baseline.selected))
        )
    return entries
