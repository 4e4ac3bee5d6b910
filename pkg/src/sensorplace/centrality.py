"""Node-importance measures fused by the selection stage.

Five measures, assembled as the columns [degree, betweenness, eigenvector,
harmonic, localization] of an N x 5 table:

* degree: row sums of the adjacency;
* betweenness: Brandes accumulation over Dijkstra shortest paths, counting
  each unordered pair once;
* eigenvector: dominant adjacency eigenvector by power iteration;
* harmonic: sum of reciprocal shortest-path distances (0 for unreachable);
* localization: 2-norms of the rows of sqrt(N) * U g(Lambda) U^T.

Edge weights are similarities, so shortest paths use edge length
1/weight.  Path-length ties are detected with a 1e-12 relative tolerance;
all tie-breaks resolve to the lowest node index.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .graphs import Graph, SpectralBasis

_TIE_EPS = 1e-12


@dataclass
class LocalizationKernel:
    """Spectral kernel g evaluated on Laplacian eigenvalues.

    With no explicit function the default is g(lam) = exp(-decay * lam /
    lam_max), a low-pass profile; lam_max is taken from the eigenvalues
    the kernel is evaluated on.
    """

    fn: Callable[[float], float] | None = None
    decay: float = 10.0

    def evaluate(self, eigenvalues: np.ndarray) -> np.ndarray:
        eigenvalues = np.asarray(eigenvalues, dtype=float)
        if self.fn is not None:
            response = np.array([self.fn(lam) for lam in eigenvalues], dtype=float)
        else:
            lam_max = float(eigenvalues.max(initial=0.0))
            scale = lam_max if lam_max > 0 else 1.0
            response = np.exp(-self.decay * eigenvalues / scale)
        if not np.isfinite(response).all():
            raise ValueError("kernel returned a non-finite value")
        if np.any(response < 0):
            raise ValueError("kernel must be nonnegative")
        return response


@dataclass
class CentralityTable:
    values: np.ndarray  # N x 5, columns in COLUMN_NAMES order
    column_names: tuple = (
        "degree",
        "betweenness",
        "eigenvector",
        "harmonic",
        "localization",
    )


def _length_adjacency(g: Graph) -> list[list[tuple[int, float]]]:
    adj: list[list[tuple[int, float]]] = [[] for _ in range(g.n)]
    a = g.adjacency
    for i in range(g.n):
        for j in np.flatnonzero(a[i] > 0):
            adj[i].append((int(j), 1.0 / a[i, j]))
    return adj


def _dijkstra(adj, source: int, n: int):
    """Distances, shortest-path counts, predecessor lists, settle order."""
    dist = np.full(n, np.inf)
    sigma = np.zeros(n)
    preds: list[list[int]] = [[] for _ in range(n)]
    order: list[int] = []
    settled = [False] * n
    dist[source] = 0.0
    sigma[source] = 1.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if settled[u]:
            continue
        settled[u] = True
        order.append(u)
        for v, w in adj[u]:
            if settled[v]:
                continue
            nd = d + w
            eps = _TIE_EPS * (1.0 + nd)
            if nd < dist[v] - eps:
                dist[v] = nd
                sigma[v] = sigma[u]
                preds[v] = [u]
                heapq.heappush(heap, (nd, v))
            elif abs(nd - dist[v]) <= eps:
                sigma[v] += sigma[u]
                preds[v].append(u)
    return dist, sigma, preds, order


def degree_centrality(g: Graph) -> np.ndarray:
    return g.adjacency.sum(axis=1)


def betweenness_centrality(g: Graph) -> np.ndarray:
    """Brandes accumulation; unordered node pairs are counted once."""
    adj = _length_adjacency(g)
    bc = np.zeros(g.n)
    for s in range(g.n):
        _, sigma, preds, order = _dijkstra(adj, s, g.n)
        delta = np.zeros(g.n)
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    return bc / 2.0


def eigenvector_centrality(
    g: Graph, tol: float = 1e-10, max_iter: int = 10_000
) -> np.ndarray:
    """Dominant adjacency eigenvector, nonnegative, unit 2-norm.

    Power iteration runs on A + I: the unit shift leaves eigenvectors
    unchanged and guarantees a strictly dominant eigenvalue even on
    bipartite graphs, where iterating A itself oscillates.  On
    disconnected graphs the iteration settles on the component with the
    largest adjacency eigenvalue and is zero elsewhere.
    """
    a = g.adjacency
    if not np.any(a > 0):
        raise ValueError("eigenvector centrality needs at least one edge")
    x = np.ones(g.n) / np.sqrt(g.n)
    for _ in range(max_iter):
        y = a @ x + x
        y /= np.linalg.norm(y)
        if np.max(np.abs(y - x)) < tol:
            return y
        x = y
    raise RuntimeError(f"power iteration did not converge in {max_iter} steps")


def harmonic_centrality(g: Graph) -> np.ndarray:
    adj = _length_adjacency(g)
    h = np.zeros(g.n)
    for i in range(g.n):
        dist, _, _, _ = _dijkstra(adj, i, g.n)
        reachable = np.isfinite(dist) & (dist > 0)
        h[i] = float(np.sum(1.0 / dist[reachable]))
    return h


def localization_matrix(
    basis: SpectralBasis, kernel: LocalizationKernel | None = None
) -> np.ndarray:
    """T_g = sqrt(N) * U g(Lambda) U^T."""
    kernel = kernel or LocalizationKernel()
    response = kernel.evaluate(basis.eigenvalues)
    u = basis.eigenvectors
    return np.sqrt(basis.n) * (u * response) @ u.T


def localization_norms(
    basis: SpectralBasis, kernel: LocalizationKernel | None = None
) -> np.ndarray:
    """Row 2-norms of the localization operator."""
    return np.linalg.norm(localization_matrix(basis, kernel), axis=1)


def centrality_table(
    g: Graph,
    basis: SpectralBasis | None = None,
    kernel: LocalizationKernel | None = None,
) -> CentralityTable:
    """Assemble the five centrality columns in fixed order.

    Edgeless graphs get a zero eigenvector column instead of an error so
    trivial fixtures still produce a table.
    """
    from .graphs import eigendecompose, laplacian

    if basis is None:
        basis = eigendecompose(laplacian(g))
    if basis.n != g.n:
        raise ValueError("basis size does not match graph")
    if np.any(g.adjacency > 0):
        eig = eigenvector_centrality(g)
    else:
        eig = np.zeros(g.n)
    columns = np.column_stack(
        [
            degree_centrality(g),
            betweenness_centrality(g),
            eig,
            harmonic_centrality(g),
            localization_norms(basis, kernel),
        ]
    )
    return CentralityTable(columns)
