"""Weighted undirected graphs and Laplacian spectral machinery.

The graph is stored as a dense N x N adjacency matrix A (symmetric,
nonnegative, zero diagonal).  From it derive the combinatorial Laplacian
L = D - A with D(i,i) = sum_j A(i,j), its eigendecomposition
L = U diag(lambda) U^T (the graph Fourier basis), spectral filtering
y = U g(Lambda) U^T x, and the smoothness quadratic form tr(X^T L X).

Determinism contract for the eigendecomposition: eigenvalues ascend, each
eigenvector's first nonzero entry is positive, and eigenvectors inside a
degenerate eigenvalue cluster are ordered lexicographically.  Dense linear
algebra throughout; target sizes are a few hundred nodes at most.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

SYM_TOL = 1e-8      # relative asymmetry allowed in eigendecompose input
_SIGN_TOL = 1e-12   # entries below this count as zero for the sign rule
_DEGEN_TOL = 1e-9   # eigenvalue gap that keeps two columns in one cluster
_DUP_TOL = 1e-12    # disagreement allowed between duplicate edge records


@dataclass
class Graph:
    """Undirected weighted graph with a dense adjacency matrix.

    The constructor enforces exact symmetry, nonnegative weights, and a
    zero diagonal.
    """

    adjacency: np.ndarray
    node_labels: list[str] | None = None

    def __post_init__(self):
        a = np.array(self.adjacency, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        if not np.isfinite(a).all():
            raise ValueError("adjacency must be finite")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be exactly symmetric")
        if np.any(a < 0):
            raise ValueError("edge weights must be nonnegative")
        if np.any(np.diag(a) != 0):
            raise ValueError("self loops are not allowed")
        if self.node_labels is not None and len(self.node_labels) != a.shape[0]:
            raise ValueError("node_labels length must match node count")
        self.adjacency = a

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]


@dataclass
class SpectralBasis:
    """Laplacian eigenpairs: ascending eigenvalues, orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass
class TimeVertexSignal:
    """Sensor readings over time; row i holds sensor i's length-T series."""

    values: np.ndarray
    sampling_rate: float | None = None
    node_labels: list[str] | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ValueError("values must be an N x T matrix")
        if v.shape[1] < 1:
            raise ValueError("need at least one timestep")
        if self.sampling_rate is not None and not self.sampling_rate > 0:
            raise ValueError("sampling_rate must be positive")
        if self.node_labels is not None and len(self.node_labels) != v.shape[0]:
            raise ValueError("node_labels length must match sensor count")
        self.values = v

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def t(self) -> int:
        return self.values.shape[1]


def signal_values(signal) -> np.ndarray:
    """Accept a TimeVertexSignal or a bare N x T array."""
    if isinstance(signal, TimeVertexSignal):
        return signal.values
    v = np.asarray(signal, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    return v


def laplacian(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian L = D - A."""
    a = g.adjacency
    return np.diag(a.sum(axis=1)) - a


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nz = np.flatnonzero(np.abs(col) > _SIGN_TOL)
        if nz.size and col[nz[0]] < 0:
            out[:, j] = -col
    return out


def _order_degenerate(values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Lexicographically order eigenvector columns within equal-eigenvalue runs."""
    out = vectors.copy()
    n = values.shape[0]
    gap = _DEGEN_TOL * max(1.0, float(np.abs(values).max(initial=0.0)))
    start = 0
    for end in range(1, n + 1):
        if end == n or values[end] - values[end - 1] > gap:
            if end - start > 1:
                cols = sorted(range(start, end), key=lambda j: tuple(out[:, j]))
                out[:, start:end] = out[:, cols]
            start = end
    return out


def eigendecompose(L: np.ndarray) -> SpectralBasis:
    """Symmetric eigendecomposition with a deterministic basis convention.

    Raises ValueError when the input's relative asymmetry exceeds SYM_TOL.
    Roundoff-negative eigenvalues above -SYM_TOL are clamped to zero.
    """
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(float(np.abs(L).max(initial=0.0)), 1e-30)
    if np.abs(L - L.T).max() > SYM_TOL * scale:
        raise ValueError("matrix is not symmetric: malformed Laplacian")
    values, vectors = np.linalg.eigh((L + L.T) / 2.0)
    values = values.copy()
    values[(values < 0) & (values > -SYM_TOL * scale)] = 0.0
    vectors = _fix_signs(vectors)
    vectors = _order_degenerate(values, vectors)
    return SpectralBasis(values, vectors)


def gft(basis: SpectralBasis, x: np.ndarray) -> np.ndarray:
    """Forward transform x_hat = U^T x."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] != basis.n:
        raise ValueError("signal length does not match basis size")
    return basis.eigenvectors.T @ x


def igft(basis: SpectralBasis, x_hat: np.ndarray) -> np.ndarray:
    """Inverse transform x = U x_hat."""
    x_hat = np.asarray(x_hat, dtype=float)
    if x_hat.shape[0] != basis.n:
        raise ValueError("spectrum length does not match basis size")
    return basis.eigenvectors @ x_hat


def filter_signal(
    basis: SpectralBasis, kernel: Callable[[float], float], x: np.ndarray
) -> np.ndarray:
    """Spectral filtering y = U g(Lambda) U^T x for a scalar kernel g."""
    response = np.array([kernel(lam) for lam in basis.eigenvalues], dtype=float)
    if not np.isfinite(response).all():
        raise ValueError("kernel returned a non-finite value")
    return basis.eigenvectors @ (response * gft(basis, x))


def smoothness(g: Graph, signal) -> float:
    """Laplacian quadratic form tr(X^T L X), summed over snapshots."""
    x = signal_values(signal)
    if x.shape[0] != g.n:
        raise ValueError("signal has wrong number of sensors for this graph")
    value = float(np.sum(x * (laplacian(g) @ x)))
    return max(value, 0.0)


def connected_components(g: Graph) -> list[list[int]]:
    """Connected components (edges are entries with positive weight)."""
    a = g.adjacency
    seen = np.zeros(g.n, dtype=bool)
    components = []
    for root in range(g.n):
        if seen[root]:
            continue
        stack, members = [root], []
        seen[root] = True
        while stack:
            u = stack.pop()
            members.append(u)
            for v in np.flatnonzero(a[u] > 0):
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        components.append(sorted(members))
    return components


# ---------------------------------------------------------------------------
# serialization: CSV edge list `i,j,weight` and JSON {"n": N, "edges": [...]}

def _edges_to_adjacency(n: int, edges: Sequence[tuple[int, int, float]], where: str):
    a = np.zeros((n, n))
    seen: dict[tuple[int, int], float] = {}
    for i, j, w in edges:
        if i == j:
            raise ValueError(f"{where}: self loop on node {i}")
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"{where}: edge ({i},{j}) out of range for n={n}")
        key = (min(i, j), max(i, j))
        if key in seen and abs(seen[key] - w) > _DUP_TOL:
            raise ValueError(
                f"{where}: duplicate edge {key} disagrees: {seen[key]!r} vs {w!r}"
            )
        seen[key] = w
        a[key[0], key[1]] = w
        a[key[1], key[0]] = w
    return a


def save_graph_csv(g: Graph, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "weight"])
        a = g.adjacency
        for i in range(g.n):
            for j in range(i + 1, g.n):
                if a[i, j] != 0:
                    writer.writerow([i, j, f"{a[i, j]:.17g}"])


def load_graph_csv(path, n: int | None = None) -> Graph:
    """Read an `i,j,weight` edge list; node count defaults to max index + 1."""
    edges = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty graph file")
        if [c.strip().lower() for c in header[:3]] != ["i", "j", "weight"]:
            raise ValueError(f"{path}: expected header i,j,weight")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise ValueError(f"{path}: line {lineno}: expected 3 fields")
            try:
                i, j, w = int(row[0]), int(row[1]), float(row[2])
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from None
            edges.append((i, j, w))
    if n is None:
        n = 1 + max((max(i, j) for i, j, _ in edges), default=-1)
    return Graph(_edges_to_adjacency(n, edges, str(path)))


def save_graph_json(g: Graph, path) -> None:
    a = g.adjacency
    edges = [
        [i, j, a[i, j]]
        for i in range(g.n)
        for j in range(i + 1, g.n)
        if a[i, j] != 0
    ]
    with open(path, "w") as fh:
        json.dump({"n": g.n, "edges": edges}, fh, sort_keys=True)
        fh.write("\n")


def load_graph_json(path) -> Graph:
    with open(path) as fh:
        payload = json.load(fh)
    try:
        n = int(payload["n"])
        edges = [(int(i), int(j), float(w)) for i, j, w in payload["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: malformed graph JSON: {exc}") from None
    return Graph(_edges_to_adjacency(n, edges, str(path)))
