"""Comparison selectors: random, entropy, mutual information, QR pivoting,
and localization-operator sampling.

All five return the same SelectionResult shape as the main pipeline so the
evaluation harness treats every method identically.  The Gaussian
selectors run on a shrinkage-regularized sensor covariance; the greedy
loops are sequential and break ties to the lowest index, so every selector
is deterministic given its inputs (and seed, for the random one).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .centrality import LocalizationKernel, localization_matrix
from .graphs import SpectralBasis, signal_values
from .rng import SplitMix64
from .selection import SelectionResult


@dataclass
class CovarianceModel:
    """Sensor covariance with trace-scaled diagonal shrinkage."""

    sigma: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.sigma, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ValueError("covariance must be square")
        if np.abs(s - s.T).max(initial=0.0) > 1e-10 * (1.0 + np.abs(s).max()):
            raise ValueError("covariance must be symmetric")
        self.sigma = (s + s.T) / 2.0

    @property
    def n(self) -> int:
        return self.sigma.shape[0]

    @classmethod
    def from_signal(cls, signal, shrinkage: float = 1e-6) -> "CovarianceModel":
        x = signal_values(signal)
        centered = x - x.mean(axis=1, keepdims=True)
        emp = centered @ centered.T / x.shape[1]
        n = emp.shape[0]
        return cls(emp + shrinkage * (np.trace(emp) / n) * np.eye(n))


def _result(method: str, selected, n: int, extra: dict | None = None) -> SelectionResult:
    config = {"method": method, "n": n, "m": len(selected)}
    config.update(extra or {})
    return SelectionResult(selected=[int(i) for i in selected], method=method, config=config)


def random_select(n: int, m: int, seed: int = 0) -> SelectionResult:
    """Uniform sample without replacement (Fisher-Yates prefix)."""
    if m > n:
        raise ValueError("cannot select more sensors than exist")
    rng = SplitMix64(seed)
    return _result("random", rng.sample_without_replacement(n, m), n, {"seed": seed})


def _conditional_variance(sigma: np.ndarray, i: int, chosen: list[int]) -> float:
    if not chosen:
        return float(sigma[i, i])
    sub = sigma[np.ix_(chosen, chosen)]
    cross = sigma[chosen, i]
    try:
        solved = np.linalg.solve(sub, cross)
    except np.linalg.LinAlgError:
        raise np.linalg.LinAlgError(
            "covariance submatrix is singular beyond shrinkage"
        ) from None
    return float(sigma[i, i] - cross @ solved)


def entropy_select(cov: CovarianceModel, m: int) -> SelectionResult:
    """Greedy maximum-entropy sampling: maximize conditional variance."""
    if m > cov.n:
        raise ValueError("cannot select more sensors than exist")
    sigma = cov.sigma
    chosen: list[int] = []
    for _ in range(m):
        best, best_gain = None, -np.inf
        for i in range(cov.n):
            if i in chosen:
                continue
            gain = _conditional_variance(sigma, i, chosen)
            if gain > best_gain:
                best, best_gain = i, gain
        chosen.append(best)
    return _result("entropy", chosen, cov.n)


def mi_select(cov: CovarianceModel, m: int) -> SelectionResult:
    """Greedy mutual-information selection.

    Adds the sensor maximizing the variance ratio
    var(i | S) / var(i | complement of S minus i); requires m <= N - 1 so
    the denominator's conditioning set is never empty.
    """
    if m > cov.n - 1:
        raise ValueError("mutual information selection needs m <= N - 1")
    sigma = cov.sigma
    chosen: list[int] = []
    for _ in range(m):
        rest = [i for i in range(cov.n) if i not in chosen]
        best, best_ratio = None, -np.inf
        for i in rest:
            numer = _conditional_variance(sigma, i, chosen)
            denom = _conditional_variance(sigma, i, [j for j in rest if j != i])
            ratio = numer / denom if denom > 0 else np.inf
            if ratio > best_ratio:
                best, best_ratio = i, ratio
        chosen.append(best)
    return _result("mi", chosen, cov.n)


def _greedy_pivot(vectors: np.ndarray, m: int, method: str) -> list[int]:
    """Max-residual-norm pivoting with orthogonal deflation on the rows."""
    work = vectors.astype(float).copy()
    n = work.shape[0]
    norms = np.linalg.norm(work, axis=1)
    tol = 1e-12 * max(float(norms.max(initial=0.0)), 1.0)
    chosen: list[int] = []
    for _ in range(m):
        norms = np.linalg.norm(work, axis=1)
        norms[chosen] = -1.0
        # norms within 1e-9 relative of the max count as tied: lowest index
        pivot = int(np.flatnonzero(norms >= norms.max() * (1.0 - 1e-9))[0])
        if norms[pivot] <= tol:
            remaining = [i for i in range(n) if i not in chosen]
            warnings.warn(
                f"{method}: rank deficiency, filling remaining pivots by index"
            )
            chosen.extend(remaining[: m - len(chosen)])
            break
        chosen.append(pivot)
        q = work[pivot] / norms[pivot]
        work -= np.outer(work @ q, q)
    return chosen


def qr_pivot_select(signal, m: int) -> SelectionResult:
    """Column-pivoted QR on the (time x sensor) data matrix."""
    x = signal_values(signal)
    n = x.shape[0]
    if m > n:
        raise ValueError("cannot select more sensors than exist")
    return _result("qr", _greedy_pivot(x, m, "qr"), n)


def localization_select(
    basis: SpectralBasis, kernel: LocalizationKernel | None = None, m: int = 1
) -> SelectionResult:
    """Greedy row pivoting on the localization operator sqrt(N) U g(L) U^T."""
    if m > basis.n:
        raise ValueError("cannot select more sensors than exist")
    t = localization_matrix(basis, kernel)
    return _result("loc", _greedy_pivot(t, m, "loc"), basis.n)
