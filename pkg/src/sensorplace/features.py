"""Per-sensor statistical and spectral feature extraction.

Each sensor's length-T series maps to a fixed-order feature vector

    [mean, max, min, variance, skewness, kurtosis, rms,
     mb_1 .. mb_k, f_peak, max_f]

Moments use population (1/T) normalization and kurtosis is excess (the
Gaussian maps to 0).  Spectral features come from the length-T DFT
magnitudes |X(f)|: mb holds bins 1..k, and the peak is searched over bins
1..floor(T/2); the DC bin is excluded everywhere so every spectral feature
is invariant to constant offsets.  f_peak is reported in hertz when a
sampling rate is known, otherwise as a bin index.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .graphs import TimeVertexSignal, eigendecompose, signal_values

STAT_NAMES = ("mean", "max", "min", "variance", "skewness", "kurtosis", "rms")


@dataclass
class FeatureConfig:
    k_bins: int = 10
    zero_var_eps: float = 1e-12

    def __post_init__(self):
        if self.k_bins < 1:
            raise ValueError("k_bins must be positive")
        if not self.zero_var_eps > 0:
            raise ValueError("zero_var_eps must be positive")


@dataclass
class FeatureMatrix:
    """N x d feature table; row i describes sensor i."""

    values: np.ndarray
    column_names: list[str]
    node_labels: list[str] | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[1] != len(self.column_names):
            raise ValueError("values shape does not match column_names")
        if not np.isfinite(v).all():
            raise ValueError("feature matrix must be finite")
        self.values = v

    @property
    def n(self) -> int:
        return self.values.shape[0]


def stat_features(x, eps: float = 1e-12):
    """Seven population-moment statistics of one series.

    Returns (features, degenerate) where `degenerate` is True when the
    standard deviation falls below eps; skewness and kurtosis are then
    defined as 0 so constant channels survive the pipeline.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] < 2:
        raise ValueError("need a 1-D series with at least two samples")
    if not np.isfinite(x).all():
        raise ValueError("series contains non-finite values")
    mean = float(x.mean())
    centered = x - mean
    var = float(np.mean(centered**2))
    std = np.sqrt(var)
    degenerate = std < eps
    if degenerate:
        skew = kurt = 0.0
    else:
        skew = float(np.mean(centered**3)) / std**3
        kurt = float(np.mean(centered**4)) / std**4 - 3.0
    rms = float(np.sqrt(np.mean(x**2)))
    feats = np.array([mean, float(x.max()), float(x.min()), var, skew, kurt, rms])
    return feats, degenerate


def spectral_features(x, k: int, sampling_rate: float | None = None):
    """Low-band DFT magnitudes plus the dominant non-DC component.

    Returns (mb, f_peak, max_f): magnitudes at bins 1..k, the peak bin over
    1..floor(T/2) (in Hz when sampling_rate is given), and its magnitude.
    """
    x = np.asarray(x, dtype=float)
    t = x.shape[0]
    if not 1 <= k < t / 2:
        raise ValueError(f"k must satisfy 1 <= k < T/2 (k={k}, T={t})")
    magnitude = np.abs(np.fft.fft(x))
    mb = magnitude[1 : k + 1].copy()
    half = t // 2
    peak_bin = 1 + int(np.argmax(magnitude[1 : half + 1]))
    max_f = float(magnitude[peak_bin])
    if sampling_rate is not None:
        f_peak = peak_bin * sampling_rate / t
    else:
        f_peak = float(peak_bin)
    return mb, f_peak, max_f


def feature_column_names(k_bins: int) -> list[str]:
    return list(STAT_NAMES) + [f"mb_{b}" for b in range(1, k_bins + 1)] + [
        "f_peak",
        "max_f",
    ]


def build_feature_matrix(signal, cfg: FeatureConfig | None = None) -> FeatureMatrix:
    """Assemble the per-sensor feature rows in the fixed column order."""
    cfg = cfg or FeatureConfig()
    x = signal_values(signal)
    rate = signal.sampling_rate if isinstance(signal, TimeVertexSignal) else None
    labels = signal.node_labels if isinstance(signal, TimeVertexSignal) else None
    rows = []
    degenerate = []
    for i in range(x.shape[0]):
        stats, flat = stat_features(x[i], cfg.zero_var_eps)
        if flat:
            degenerate.append(i)
        mb, f_peak, max_f = spectral_features(x[i], cfg.k_bins, rate)
        rows.append(np.concatenate([stats, mb, [f_peak, max_f]]))
    if degenerate:
        warnings.warn(f"degenerate (near-constant) sensors: {degenerate}")
    return FeatureMatrix(np.array(rows), feature_column_names(cfg.k_bins), labels)


def zscore_normalize(f: FeatureMatrix) -> FeatureMatrix:
    """Standardize each column (population std); constant columns become 0."""
    if f.n < 2:
        raise ValueError("normalization needs at least two sensors")
    v = f.values
    mean = v.mean(axis=0)
    std = v.std(axis=0)
    constant = std <= 1e-12 * (1.0 + np.abs(mean))
    out = np.zeros_like(v)
    out[:, ~constant] = (v[:, ~constant] - mean[~constant]) / std[~constant]
    if constant.any():
        names = [f.column_names[j] for j in np.flatnonzero(constant)]
        warnings.warn(f"constant feature columns mapped to zeros: {names}")
    return FeatureMatrix(out, list(f.column_names), f.node_labels)


def pca_reduce(f: FeatureMatrix, n_components: int) -> FeatureMatrix:
    """Project centered features onto the top principal directions.

    Components are ordered by descending explained variance with the same
    deterministic sign convention as the Laplacian eigendecomposition.
    Callers wanting scale-free components should normalize first.
    """
    if not 1 <= n_components <= min(f.n, len(f.column_names)):
        raise ValueError("n_components out of range")
    centered = f.values - f.values.mean(axis=0)
    cov = centered.T @ centered / f.n
    basis = eigendecompose((cov + cov.T) / 2.0)
    top = basis.eigenvectors[:, ::-1][:, :n_components]
    names = [f"pc_{j + 1}" for j in range(n_components)]
    return FeatureMatrix(centered @ top, names, f.node_labels)
