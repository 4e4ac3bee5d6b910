"""Deterministic downstream evaluation of a sensor selection.

Two closed-form tasks stand in for a trainable reconstructor so that
selector comparisons measure placement quality, not learner variance:

* signal reconstruction: observe the selected rows, solve the graph-
  regularized least squares  (I_S^T I_S + gamma L) x = I_S^T y  per
  snapshot, and score RMSE/MAE as sensor-averaged per-sensor errors;
* damage detection: fit a ridge one-step predictor x_{t+1} = W x_t on
  healthy data restricted to the selection, score non-overlapping windows
  by one-step-residual RMSE, and flag windows whose score exceeds
  delta = mean + sigmas * std of healthy validation scores.

Everything here is a pure function of its inputs; the sweep harness is
reproducible bit-for-bit given (data, seed, configs).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph, connected_components, laplacian, signal_values


@dataclass
class ReconstructionConfig:
    gamma: float = 0.5

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")


@dataclass
class DetectorConfig:
    window: int = 128  # 16 suits reconstruction-rate signals, 128 detection
    ridge: float = 1e-3
    threshold_sigmas: float = 2.0

    def __post_init__(self):
        if self.window < 2:
            raise ValueError("window must be at least 2")
        if self.ridge < 0:
            raise ValueError("ridge must be nonnegative")


@dataclass
class MetricsReport:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0
    accuracy: float = 0.0
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    auc: float | None = None
    rmse: float | None = None
    mae: float | None = None
    flags: tuple[str, ...] = ()


@dataclass
class RocCurve:
    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float


class UnobservableComponentError(ValueError):
    """A connected component contains no observed vertex."""

    def __init__(self, component: list[int]):
        super().__init__(
            f"connected component {component} has no observed vertex; "
            "reconstruction is singular there"
        )
        self.component = component


def _check_sample_set(n: int, s) -> np.ndarray:
    idx = np.asarray(sorted(set(int(i) for i in s)), dtype=int)
    if idx.size == 0:
        raise ValueError("sample set must be nonempty")
    if idx[0] < 0 or idx[-1] >= n:
        raise ValueError("sample index out of range")
    return idx


def sample_vertices(x: np.ndarray, s) -> np.ndarray:
    """Rows of x at the sampled indices, ascending."""
    x = np.asarray(x, dtype=float)
    return x[_check_sample_set(x.shape[0], s)]


def reconstruct(
    g: Graph, s, y: np.ndarray, cfg: ReconstructionConfig | None = None
) -> np.ndarray:
    """Graph-regularized recovery of a full signal from sampled values.

    Solves (I_S^T I_S + gamma L) x = I_S^T y; y may be a vector (one
    snapshot) or a |S| x T matrix.  Every connected component must contain
    at least one observed vertex, otherwise the system is singular.
    """
    cfg = cfg or ReconstructionConfig()
    idx = _check_sample_set(g.n, s)
    observed = set(idx.tolist())
    for component in connected_components(g):
        if not observed & set(component):
            raise UnobservableComponentError(component)
    y = np.asarray(y, dtype=float)
    squeeze = y.ndim == 1
    if squeeze:
        y = y[:, None]
    if y.shape[0] != idx.size:
        raise ValueError("observed values do not match sample set size")
    system = cfg.gamma * laplacian(g)
    system[idx, idx] += 1.0
    rhs = np.zeros((g.n, y.shape[1]))
    rhs[idx] = y
    x = np.linalg.solve(system, rhs)
    return x[:, 0] if squeeze else x


def reconstruction_metrics(truth, estimate) -> tuple[float, float]:
    """Sensor-averaged per-sensor RMSE and MAE."""
    t = signal_values(truth)
    e = signal_values(estimate)
    if t.shape != e.shape:
        raise ValueError("truth and estimate shapes differ")
    err = e - t
    rmse = float(np.mean(np.sqrt(np.mean(err**2, axis=1))))
    mae = float(np.mean(np.mean(np.abs(err), axis=1)))
    return rmse, mae


# ---------------------------------------------------------------------------
# damage detection

@dataclass
class Detector:
    predictor: np.ndarray  # W, one-step map on the selected channels
    delta: float
    mu: float
    sigma: float
    window: int


def detection_threshold(scores, sigmas: float = 2.0) -> tuple[float, float, float]:
    """mu, sigma (population), and delta = mu + sigmas * sigma."""
    scores = np.asarray(scores, dtype=float)
    mu = float(scores.mean())
    sigma = float(scores.std())
    return mu, sigma, mu + sigmas * sigma


def _window_scores(w: np.ndarray, x: np.ndarray, window: int) -> np.ndarray:
    """One-step-residual RMSE per non-overlapping window (partials dropped)."""
    scores = []
    for start in range(0, x.shape[1] - window + 1, window):
        block = x[:, start : start + window]
        resid = block[:, 1:] - w @ block[:, :-1]
        scores.append(float(np.sqrt(np.mean(resid**2))))
    return np.asarray(scores)


def fit_detector(healthy, cfg: DetectorConfig | None = None) -> Detector:
    """Fit the predictor and threshold on healthy data (selected channels).

    The input splits chronologically in half: the first half fits the
    ridge predictor, the second half provides validation window scores for
    the mean + sigmas * std threshold.  Needs at least 10 validation
    windows.
    """
    cfg = cfg or DetectorConfig()
    x = signal_values(healthy)
    half = x.shape[1] // 2
    train, val = x[:, :half], x[:, half:]
    if train.shape[1] < 2 or (val.shape[1] // cfg.window) < 10:
        raise ValueError(
            "insufficient healthy data: need >= 10 validation windows of "
            f"length {cfg.window}"
        )
    x0, x1 = train[:, :-1], train[:, 1:]
    gram = x0 @ x0.T + cfg.ridge * np.eye(x.shape[0])
    w = np.linalg.solve(gram, (x1 @ x0.T).T).T
    scores = _window_scores(w, val, cfg.window)
    mu, sigma, delta = detection_threshold(scores, cfg.threshold_sigmas)
    return Detector(w, delta, mu, sigma, cfg.window)


def detect(detector: Detector, x) -> tuple[np.ndarray, np.ndarray]:
    """Per-window anomaly labels and scores; a window is anomalous when its
    score strictly exceeds delta."""
    scores = _window_scores(
        detector.predictor, signal_values(x), detector.window
    )
    return scores > detector.delta, scores


# ---------------------------------------------------------------------------
# metrics

def classification_metrics(labels, truth) -> MetricsReport:
    """Confusion counts and the derived ratios."""
    labels = np.asarray(labels).astype(bool)
    truth = np.asarray(truth).astype(bool)
    if labels.shape != truth.shape or labels.size == 0:
        raise ValueError("labels and truth must be equal-length and nonempty")
    tp = int(np.sum(labels & truth))
    tn = int(np.sum(~labels & ~truth))
    fp = int(np.sum(labels & ~truth))
    fn = int(np.sum(~labels & truth))
    flags = []
    accuracy = (tp + tn) / labels.size
    if tp + fp > 0:
        precision = tp / (tp + fp)
    else:
        precision = 0.0
        flags.append("precision_undefined")
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return MetricsReport(
        tp=tp, tn=tn, fp=fp, fn=fn,
        accuracy=accuracy, precision=precision, recall=recall, f1=f1,
        flags=tuple(flags),
    )


def roc_auc(scores, truth) -> RocCurve:
    """ROC points at every distinct score threshold plus trapezoidal AUC.

    Tied scores share one threshold step, which is exactly the half-credit
    convention of the Mann-Whitney statistic.
    """
    scores = np.asarray(scores, dtype=float)
    truth = np.asarray(truth).astype(bool)
    if scores.shape != truth.shape or scores.size == 0:
        raise ValueError("scores and truth must be equal-length and nonempty")
    pos = int(truth.sum())
    neg = int(scores.size - pos)
    if pos == 0 or neg == 0:
        raise ValueError("ROC needs both classes present")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_truth = truth[order]
    thresholds, fpr, tpr = [], [0.0], [0.0]
    tp = fp = 0
    i = 0
    while i < scores.size:
        j = i
        while j < scores.size and sorted_scores[j] == sorted_scores[i]:
            tp += bool(sorted_truth[j])
            fp += not sorted_truth[j]
            j += 1
        thresholds.append(float(sorted_scores[i]))
        tpr.append(tp / pos)
        fpr.append(fp / neg)
        i = j
    auc = float(np.trapz(tpr, fpr))
    return RocCurve(np.asarray(thresholds), np.asarray(fpr), np.asarray(tpr), auc)


def jaccard(a, b) -> float:
    """|A n B| / |A u B|; two empty sets count as identical."""
    sa, sb = set(a), set(b)
    if not sa and not sb:
        warnings.warn("Jaccard of two empty sets defined as 1")
        return 1.0
    return len(sa & sb) / len(sa | sb)


# ---------------------------------------------------------------------------
# benchmark harness

@dataclass
class EvalProtocol:
    """Chronological split fractions and task configs for the harness.

    Healthy data before `test_fraction` from the end is the training block:
    it supplies normalization statistics, the selector input, and the
    detector fit.  The trailing fractions of the healthy and damaged
    corpora form the test windows.
    """

    test_fraction: float = 0.25
    recon: ReconstructionConfig = field(default_factory=ReconstructionConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)


def normalization_stats(train: np.ndarray, eps: float = 1e-12):
    mu = train.mean(axis=1, keepdims=True)
    sigma = train.std(axis=1, keepdims=True)
    sigma = np.maximum(sigma, eps)
    return mu, sigma


def training_block(healthy, protocol: EvalProtocol | None = None) -> np.ndarray:
    """Normalized pre-test healthy block; what selectors are allowed to see."""
    protocol = protocol or EvalProtocol()
    xh = signal_values(healthy)
    split = int(round(xh.shape[1] * (1.0 - protocol.test_fraction)))
    mu, sigma = normalization_stats(xh[:, :split])
    return (xh[:, :split] - mu) / sigma


def evaluate_selection_with_curve(
    healthy, damaged, g: Graph, selected, protocol: EvalProtocol | None = None
) -> tuple[MetricsReport, RocCurve]:
    """Reconstruction and detection quality of one selected sensor set."""
    protocol = protocol or EvalProtocol()
    xh = signal_values(healthy)
    xd = signal_values(damaged)
    idx = _check_sample_set(g.n, selected)
    t_h = xh.shape[1]
    split_h = int(round(t_h * (1.0 - protocol.test_fraction)))
    split_d = int(round(xd.shape[1] * (1.0 - protocol.test_fraction)))
    mu, sigma = normalization_stats(xh[:, :split_h])
    xh = (xh - mu) / sigma
    xd = (xd - mu) / sigma
    train_h, test_h = xh[:, :split_h], xh[:, split_h:]
    test_d = xd[:, split_d:]

    estimate = reconstruct(g, idx, test_h[idx], protocol.recon)
    rmse, mae = reconstruction_metrics(test_h, estimate)

    detector = fit_detector(train_h[idx], protocol.detector)
    labels_h, scores_h = detect(detector, test_h[idx])
    labels_d, scores_d = detect(detector, test_d[idx])
    labels = np.concatenate([labels_h, labels_d])
    truth = np.concatenate(
        [np.zeros(labels_h.size, bool), np.ones(labels_d.size, bool)]
    )
    report = classification_metrics(labels, truth)
    report.rmse, report.mae = rmse, mae
    curve = roc_auc(np.concatenate([scores_h, scores_d]), truth)
    report.auc = curve.auc
    return report, curve


def evaluate_selection(
    healthy, damaged, g: Graph, selected, protocol: EvalProtocol | None = None
) -> MetricsReport:
    report, _ = evaluate_selection_with_curve(healthy, damaged, g, selected, protocol)
    return report


@dataclass
class SweepResult:
    rows: list[dict]
    min_m: dict[str, int | None]


def sweep_m(
    healthy,
    damaged,
    g: Graph,
    m_values,
    selectors,
    seed: int = 0,
    protocol: EvalProtocol | None = None,
    accuracy_threshold: float | None = None,
) -> SweepResult:
    """Run every (selector, M) cell and tabulate the long-format results.

    `selectors` maps method name to a callable m -> SelectionResult (or to
    a list of selected indices).  When `accuracy_threshold` is given, the
    smallest M whose accuracy exceeds it is reported per method (None when
    no M qualifies).
    """
    protocol = protocol or EvalProtocol()
    rows = []
    min_m: dict[str, int | None] = {}
    for name, pick in selectors.items():
        min_m[name] = None
        for m in m_values:
            result = pick(m)
            selected = getattr(result, "selected", result)
            report = evaluate_selection(healthy, damaged, g, selected, protocol)
            rows.append(
                {
                    "method": name,
                    "M": int(m),
                    "seed": int(seed),
                    "rmse": report.rmse,
                    "mae": report.mae,
                    "accuracy": report.accuracy,
                    "precision": report.precision,
                    "recall": report.recall,
                    "f1": report.f1,
                    "auc": report.auc,
                }
            )
            if (
                accuracy_threshold is not None
                and min_m[name] is None
                and report.accuracy > accuracy_threshold
            ):
                min_m[name] = int(m)
    return SweepResult(rows, min_m)
