import numpy as np
import pytest

from sensorplace.evaluation import (
    DetectorConfig,
    EvalProtocol,
    ReconstructionConfig,
    UnobservableComponentError,
    classification_metrics,
    detect,
    detection_threshold,
    evaluate_selection,
    fit_detector,
    jaccard,
    reconstruct,
    reconstruction_metrics,
    roc_auc,
    sample_vertices,
    sweep_m,
)
from sensorplace.graphs import Graph
from sensorplace.synth import chain_graph, default_benchmark

from oracles import mann_whitney_auc


def two_node():
    return Graph(np.array([[0.0, 1.0], [1.0, 0.0]]))


class TestSampleVertices:
    def test_basic(self):
        x = np.array([5.0, 6.0, 7.0])
        assert sample_vertices(x, [0, 2]).tolist() == [5.0, 7.0]
        assert sample_vertices(x, [2, 0]).tolist() == [5.0, 7.0]  # ascending
        assert sample_vertices(x, [0, 1, 2]).tolist() == x.tolist()
        assert sample_vertices(x, [1]).tolist() == [6.0]

    def test_validation(self):
        with pytest.raises(ValueError):
            sample_vertices(np.ones(3), [])
        with pytest.raises(ValueError):
            sample_vertices(np.ones(3), [3])


class TestReconstruct:
    def test_full_observation_small_gamma(self):
        g = chain_graph(5)
        y = np.arange(5.0)
        x = reconstruct(g, range(5), y, ReconstructionConfig(gamma=1e-9))
        assert np.abs(x - y).max() < 1e-6

    def test_two_node_hand_solve(self):
        x = reconstruct(two_node(), [0], np.array([1.0]), ReconstructionConfig(gamma=1.0))
        assert np.abs(x - 1.0).max() < 1e-10

    def test_constant_signal_exact(self):
        g = chain_graph(6)
        for s in ([0], [2, 4], [5]):
            x = reconstruct(g, s, np.full(len(s), 3.25), ReconstructionConfig(gamma=0.7))
            assert np.abs(x - 3.25).max() < 1e-8

    def test_unobserved_component_rejected(self):
        a = np.zeros((4, 4))
        a[0, 1] = a[1, 0] = 1.0
        a[2, 3] = a[3, 2] = 1.0
        g = Graph(a)
        with pytest.raises(UnobservableComponentError) as info:
            reconstruct(g, [0], np.array([1.0]))
        assert info.value.component == [2, 3]

    def test_error_non_increasing_as_gamma_shrinks(self):
        rng = np.random.default_rng(5)
        g = chain_graph(6)
        truth = rng.standard_normal(6)
        errors = []
        for gamma in (1.0, 0.1, 0.01, 1e-4, 1e-6):
            est = reconstruct(g, range(6), truth, ReconstructionConfig(gamma=gamma))
            errors.append(np.linalg.norm(est - truth))
        assert all(b <= a + 1e-12 for a, b in zip(errors, errors[1:]))

    def test_matrix_right_hand_side(self):
        g = chain_graph(4)
        y = np.arange(8.0).reshape(2, 4)
        x = reconstruct(g, [0, 3], y, ReconstructionConfig(gamma=0.5))
        assert x.shape == (4, 4)


class TestReconstructionMetrics:
    def test_exact(self):
        x = np.ones((3, 5))
        assert reconstruction_metrics(x, x) == (0.0, 0.0)

    def test_hand_values(self):
        rmse, mae = reconstruction_metrics(np.array([[0.0, 0.0]]), np.array([[3.0, 4.0]]))
        assert abs(rmse - np.sqrt(12.5)) < 1e-12
        assert mae == 3.5

    def test_constant_offset(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((4, 6))
        rmse, mae = reconstruction_metrics(x, x + 2.0)
        assert abs(rmse - 2.0) < 1e-12
        assert abs(mae - 2.0) < 1e-12

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            reconstruction_metrics(np.ones((2, 2)), np.ones((2, 3)))


class TestDetector:
    def linear_series(self, w, t, x0, noise=0.0, rng=None):
        n = w.shape[0]
        out = np.empty((n, t))
        out[:, 0] = x0
        for k in range(1, t):
            out[:, k] = w @ out[:, k - 1]
            if noise:
                out[:, k] += noise * rng.standard_normal(n)
        return out

    def test_threshold_arithmetic(self):
        mu, sigma, delta = detection_threshold([1.0, 1.0, 1.0, 3.0], 2.0)
        assert mu == 1.5
        assert abs(sigma - np.sqrt(0.75)) < 1e-12
        assert abs(delta - (1.5 + 2 * np.sqrt(0.75))) < 1e-12

    def test_exact_linear_dynamics(self):
        w = np.array([[0.9, 0.1], [-0.05, 0.95]])
        x = self.linear_series(w, 400, np.array([1.0, -0.5]))
        det = fit_detector(x, DetectorConfig(window=16, ridge=1e-10))
        assert det.delta < 1e-6
        labels, scores = detect(det, x[:, :200])
        assert scores.max() < 1e-6

    def test_scaling_homogeneity(self):
        rng = np.random.default_rng(1)
        w = np.array([[0.9, 0.05], [0.0, 0.92]])
        x = self.linear_series(w, 600, np.array([1.0, 1.0]), 0.05, rng)
        base = fit_detector(x, DetectorConfig(window=16, ridge=1e-3))
        scaled = fit_detector(2.0 * x, DetectorConfig(window=16, ridge=4e-3))
        assert abs(scaled.delta - 2.0 * base.delta) < 1e-12 * max(1, base.delta)

    def test_boundary_is_healthy(self):
        det_state = fit_detector(
            self.linear_series(np.eye(2) * 0.9, 400, np.ones(2)),
            DetectorConfig(window=16, ridge=1e-8),
        )
        det_state.delta = 0.5
        x = np.zeros((2, 64))
        labels, scores = detect(det_state, x)
        assert not labels.any()  # scores 0 < delta
        det_state.delta = 0.0
        labels, _ = detect(det_state, x)
        assert not labels.any()  # score == delta stays healthy (strict >)

    def test_injected_step_flags_damage(self):
        rng = np.random.default_rng(2)
        w = np.array([[0.9, 0.05], [0.02, 0.9]])
        x = self.linear_series(w, 800, np.ones(2), 0.01, rng)
        det = fit_detector(x, DetectorConfig(window=16))
        test = x[:, :160].copy()
        test[:, 88:] += 100.0 * det.sigma  # jump lands inside window 5
        labels, _ = detect(det, test)
        assert labels[5]  # the window containing the jump flags as damaged
        assert not labels[:5].any()

    def test_insufficient_data(self):
        with pytest.raises(ValueError, match="insufficient"):
            fit_detector(np.ones((2, 50)), DetectorConfig(window=16))


class TestClassificationMetrics:
    def test_paper_counts(self):
        truth = np.concatenate([np.ones(200, bool), np.zeros(152, bool)])
        labels = np.concatenate(
            [np.ones(187, bool), np.zeros(13, bool), np.ones(35, bool), np.zeros(117, bool)]
        )
        rep = classification_metrics(labels, truth)
        assert (rep.tp, rep.fn, rep.fp, rep.tn) == (187, 13, 35, 117)
        assert rep.recall == 0.935
        assert round(rep.precision, 3) == 0.842
        assert round(rep.accuracy, 3) == 0.864
        assert round(rep.f1, 3) == 0.886

    def test_perfect(self):
        truth = np.array([True, False, True])
        rep = classification_metrics(truth, truth)
        assert rep.accuracy == rep.precision == rep.recall == rep.f1 == 1.0

    def test_all_negative_flags_precision(self):
        truth = np.array([True, False])
        rep = classification_metrics(np.zeros(2, bool), truth)
        assert rep.recall == 0.0
        assert rep.precision == 0.0
        assert "precision_undefined" in rep.flags

    def test_identities(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            truth = rng.random(30) < 0.5
            labels = rng.random(30) < 0.5
            if truth.all() or not truth.any():
                continue
            rep = classification_metrics(labels, truth)
            total = rep.tp + rep.tn + rep.fp + rep.fn
            assert total == 30
            assert abs(rep.accuracy - (rep.tp + rep.tn) / total) < 1e-12
            if rep.precision + rep.recall > 0:
                expect = 2 * rep.precision * rep.recall / (rep.precision + rep.recall)
                assert abs(rep.f1 - expect) < 1e-12


class TestRocAuc:
    def test_perfect_separation(self):
        curve = roc_auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1])
        assert curve.auc == 1.0

    def test_all_tied(self):
        curve = roc_auc([0.5, 0.5, 0.5, 0.5], [0, 1, 0, 1])
        assert curve.auc == 0.5

    def test_pair_counting_example(self):
        scores = [0.1, 0.8, 0.5, 0.6]
        truth = [0, 1, 0, 1]
        curve = roc_auc(scores, truth)
        assert curve.auc == mann_whitney_auc(scores, truth) == 1.0

    def test_matches_mann_whitney(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            n = int(rng.integers(4, 100))
            scores = rng.choice([0.1, 0.25, 0.5, 0.8], size=n)
            truth = rng.random(n) < 0.5
            if truth.all() or not truth.any():
                continue
            curve = roc_auc(scores, truth)
            assert abs(curve.auc - mann_whitney_auc(scores, truth)) < 1e-12

    def test_single_class_rejected(self):
        with pytest.raises(ValueError):
            roc_auc([0.1, 0.2], [1, 1])


class TestJaccard:
    def test_identical(self):
        assert jaccard({1, 2, 3}, {1, 2, 3}) == 1.0

    def test_partial_overlap(self):
        assert jaccard({1, 2}, {2, 3}) == 1.0 / 3.0

    def test_disjoint(self):
        assert jaccard({1}, {2}) == 0.0

    def test_both_empty_flagged(self):
        with pytest.warns(UserWarning):
            assert jaccard(set(), set()) == 1.0


class TestHarness:
    def test_full_observation_cell(self):
        healthy, damaged, graph, protocol = default_benchmark(0)
        protocol.recon = ReconstructionConfig(gamma=1e-9)
        result = sweep_m(
            healthy, damaged, graph, [10],
            {"all": lambda m: list(range(10))},
            protocol=protocol,
        )
        assert len(result.rows) == 1
        assert result.rows[0]["rmse"] < 1e-6

    def test_deterministic_rows(self):
        healthy, damaged, graph, protocol = default_benchmark(1)
        selectors = {"fixed": lambda m: list(range(m))}
        a = sweep_m(healthy, damaged, graph, [2, 4], selectors, protocol=protocol)
        b = sweep_m(healthy, damaged, graph, [2, 4], selectors, protocol=protocol)
        assert a.rows == b.rows

    def test_min_m_reporting(self):
        healthy, damaged, graph, protocol = default_benchmark(2)
        result = sweep_m(
            healthy, damaged, graph, [1, 4, 8],
            {"fixed": lambda m: list(range(m))},
            protocol=protocol, accuracy_threshold=0.9,
        )
        qualifying = [r["M"] for r in result.rows if r["accuracy"] > 0.9]
        expected = min(qualifying) if qualifying else None
        assert result.min_m["fixed"] == expected

    def test_evaluate_selection_report_fields(self):
        healthy, damaged, graph, protocol = default_benchmark(3)
        rep = evaluate_selection(healthy, damaged, graph, [1, 4, 8], protocol)
        assert rep.rmse is not None and rep.rmse >= 0
        assert rep.mae is not None and 0 <= rep.mae <= rep.rmse + 1e-12
        assert rep.auc is not None and 0 <= rep.auc <= 1
