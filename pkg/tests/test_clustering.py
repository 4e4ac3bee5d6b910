import numpy as np
import pytest

from sensorplace.clustering import KMeansConfig, _lloyd, _kmeanspp_init, kmeans
from sensorplace.rng import SplitMix64

from oracles import best_partition_inertia


class TestKMeansExamples:
    def test_two_well_separated_groups(self):
        points = np.array([[0.0], [0.1], [10.0], [10.1]])
        out = kmeans(points, KMeansConfig(k=2, seed=0))
        assert out.labels.tolist() == [0, 0, 1, 1]
        assert np.allclose(sorted(out.centroids[:, 0]), [0.05, 10.05])
        assert abs(out.inertia - 0.01) < 1e-12

    def test_k_equals_n(self):
        rng = np.random.default_rng(0)
        points = rng.standard_normal((6, 2))
        out = kmeans(points, KMeansConfig(k=6, seed=1))
        assert sorted(out.labels.tolist()) == list(range(6))
        assert out.inertia == 0.0

    def test_k_one(self):
        rng = np.random.default_rng(1)
        points = rng.standard_normal((9, 3))
        out = kmeans(points, KMeansConfig(k=1, seed=0))
        assert np.all(out.labels == 0)
        assert np.allclose(out.centroids[0], points.mean(axis=0))
        assert abs(out.inertia - ((points - points.mean(axis=0)) ** 2).sum()) < 1e-9

    def test_duplicate_points_with_k_equals_n(self):
        points = np.array([[1.0, 1.0], [1.0, 1.0], [2.0, 2.0]])
        out = kmeans(points, KMeansConfig(k=3, seed=0))
        assert sorted(out.labels.tolist()) == [0, 1, 2]
        assert out.labels[0] == 0  # canonical first-appearance order
        assert out.inertia == 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            kmeans(np.zeros((2, 1)), KMeansConfig(k=3))
        with pytest.raises(ValueError):
            kmeans(np.array([[np.nan]]), KMeansConfig(k=1))


class TestDeterminismAndInvariants:
    def test_bitwise_determinism(self):
        rng = np.random.default_rng(2)
        points = rng.standard_normal((20, 4))
        cfg = KMeansConfig(k=4, seed=123)
        a = kmeans(points, cfg)
        b = kmeans(points, cfg)
        assert np.array_equal(a.labels, b.labels)
        assert np.array_equal(a.centroids, b.centroids)
        assert a.inertia == b.inertia

    def test_labels_canonicalized_by_first_appearance(self):
        rng = np.random.default_rng(3)
        points = rng.standard_normal((12, 2))
        out = kmeans(points, KMeansConfig(k=3, seed=7))
        seen = []
        for lab in out.labels:
            if lab not in seen:
                seen.append(int(lab))
        assert seen == sorted(seen)

    def test_inertia_matches_recomputation(self):
        rng = np.random.default_rng(4)
        points = rng.standard_normal((15, 3))
        out = kmeans(points, KMeansConfig(k=4, seed=5))
        recomputed = sum(
            ((points[out.labels == c] - out.centroids[c]) ** 2).sum()
            for c in range(4)
        )
        assert abs(out.inertia - recomputed) < 1e-9

    def test_every_cluster_nonempty(self):
        rng = np.random.default_rng(5)
        for trial in range(20):
            n = int(rng.integers(4, 15))
            k = int(rng.integers(2, n + 1))
            points = rng.standard_normal((n, 2))
            out = kmeans(points, KMeansConfig(k=k, seed=trial))
            assert len(set(out.labels.tolist())) == k

    def test_monotone_inertia_within_runs(self):
        rng = np.random.default_rng(6)
        for trial in range(20):
            points = rng.standard_normal((int(rng.integers(6, 20)), 3))
            k = int(rng.integers(2, 5))
            init = _kmeanspp_init(points, k, SplitMix64(trial))
            _, _, _, history = _lloyd(points, init, 300, 1e-9)
            assert all(b <= a + 1e-9 for a, b in zip(history, history[1:]))


class TestAgainstExhaustiveOracle:
    def test_small_instances_reach_global_optimum(self):
        rng = np.random.default_rng(7)
        matches = 0
        trials = 30
        for trial in range(trials):
            n = int(rng.integers(4, 9))
            k = int(rng.integers(1, 4))
            points = rng.standard_normal((n, 2))
            out = kmeans(points, KMeansConfig(k=k, seed=trial))
            best = best_partition_inertia(points, k)
            assert out.inertia >= best - 1e-9
            matches += out.inertia <= best + 1e-9
        assert matches >= int(0.95 * trials)
