import itertools

import numpy as np
import pytest

from sensorplace.baselines import (
    CovarianceModel,
    entropy_select,
    localization_select,
    mi_select,
    qr_pivot_select,
    random_select,
)
from sensorplace.centrality import LocalizationKernel, localization_matrix
from sensorplace.graphs import Graph, eigendecompose, laplacian
from sensorplace.synth import chain_graph

from oracles import best_entropy_subset, subset_log_det


def correlated_pair_cov():
    # sensors 0 and 1 perfectly correlated, sensor 2 independent
    sigma = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    return CovarianceModel(sigma + 1e-9 * np.eye(3))


class TestCovarianceModel:
    def test_from_signal_shrinkage(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((4, 200))
        cov = CovarianceModel.from_signal(x)
        assert np.linalg.eigvalsh(cov.sigma).min() > 0
        assert np.abs(cov.sigma - cov.sigma.T).max() == 0.0

    def test_rejects_asymmetry(self):
        with pytest.raises(ValueError):
            CovarianceModel(np.array([[1.0, 0.5], [0.0, 1.0]]))


class TestRandomSelect:
    def test_full_selection(self):
        assert sorted(random_select(5, 5, 0).selected) == list(range(5))

    def test_seed_determinism(self):
        assert random_select(10, 3, 77).selected == random_select(10, 3, 77).selected

    def test_inclusion_frequency(self):
        counts = np.zeros(10)
        trials = 10_000
        for seed in range(trials):
            for i in random_select(10, 2, seed).selected:
                counts[i] += 1
        freq = counts / trials
        assert np.abs(freq - 0.2).max() < 0.02

    def test_too_many_rejected(self):
        with pytest.raises(ValueError):
            random_select(3, 4, 0)


class TestEntropySelect:
    def test_diagonal_picks_largest_variance(self):
        cov = CovarianceModel(np.diag([1.0, 2.0, 3.0]))
        assert entropy_select(cov, 1).selected == [2]
        assert entropy_select(cov, 2).selected == [2, 1]

    def test_diagonal_orders_all(self):
        cov = CovarianceModel(np.diag([5.0, 1.0, 4.0, 2.0, 3.0]))
        assert entropy_select(cov, 5).selected == [0, 2, 4, 3, 1]

    def test_correlated_pair_case(self):
        out = entropy_select(correlated_pair_cov(), 2).selected
        assert 2 in out
        assert len({0, 1} & set(out)) == 1

    def test_greedy_near_optimal_against_exhaustive(self):
        # with Sigma >= I every subset log-det is a monotone submodular set
        # function starting at 0, so greedy must reach (1 - 1/e) of the
        # exhaustive optimum
        rng = np.random.default_rng(1)
        for trial in range(20):
            n = int(rng.integers(3, 9))
            b = rng.standard_normal((n, n))
            cov = CovarianceModel(b @ b.T + np.eye(n))
            m = int(rng.integers(1, n + 1))
            greedy = set(entropy_select(cov, m).selected)
            _, best_val = best_entropy_subset(cov.sigma, m)
            got = subset_log_det(cov.sigma, greedy)
            assert got >= (1 - 1 / np.e) * best_val - 1e-9

    def test_singular_beyond_shrinkage(self):
        sigma = np.ones((3, 3))  # rank one, no shrinkage
        with pytest.raises(np.linalg.LinAlgError):
            entropy_select(CovarianceModel(sigma), 3)


class TestMiSelect:
    def test_diagonal_matches_entropy_order_by_tie_rule(self):
        cov = CovarianceModel(np.diag([1.0, 2.0, 3.0]))
        # independent sensors: the MI ratio is constant, so the tie rule
        # yields index order
        assert mi_select(cov, 2).selected == [0, 1]

    def test_singleton_against_brute_force(self):
        cov = correlated_pair_cov()
        sigma = cov.sigma
        ratios = []
        for i in range(3):
            rest = [j for j in range(3) if j != i]
            sub = sigma[np.ix_(rest, rest)]
            cross = sigma[rest, i]
            denom = sigma[i, i] - cross @ np.linalg.solve(sub, cross)
            ratios.append(sigma[i, i] / denom)
        expected = int(np.argmax(ratios))
        assert mi_select(cov, 1).selected == [expected]
        # a correlated sensor is preferred: it is predictable from its twin
        assert expected in (0, 1)

    def test_boundary(self):
        cov = CovarianceModel(np.diag([1.0, 2.0, 3.0]))
        assert len(mi_select(cov, 2).selected) == 2
        with pytest.raises(ValueError):
            mi_select(cov, 3)


class TestQrPivotSelect:
    def test_orthogonal_columns_sorted_by_norm(self):
        x = np.diag([3.0, 2.0, 1.0])  # rows are sensors
        assert qr_pivot_select(x, 2).selected == [0, 1]
        x = np.diag([1.0, 3.0, 2.0])
        assert qr_pivot_select(x, 3).selected == [1, 2, 0]

    def test_duplicate_never_second(self):
        v = np.array([1.0, 1.0, 0.0, 0.0])
        w = np.array([0.0, 0.0, 1.0, 0.0])
        x = np.vstack([v, v, w])
        assert qr_pivot_select(x, 2).selected == [0, 2]

    def test_single_sensor(self):
        assert qr_pivot_select(np.ones((1, 4)), 1).selected == [0]

    def test_rank_deficiency_warns_and_fills_by_index(self):
        v = np.array([1.0, 2.0, 3.0])
        x = np.vstack([v, 2 * v, 3 * v])
        with pytest.warns(UserWarning, match="rank deficiency"):
            out = qr_pivot_select(x, 3)
        assert out.selected[0] == 2  # largest norm first
        assert sorted(out.selected) == [0, 1, 2]

    def test_exhaustive_best_subset_on_orthogonal(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            norms = rng.permutation([5.0, 4.0, 3.0, 2.0, 1.0])
            x = np.diag(norms)
            out = qr_pivot_select(x, 3).selected
            expected = list(np.argsort(-norms)[:3])
            assert out == [int(i) for i in expected]


class TestLocalizationSelect:
    def test_identity_kernel_ties_resolve_by_index(self):
        basis = eigendecompose(laplacian(chain_graph(5)))
        out = localization_select(basis, LocalizationKernel(fn=lambda lam: 1.0), 3)
        assert out.selected == [0, 1, 2]

    def test_vertex_transitive_single_pick(self):
        a = np.ones((4, 4)) - np.eye(4)
        basis = eigendecompose(laplacian(Graph(a)))
        assert localization_select(basis, m=1).selected == [0]

    def test_path3_max_row_norm(self):
        basis = eigendecompose(laplacian(chain_graph(3)))
        t = localization_matrix(basis)
        expected = int(np.argmax(np.linalg.norm(t, axis=1)))
        assert localization_select(basis, m=1).selected == [expected]
        assert expected == 0  # frozen by the explicit spectral computation

    def test_selects_m_distinct(self):
        basis = eigendecompose(laplacian(chain_graph(6)))
        out = localization_select(basis, m=4).selected
        assert len(set(out)) == 4


def test_all_selectors_shared_result_shape():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((6, 50))
    basis = eigendecompose(laplacian(chain_graph(6)))
    cov = CovarianceModel.from_signal(x)
    results = [
        random_select(6, 3, 0),
        entropy_select(cov, 3),
        mi_select(cov, 3),
        qr_pivot_select(x, 3),
        localization_select(basis, m=3),
    ]
    for res in results:
        assert len(res.selected) == 3
        assert len(set(res.selected)) == 3
        assert all(0 <= i < 6 for i in res.selected)
        assert res.method in ("random", "entropy", "mi", "qr", "loc")
        assert res.config["method"] == res.method
