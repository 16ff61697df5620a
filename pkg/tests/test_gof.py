import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lbmgof.errors import Inapplicable, InvalidParams
from lbmgof.generator import GeneratorSpec, generate, preset_params, trial_seed
from lbmgof.gof import TestConfig, decide, gof_test, scan_order, sequential_select, test_statistic
from lbmgof.model import BlockParams, BlockStructure, ObservedMatrix
from lbmgof.spectral import scaling_constants
from lbmgof.tracy_widom import tw1_upper_quantile


def preset_matrix(n, p, seed):
    return generate(GeneratorSpec("gaussian", preset_params("gaussian"), n, p, seed))


class TestStatistic:
    def test_tiny_hand_example(self):
        # the single-block standardization of this matrix is [[-1, 1], [1, -1]]
        A = ObservedMatrix([[0.0, 2.0], [2.0, 0.0]])
        s = BlockStructure.from_assign([1, 1], [1, 1])
        T, lam, scaling = test_statistic(A, s)
        b = 2 * np.sqrt(2) * (2 / np.sqrt(2)) ** (1 / 3)
        assert lam == pytest.approx(4.0, rel=1e-12)
        assert scaling.a == pytest.approx(8.0, rel=1e-15)
        assert scaling.b == pytest.approx(b, rel=1e-15)
        assert T == pytest.approx((4 - 8) / b, rel=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.01, 100), st.floats(-100, 100))
    def test_affine_invariance(self, seed, c, d):
        A, truth = preset_matrix(60, 45, seed)
        T, _, _ = test_statistic(A, truth)
        T2, _, _ = test_statistic(ObservedMatrix(c * A.data + d), truth)
        assert T2 == pytest.approx(T, rel=1e-7, abs=1e-7)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_permutation_invariance(self, seed):
        A, truth = preset_matrix(60, 45, seed)
        rng = np.random.default_rng(seed)
        rp, cp = rng.permutation(60), rng.permutation(45)
        T, _, _ = test_statistic(A, truth)
        T2, _, _ = test_statistic(ObservedMatrix(A.data[rp][:, cp]), truth.permuted(rp, cp))
        assert T2 == pytest.approx(T, rel=1e-8, abs=1e-8)

    def test_scaling_uses_matrix_shape(self, rng):
        A = ObservedMatrix(rng.standard_normal((30, 20)))
        _, _, scaling = test_statistic(A, BlockStructure.from_assign([1] * 30, [1] * 20))
        assert scaling == scaling_constants(30, 20)


class TestGofTest:
    def test_constant_matrix_is_inapplicable(self):
        with pytest.raises(Inapplicable):
            gof_test(ObservedMatrix(np.full((5, 4), 3.0)), 1, 1)

    @pytest.mark.parametrize("alpha", [0.01, 0.05, 0.1, 0.5])
    def test_decision_consistency(self, alpha):
        for seed in range(5):
            A, _ = preset_matrix(80, 60, seed)
            for K0, H0 in [(1, 1), (4, 3), (2, 2)]:
                r = gof_test(A, K0, H0, TestConfig(alpha=alpha))
                assert r.quantile == tw1_upper_quantile(alpha)
                assert r.reject == (r.statistic_T >= r.quantile)
                assert r.statistic_T == (r.lambda1_hat - r.scaling.a) / r.scaling.b
                assert r.alpha == alpha

    def test_decide_boundary_rejects(self):
        q = tw1_upper_quantile(0.05)
        assert decide(q, 0.0, scaling_constants(2, 2), 0.05).reject
        assert not decide(np.nextafter(q, -np.inf), 0.0, scaling_constants(2, 2), 0.05).reject

    def test_custom_clustering_is_used(self):
        A, truth = preset_matrix(100, 75, 4)
        calls = []

        def oracle(matrix, K0, H0):
            calls.append((K0, H0))
            return truth

        r = gof_test(A, 4, 3, TestConfig(clustering=oracle))
        assert calls == [(4, 3)]
        assert r.statistic_T == test_statistic(A, truth)[0]

    def test_true_structure_accepted_and_underfit_rejected(self):
        A, _ = preset_matrix(300, 225, 1)
        assert not gof_test(A, 4, 3).reject
        assert gof_test(A, 3, 3).reject
        assert gof_test(A, 1, 1).statistic_T > 100 * tw1_upper_quantile(0.01)

    @pytest.mark.parametrize("alpha", [0.0001, 0.51, 0.0, 1.0])
    def test_config_rejects_alpha(self, alpha):
        with pytest.raises(InvalidParams):
            TestConfig(alpha=alpha)

    def test_config_rejects_l_max(self):
        with pytest.raises(InvalidParams):
            TestConfig(L_max=1)


class TestScanOrder:
    def test_first_levels(self):
        assert list(scan_order(4)) == [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)]

    @pytest.mark.parametrize("L_max", [2, 5, 12])
    def test_count(self, L_max):
        assert len(list(scan_order(L_max))) == L_max * (L_max - 1) // 2

    def test_position_of_four_three(self):
        # levels 2..6 hold 1+2+3+4+5 pairs; (4, 3) is the fourth pair of level 7
        assert list(scan_order(7)).index((4, 3)) + 1 == 19


class TestSequentialSelect:
    def test_selects_true_structure_with_full_trace(self):
        A, _ = preset_matrix(400, 300, 2)
        trace = sequential_select(A)
        assert trace.selected == (4, 3) and not trace.exhausted
        assert len(trace.steps) == 19
        assert [(s.K0, s.H0) for s in trace.steps] == list(scan_order(7))[:19]
        assert all(s.result.reject for s in trace.steps[:-1])
        assert trace.steps[-1].accepted

    def test_exhausted_below_truth(self):
        A, _ = preset_matrix(200, 150, 3)
        trace = sequential_select(A, TestConfig(L_max=5))
        assert trace.exhausted and trace.selected is None
        assert [(s.K0, s.H0) for s in trace.steps] == list(scan_order(5))

    def test_inapplicable_steps_count_as_rejections(self):
        trace = sequential_select(ObservedMatrix(np.full((4, 4), 1.0)), TestConfig(L_max=4))
        assert trace.exhausted
        assert len(trace.steps) == 6
        assert all(s.result is None and s.error.startswith("Inapplicable") for s in trace.steps)

    def test_l_max_precondition(self):
        with pytest.raises(InvalidParams):
            sequential_select(ObservedMatrix(np.eye(3) + 1), TestConfig(L_max=5))

    def test_single_block_selects_one_one(self):
        params = BlockParams([[0.3]], [[1.7]])
        first = 0
        for trial in range(100):
            A, _ = generate(GeneratorSpec("gaussian", params, 500, 400, trial_seed(8, trial)))
            trace = sequential_select(A)
            first += trace.selected == (1, 1) and len(trace.steps) == 1
        assert first >= 95

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 6), st.sampled_from([0.01, 0.1, 0.5]))
    def test_stops_at_first_acceptance(self, seed, L_max, alpha):
        rng = np.random.default_rng(seed)
        K, H = rng.integers(1, 4, size=2)
        params = BlockParams(rng.uniform(0, 1, (K, H)), rng.uniform(0.05, 0.3, (K, H)))
        A, _ = generate(GeneratorSpec("gaussian", params, 40, 30, seed))
        trace = sequential_select(A, TestConfig(alpha=alpha, L_max=L_max))
        pairs = [(s.K0, s.H0) for s in trace.steps]
        assert pairs == list(scan_order(L_max))[: len(pairs)]
        assert not any(s.accepted for s in trace.steps[:-1])
        if trace.exhausted:
            assert trace.selected is None and len(pairs) == L_max * (L_max - 1) // 2
        else:
            assert trace.steps[-1].accepted and trace.selected == pairs[-1]


@pytest.mark.slow
def test_type_one_and_power_at_2000():
    accepted = rejected = 0
    for trial in range(300):
        A, _ = preset_matrix(2000, 1500, trial_seed(31, trial))
        accepted += not gof_test(A, 4, 3).reject
        rejected += gof_test(A, 3, 3).reject
    assert accepted >= 291 and rejected >= 297


@pytest.mark.slow
def test_true_structure_exceedance_at_3000():
    q = tw1_upper_quantile(0.05)
    hits = 0
    for trial in range(1000):
        A, truth = preset_matrix(3000, 2250, trial_seed(32, trial))
        hits += test_statistic(A, truth)[0] >= q
    assert abs(hits / 1000 - 0.05) <= 0.02
