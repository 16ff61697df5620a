import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.cluster.hierarchy import fcluster, linkage

from lbmgof.coclustering import align_labels, ward_cocluster, ward_labels
from lbmgof.errors import DimensionMismatch, TooManyClusters, TooManyClustersForExhaustiveAlignment
from lbmgof.generator import GeneratorSpec, generate, preset_params, trial_seed
from lbmgof.model import BlockStructure, ObservedMatrix


def same_partition(a, b):
    a, b = np.asarray(a), np.asarray(b)
    pairs = set(zip(a.tolist(), b.tolist()))
    return len(pairs) == len(set(a.tolist())) == len(set(b.tolist()))


class TestWardLabels:
    def test_two_pairs(self):
        X = np.array([[0, 0], [0.05, 0], [5, 5], [5.05, 5]])
        assert ward_labels(X, 2).tolist() == [0, 0, 1, 1]

    def test_every_row_its_own_cluster(self, rng):
        X = rng.standard_normal((6, 3))
        assert sorted(ward_labels(X, 6).tolist()) == list(range(6))

    def test_one_cluster(self, rng):
        assert set(ward_labels(rng.standard_normal((5, 2)), 1).tolist()) == {0}

    def test_too_many(self, rng):
        with pytest.raises(TooManyClusters):
            ward_labels(rng.standard_normal((3, 2)), 4)

    def test_matches_scipy_ward(self, rng):
        for _ in range(150):
            n = int(rng.integers(3, 50))
            X = rng.standard_normal((n, int(rng.integers(1, 8))))
            k = int(rng.integers(1, n + 1))
            ref = fcluster(linkage(X, "ward"), k, "maxclust")
            if len(set(ref)) != k:  # scipy could not cut at exactly k
                continue
            assert same_partition(ward_labels(X, k), ref)

    def test_tie_rule_is_lexicographic(self):
        # four equidistant points on a line: 0-1, 1-2, 2-3 all cost the same
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        assert ward_labels(X, 3).tolist() == [0, 0, 1, 2]

    def test_identical_rows(self):
        X = np.array([[1.0, 1.0]] * 3 + [[4.0, 4.0]] * 2)
        assert ward_labels(X, 2).tolist() == [0, 0, 0, 1, 1]

    def test_labels_numbered_by_first_member(self, rng):
        labels = ward_labels(rng.standard_normal((40, 3)), 5)
        firsts = [int(np.flatnonzero(labels == c)[0]) for c in range(5)]
        assert firsts == sorted(firsts)


class TestProperties:
    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.1, 10), st.floats(-5, 5))
    def test_affine_invariance(self, seed, c, d):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((25, 18))
        base = ward_cocluster(ObservedMatrix(A), 4, 3)
        moved = ward_cocluster(ObservedMatrix(c * A + d), 4, 3)
        assert same_partition(base.row_labels, moved.row_labels)
        assert same_partition(base.col_labels, moved.col_labels)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_permutation_equivariance(self, seed):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((25, 18))
        rp, cp = rng.permutation(25), rng.permutation(18)
        base = ward_cocluster(ObservedMatrix(A), 3, 4)
        moved = ward_cocluster(ObservedMatrix(A[rp][:, cp]), 3, 4)
        assert same_partition(base.row_labels[rp], moved.row_labels)
        assert same_partition(base.col_labels[cp], moved.col_labels)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 12), st.integers(1, 9))
    def test_exact_cluster_counts(self, seed, K0, H0):
        rng = np.random.default_rng(seed)
        A = rng.integers(0, 3, size=(12, 9)).astype(float)  # many exact ties
        s = ward_cocluster(ObservedMatrix(A), K0, H0)
        assert (s.K, s.H) == (K0, H0)
        assert s.row_sizes().min() > 0 and s.col_sizes().min() > 0

    def test_deterministic(self, rng):
        A = ObservedMatrix(rng.standard_normal((30, 20)))
        assert ward_cocluster(A, 3, 2) == ward_cocluster(A, 3, 2)

    def test_too_many_clusters(self):
        with pytest.raises(TooManyClusters):
            ward_cocluster(ObservedMatrix(np.eye(3)), 4, 1)

    def test_recovers_preset_structure_at_moderate_size(self):
        hits = 0
        for trial in range(10):
            A, truth = generate(GeneratorSpec("gaussian", preset_params("gaussian"), 300, 225, trial_seed(3, trial)))
            hits += align_labels(ward_cocluster(A, 4, 3), truth).exact
        assert hits == 10


@pytest.mark.slow
def test_recovery_at_scale():
    hits = 0
    for trial in range(100):
        A, truth = generate(GeneratorSpec("gaussian", preset_params("gaussian"), 1500, 1125, trial_seed(5, trial)))
        hits += align_labels(ward_cocluster(A, 4, 3), truth).exact
    assert hits >= 99


class TestAlignLabels:
    def test_identical(self):
        s = BlockStructure.from_assign([1, 2, 3, 1], [1, 2, 2])
        a = align_labels(s, s)
        assert a.row_perm == (0, 1, 2) and a.col_perm == (0, 1)
        assert a.agreement == 1.0 and a.exact

    def test_swapped_rows(self):
        truth = BlockStructure.from_assign([1, 2, 3, 1], [1, 2, 2])
        est = BlockStructure.from_assign([2, 1, 3, 2], [1, 2, 2])
        a = align_labels(est, truth)
        assert a.row_perm == (1, 0, 2)
        assert a.agreement == 1.0

    def test_random_labels(self, rng):
        n = 1000
        truth = BlockStructure(rng.integers(0, 4, n), rng.integers(0, 4, n), 4, 4)
        est = BlockStructure(rng.integers(0, 4, n), rng.integers(0, 4, n), 4, 4)
        assert align_labels(est, truth).agreement == pytest.approx(0.25, abs=0.05)

    def test_dimension_mismatch(self):
        a = BlockStructure.from_assign([1, 2], [1, 1])
        with pytest.raises(DimensionMismatch):
            align_labels(a, BlockStructure.from_assign([1, 2, 1], [1, 1]))
        with pytest.raises(DimensionMismatch):
            align_labels(a, BlockStructure.from_assign([1, 1], [1, 1]))

    def test_too_many_for_exhaustive(self):
        s = BlockStructure(np.arange(9), np.zeros(9, int), 9, 1)
        with pytest.raises(TooManyClustersForExhaustiveAlignment):
            align_labels(s, s)
