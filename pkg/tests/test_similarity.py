import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from classdiff import (
    DataError,
    build_cache,
    cosine,
    from_arrays,
    inter_class,
    intra_class,
    mean_cosine_fast,
    pair_matrix,
    summarize,
    summarize_fast,
)
from classdiff.similarity import matrix_to_csv
from classdiff.store import ClassBlock

from .conftest import random_dataset
from .oracles import brute_summary

SQRT2_INV = 1.0 / math.sqrt(2.0)


class TestCosine:
    def test_identical(self):
        assert cosine([1.0, 0.0], [1.0, 0.0]) == 1.0

    def test_orthogonal(self):
        assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_45_degrees(self):
        assert cosine([1.0, 1.0], [1.0, 0.0]) == pytest.approx(0.70710678, abs=1e-8)

    def test_zero_vector_error(self):
        with pytest.raises(Exception, match="zero"):
            cosine([0.0, 0.0], [1.0, 0.0])

    def test_dim_mismatch(self):
        with pytest.raises(DataError):
            cosine([1.0, 0.0], [1.0, 0.0, 0.0])

    def test_clamped(self):
        v = [1e-8, 1.0]
        assert -1.0 <= cosine(v, v) <= 1.0


def block(label, rows):
    return ClassBlock(label, np.asarray(rows, dtype=np.float64))


class TestIntraInter:
    def test_intra_identical(self):
        assert intra_class(block("a", [[1, 0], [1, 0], [1, 0]])) == pytest.approx(1.0)

    def test_intra_orthogonal(self):
        assert intra_class(block("a", [[1, 0], [0, 1]])) == pytest.approx(0.0)

    def test_intra_three_vectors(self):
        # pairs: (1,0)x(0,1)=0, (1,0)x(1,1)=1/sqrt2, (0,1)x(1,1)=1/sqrt2
        got = intra_class(block("a", [[1, 0], [0, 1], [1, 1]]))
        assert got == pytest.approx((0 + SQRT2_INV + SQRT2_INV) / 3, abs=1e-8)
        assert got == pytest.approx(0.47140452, abs=1e-8)

    def test_intra_single_instance_error(self):
        with pytest.raises(DataError, match="'solo'"):
            intra_class(block("solo", [[1, 0]]))

    def test_inter_orthogonal(self):
        assert inter_class(block("a", [[1, 0]]), block("b", [[0, 1]])) == 0.0

    def test_inter_identical(self):
        got = inter_class(block("a", [[1, 0], [1, 0]]), block("b", [[1, 0]]))
        assert got == pytest.approx(1.0)

    def test_inter_two_cross_pairs(self):
        got = inter_class(block("a", [[1, 0], [0, 1]]), block("b", [[1, 1]]))
        assert got == pytest.approx(0.70710678, abs=1e-8)

    def test_inter_symmetric(self):
        rng = np.random.default_rng(0)
        a = block("a", rng.normal(size=(4, 3)))
        b = block("b", rng.normal(size=(5, 3)))
        assert inter_class(a, b) == inter_class(b, a)
        assert inter_class(a, b, "euclidean") == inter_class(b, a, "euclidean")

    def test_inter_same_label_rejected(self):
        a = block("a", [[1, 0]])
        with pytest.raises(DataError):
            inter_class(a, a)


class TestSummarize:
    def test_orthogonal_toy(self, toy_orthogonal):
        s = summarize(toy_orthogonal)
        assert s.avg_intra == pytest.approx(1.0)
        assert s.avg_inter == pytest.approx(0.0)

    def test_four_identical_classes(self):
        v = [[1.0, 2.0], [1.0, 2.0]]
        ds = from_arrays("t", [(f"c{i}", v) for i in range(4)])
        s = summarize(ds)
        assert s.avg_intra == pytest.approx(1.0)
        assert s.avg_inter == pytest.approx(1.0)
        assert len(s.per_pair) == 6

    def test_matches_brute_force(self):
        rng = np.random.default_rng(42)
        ds = from_arrays("t", [(f"c{i}", rng.normal(size=(4, 5))) for i in range(3)])
        for kind in ("cosine", "euclidean"):
            s = summarize(ds, kind)
            per_class, per_pair, avg_intra, avg_inter = brute_summary(ds, kind)
            for k, v in per_class.items():
                assert s.per_class[k] == pytest.approx(v, abs=1e-9)
            for k, v in per_pair.items():
                assert s.per_pair[k] == pytest.approx(v, abs=1e-9)
            assert s.avg_intra == pytest.approx(avg_intra, abs=1e-9)
            assert s.avg_inter == pytest.approx(avg_inter, abs=1e-9)

    def test_single_class_rejected(self):
        ds = from_arrays("t", [("a", [[1.0, 0.0], [0.0, 1.0]])])
        with pytest.raises(DataError, match="2 classes"):
            summarize(ds)

    def test_single_instance_strict_vs_permissive(self):
        ds = from_arrays(
            "t",
            [
                ("a", [[1.0, 0.0], [0.9, 0.1]]),
                ("b", [[0.0, 1.0]]),
                ("c", [[1.0, 1.0], [1.0, 0.9]]),
            ],
        )
        with pytest.raises(DataError, match="single-instance"):
            summarize(ds)
        s = summarize(ds, permissive=True)
        assert s.dropped_classes == ("b",)
        assert set(s.per_class) == {"a", "c"}
        assert len(s.per_pair) == 3  # pairs still include the dropped class

    def test_averages_are_means(self):
        rng = np.random.default_rng(1)
        ds = random_dataset(rng)
        s = summarize(ds)
        assert s.avg_intra == pytest.approx(np.mean(list(s.per_class.values())), abs=1e-12)
        assert s.avg_inter == pytest.approx(np.mean(list(s.per_pair.values())), abs=1e-12)

    def test_pair_counts(self):
        ds = from_arrays(
            "t", [("a", np.eye(3)[:2]), ("b", np.ones((3, 3)))]
        )
        s = summarize(ds)
        assert s.intra_counts == {"a": 1, "b": 3}
        assert s.inter_counts == {("a", "b"): 6}

    def test_scale_invariance_cosine(self):
        rng = np.random.default_rng(5)
        blocks = [(f"c{i}", rng.normal(size=(4, 6))) for i in range(3)]
        ds = from_arrays("t", blocks)
        scaled = [(lbl, v.copy()) for lbl, v in blocks]
        scaled[1][1][2] *= 37.5  # scale a single instance vector
        ds2 = from_arrays("t", scaled)
        s1, s2 = summarize(ds), summarize(ds2)
        assert s1.avg_intra == pytest.approx(s2.avg_intra, abs=1e-9)
        assert s1.avg_inter == pytest.approx(s2.avg_inter, abs=1e-9)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(6)
        blocks = [(f"c{i}", rng.normal(size=(5, 4))) for i in range(3)]
        ds = from_arrays("t", blocks)
        shuffled = [(lbl, v[::-1].copy()) for lbl, v in reversed(blocks)]
        ds2 = from_arrays("t", shuffled)
        s1, s2 = summarize(ds), summarize(ds2)
        assert s1.per_class == pytest.approx(s2.per_class, abs=1e-9)
        for k in s1.per_pair:
            assert s1.per_pair[k] == pytest.approx(s2.per_pair[k], abs=1e-9)

    def test_euclidean_nonnegative(self):
        rng = np.random.default_rng(9)
        s = summarize(random_dataset(rng), "euclidean")
        assert all(v >= 0 for v in s.per_class.values())
        assert all(v >= 0 for v in s.per_pair.values())

    def test_cosine_in_range(self):
        rng = np.random.default_rng(10)
        s = summarize(random_dataset(rng))
        assert all(-1 <= v <= 1 for v in s.per_class.values())
        assert all(-1 <= v <= 1 for v in s.per_pair.values())


class TestPairMatrix:
    def test_orthogonal_toy(self, toy_orthogonal):
        labels, m = pair_matrix(toy_orthogonal)
        assert labels == ["a", "b"]
        np.testing.assert_allclose(m, np.eye(2), atol=1e-12)

    def test_consistent_with_summarize(self):
        rng = np.random.default_rng(11)
        ds = random_dataset(rng, max_classes=5)
        s = summarize(ds)
        labels, m = pair_matrix(ds)
        for i, la in enumerate(labels):
            assert m[i, i] == s.per_class[la]
            for j in range(i + 1, len(labels)):
                assert m[i, j] == s.per_pair[tuple(sorted((la, labels[j])))]

    def test_symmetric(self):
        rng = np.random.default_rng(12)
        _, m = pair_matrix(random_dataset(rng))
        np.testing.assert_array_equal(m, m.T)

    def test_ten_class_layout(self):
        # CIFAR-10-sized structural check: intra on the diagonal, all pairs off it
        rng = np.random.default_rng(13)
        ds = from_arrays("t", [(f"c{i}", rng.normal(size=(3, 4))) for i in range(10)])
        labels, m = pair_matrix(ds)
        assert m.shape == (10, 10)
        assert not np.isnan(m).any()

    def test_csv_export(self, toy_orthogonal):
        labels, m = pair_matrix(toy_orthogonal)
        text = matrix_to_csv(labels, m)
        lines = text.strip().split("\n")
        assert lines[0] == ",a,b"
        assert lines[1].startswith("a,1,")


class TestFastPath:
    def test_single_class_intra_formula(self):
        ds = from_arrays("t", [("a", [[1.0, 0.0], [0.0, 1.0]]), ("b", [[1.0, 1.0], [1.0, 1.0]])])
        s = mean_cosine_fast(build_cache(ds))
        # class a: (||(1,1)||^2 - 2) / 2 = 0
        assert s.per_class["a"] == pytest.approx(0.0, abs=1e-12)

    def test_inter_from_sums(self):
        ds = from_arrays("t", [("a", [[1.0, 0.0], [1.0, 0.0]]), ("b", [[1.0, 0.0]])])
        s = mean_cosine_fast(build_cache(ds), permissive=True)
        assert s.per_pair[("a", "b")] == pytest.approx(1.0)

    def test_matches_summarize_random(self):
        rng = np.random.default_rng(21)
        ds = from_arrays("t", [(f"c{i}", rng.normal(size=(50, 64))) for i in range(5)])
        fast = mean_cosine_fast(build_cache(ds))
        slow = summarize(ds)
        for k in slow.per_class:
            assert fast.per_class[k] == pytest.approx(slow.per_class[k], abs=1e-9)
        for k in slow.per_pair:
            assert fast.per_pair[k] == pytest.approx(slow.per_pair[k], abs=1e-9)
        assert fast.avg_intra == pytest.approx(slow.avg_intra, abs=1e-9)
        assert fast.avg_inter == pytest.approx(slow.avg_inter, abs=1e-9)

    def test_summarize_fast_wrapper(self, toy_orthogonal):
        s = summarize_fast(toy_orthogonal)
        assert s.avg_intra == pytest.approx(1.0)
        assert s.avg_inter == pytest.approx(0.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_three_way_agreement(seed):
    """summarize, fast path and the double-loop reference agree to 1e-9."""
    rng = np.random.default_rng(seed)
    ds = random_dataset(rng, max_classes=5, max_instances=8, max_dim=6)
    slow = summarize(ds)
    fast = summarize_fast(ds)
    per_class, per_pair, avg_intra, avg_inter = brute_summary(ds)
    for k, v in per_class.items():
        assert slow.per_class[k] == pytest.approx(v, abs=1e-9)
        assert fast.per_class[k] == pytest.approx(v, abs=1e-9)
    for k, v in per_pair.items():
        assert slow.per_pair[k] == pytest.approx(v, abs=1e-9)
        assert fast.per_pair[k] == pytest.approx(v, abs=1e-9)
    assert slow.avg_intra == pytest.approx(avg_intra, abs=1e-9)
    assert fast.avg_inter == pytest.approx(avg_inter, abs=1e-9)
