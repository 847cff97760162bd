import numpy as np
import pytest

from oracles import finite_difference_gradient
from ultradense.embeddings import EmbeddingSet
from ultradense.errors import InvalidDimension, MissingClass, OverlappingSubspaces
from ultradense.linalg import random_orthogonal
from ultradense.objective import (
    PairBatch,
    SubspaceSpec,
    gradient,
    loss,
    multi_gradient,
    multi_loss,
    sample_batch,
)
from ultradense.resources import TrainingTable


def table_from_labels(labels):
    labels = np.asarray(labels)
    return TrainingTable(
        word_indices=np.arange(len(labels)),
        labels=labels,
        is_test=np.zeros(len(labels), dtype=bool),
    )


def pair_set(e_v, e_w, group):
    """Embedding set plus a single-pair batch with e_w - e_v delta."""
    e = EmbeddingSet(words=["v", "w"], vectors=np.array([e_v, e_w], dtype=float))
    return e, PairBatch(v=[0], w=[1], group=group)


def empty(group):
    return PairBatch(v=np.array([], dtype=int), w=np.array([], dtype=int), group=group)


class TestSubspaceSpec:
    def test_valid(self):
        s = SubspaceSpec("sentiment", (0, 2), 0.4)
        assert s.dims == (0, 2)

    def test_empty_dims(self):
        with pytest.raises(InvalidDimension):
            SubspaceSpec("sentiment", ())

    def test_repeated_dims(self):
        with pytest.raises(InvalidDimension):
            SubspaceSpec("sentiment", (1, 1))

    def test_alpha_range(self):
        with pytest.raises(ValueError):
            SubspaceSpec("sentiment", (0,), 1.5)


class TestPairBatch:
    def test_rejects_self_pairs(self):
        with pytest.raises(ValueError):
            PairBatch(v=[1, 2], w=[1, 3], group="same")

    def test_rejects_unknown_group(self):
        with pytest.raises(ValueError):
            PairBatch(v=[0], w=[1], group="mixed")


class TestSampleBatch:
    def test_different_pairs_have_opposite_labels(self):
        t = table_from_labels([1, 1, -1, -1])
        rng = np.random.default_rng(0)
        batch = sample_batch(t, "different", 100, rng)
        assert len(batch) == 100
        labels = dict(zip(t.word_indices.tolist(), t.labels.tolist()))
        for v, w in zip(batch.v, batch.w):
            assert labels[int(v)] != labels[int(w)]

    def test_same_pairs_have_equal_labels(self):
        t = table_from_labels([1, 1, 1, -1, -1])
        batch = sample_batch(t, "same", 100, np.random.default_rng(1))
        labels = dict(zip(t.word_indices.tolist(), t.labels.tolist()))
        for v, w in zip(batch.v, batch.w):
            assert labels[int(v)] == labels[int(w)]
            assert v != w

    def test_same_needs_two_in_a_class(self):
        t = table_from_labels([1, -1])
        with pytest.raises(MissingClass):
            sample_batch(t, "same", 10, np.random.default_rng(0))

    def test_different_needs_both_classes(self):
        t = table_from_labels([1, 1])
        with pytest.raises(MissingClass):
            sample_batch(t, "different", 10, np.random.default_rng(0))

    def test_deterministic_from_cloned_state(self):
        t = table_from_labels([1, 1, -1, -1, 1, -1])
        a = sample_batch(t, "different", 50, np.random.default_rng(7))
        b = sample_batch(t, "different", 50, np.random.default_rng(7))
        assert np.array_equal(a.v, b.v) and np.array_equal(a.w, b.w)

    def test_test_split_excluded(self):
        t = TrainingTable(
            word_indices=np.arange(6),
            labels=np.array([1, 1, -1, -1, 1, -1]),
            is_test=np.array([False, False, False, False, True, True]),
        )
        batch = sample_batch(t, "different", 200, np.random.default_rng(3))
        assert not set(batch.v.tolist() + batch.w.tolist()) & {4, 5}


class TestLoss:
    def test_separation_only(self):
        e, diff = pair_set([0.0, 0.0], [3.0, 4.0], "different")
        spec = SubspaceSpec("sentiment", (0,), alpha=1.0)
        assert loss(np.eye(2), e, spec, diff, empty("same")) == -3.0

    def test_alignment_only(self):
        e, same = pair_set([0.0, 0.0], [3.0, 4.0], "same")
        spec = SubspaceSpec("sentiment", (0,), alpha=0.0)
        assert loss(np.eye(2), e, spec, empty("different"), same) == 3.0

    def test_weighted_combination(self):
        e = EmbeddingSet(words=["a", "b"], vectors=np.array([[0.0, 0.0], [3.0, 4.0]]))
        diff = PairBatch(v=[0], w=[1], group="different")
        same = PairBatch(v=[0], w=[1], group="same")
        spec = SubspaceSpec("sentiment", (0,), alpha=0.4)
        assert loss(np.eye(2), e, spec, diff, same) == pytest.approx(0.4 * -3 + 0.6 * 3)

    def test_alpha_decomposition(self):
        rng = np.random.default_rng(5)
        e = EmbeddingSet(words=[f"w{i}" for i in range(8)], vectors=rng.standard_normal((8, 4)))
        diff = PairBatch(v=[0, 1, 2], w=[4, 5, 6], group="different")
        same = PairBatch(v=[0, 3], w=[1, 7], group="same")
        q = random_orthogonal(4, seed=2)
        for alpha in (0.0, 0.3, 0.7, 1.0):
            spec = SubspaceSpec("s", (1, 2), alpha=alpha)
            full = loss(q, e, spec, diff, same)
            sep = loss(q, e, SubspaceSpec("s", (1, 2), 1.0), diff, same)
            ali = loss(q, e, SubspaceSpec("s", (1, 2), 0.0), diff, same)
            assert full == pytest.approx(alpha * sep + (1 - alpha) * ali, abs=1e-12)

    def test_pair_swap_invariance(self):
        rng = np.random.default_rng(9)
        e = EmbeddingSet(words=["a", "b", "c", "d"], vectors=rng.standard_normal((4, 3)))
        spec = SubspaceSpec("s", (0, 2), alpha=0.4)
        q = random_orthogonal(3, seed=1)
        fwd = loss(q, e, spec, PairBatch([0, 1], [2, 3], "different"), empty("same"))
        rev = loss(q, e, spec, PairBatch([2, 3], [0, 1], "different"), empty("same"))
        assert fwd == pytest.approx(rev, abs=1e-12)

    def test_full_space_isometry_invariance(self):
        rng = np.random.default_rng(4)
        e = EmbeddingSet(words=[f"w{i}" for i in range(6)], vectors=rng.standard_normal((6, 5)))
        spec = SubspaceSpec("s", tuple(range(5)), alpha=0.4)
        diff = PairBatch(v=[0, 1], w=[3, 4], group="different")
        same = PairBatch(v=[0, 2], w=[1, 5], group="same")
        values = {
            round(loss(random_orthogonal(5, seed=s), e, spec, diff, same), 9)
            for s in range(5)
        }
        assert len(values) == 1

    def test_dims_out_of_range(self):
        e, diff = pair_set([0.0, 0.0], [1.0, 1.0], "different")
        with pytest.raises(InvalidDimension):
            loss(np.eye(2), e, SubspaceSpec("s", (5,)), diff, empty("same"))

    def test_swapped_batches_rejected(self):
        e, diff = pair_set([0.0, 0.0], [1.0, 1.0], "different")
        with pytest.raises(ValueError):
            loss(np.eye(2), e, SubspaceSpec("s", (0,)), empty("same"), diff)


class TestGradient:
    def test_empty_batches_zero(self):
        e, _ = pair_set([0.0, 0.0], [1.0, 1.0], "different")
        g = gradient(np.eye(2), e, SubspaceSpec("s", (0,), 0.4),
                     empty("different"), empty("same"))
        assert np.array_equal(g, np.zeros((2, 2)))

    def test_single_pair_hand_computed(self):
        e, diff = pair_set([0.0, 0.0], [3.0, 4.0], "different")
        spec = SubspaceSpec("s", (0,), alpha=1.0)
        g = gradient(np.eye(2), e, spec, diff, empty("same"))
        assert np.allclose(g, [[-3.0, -4.0], [0.0, 0.0]])

    def test_zero_delta_contributes_nothing(self):
        e = EmbeddingSet(words=["a", "b"], vectors=np.array([[1.0, 2.0], [1.0, 2.0]]))
        same = PairBatch(v=[0], w=[1], group="same")
        g = gradient(np.eye(2), e, SubspaceSpec("s", (0,), 0.4),
                     empty("different"), same)
        assert np.array_equal(g, np.zeros((2, 2)))

    def test_matches_finite_differences(self):
        for seed in range(5):
            rng = np.random.default_rng(seed)
            e = EmbeddingSet(
                words=[f"w{i}" for i in range(6)], vectors=rng.standard_normal((6, 5))
            )
            diff = PairBatch(v=rng.integers(0, 3, 10),
                             w=rng.integers(3, 6, 10), group="different")
            v = rng.integers(0, 6, 10)
            w = (v + 1 + rng.integers(0, 5, 10)) % 6
            same = PairBatch(v=v, w=w, group="same")
            spec = SubspaceSpec("s", (0, 2), alpha=0.4)
            q = random_orthogonal(5, seed=seed)
            analytic = gradient(q, e, spec, diff, same)
            numeric = finite_difference_gradient(
                lambda m: loss(m, e, spec, diff, same), q
            )
            rel = np.linalg.norm(analytic - numeric) / np.linalg.norm(numeric)
            assert rel <= 1e-5


class TestMulti:
    def setup_method(self):
        rng = np.random.default_rng(2)
        self.e = EmbeddingSet(
            words=[f"w{i}" for i in range(8)], vectors=rng.standard_normal((8, 6))
        )
        self.q = random_orthogonal(6, seed=3)
        self.diff = PairBatch(v=[0, 1], w=[4, 5], group="different")
        self.same = PairBatch(v=[0, 4], w=[1, 5], group="same")

    def test_single_spec_equals_loss(self):
        spec = SubspaceSpec("s", (0,), 0.4)
        assert multi_loss(self.q, self.e, [spec], [(self.diff, self.same)]) == \
            pytest.approx(loss(self.q, self.e, spec, self.diff, self.same))

    def test_two_specs_sum(self):
        s1 = SubspaceSpec("sentiment", (0,), 0.4)
        s2 = SubspaceSpec("frequency", (3,), 0.6)
        batches = [(self.diff, self.same), (self.diff, self.same)]
        total = multi_loss(self.q, self.e, [s1, s2], batches)
        parts = sum(loss(self.q, self.e, s, self.diff, self.same) for s in (s1, s2))
        assert total == pytest.approx(parts)
        g = multi_gradient(self.q, self.e, [s1, s2], batches)
        gp = gradient(self.q, self.e, s1, self.diff, self.same) + \
            gradient(self.q, self.e, s2, self.diff, self.same)
        assert np.allclose(g, gp)

    def test_overlapping_dims_rejected(self):
        s1 = SubspaceSpec("sentiment", (0,), 0.4)
        s2 = SubspaceSpec("frequency", (0,), 0.4)
        with pytest.raises(OverlappingSubspaces):
            multi_loss(self.q, self.e, [s1, s2],
                       [(self.diff, self.same), (self.diff, self.same)])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            multi_loss(self.q, self.e, [SubspaceSpec("s", (0,))], [])
