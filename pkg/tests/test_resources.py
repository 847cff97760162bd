import numpy as np
import pytest

from ultradense.embeddings import EmbeddingSet
from ultradense.errors import (
    DuplicateWord,
    EmptyIntersection,
    EmptyResource,
    InsufficientVocabulary,
    LabelDomainError,
    MissingClass,
    ParseError,
)
from ultradense.resources import (
    LexiconResource,
    TrainingTable,
    binarize,
    frequency_lexicon,
    intersect,
    load_lexicon,
    save_lexicon_resource,
    split,
    subsample_train,
)


def write_tsv(path, rows):
    path.write_text("".join(f"{t}\t{v}\n" for t, v in rows), encoding="utf-8")
    return path


def vocab(words):
    return EmbeddingSet(words=list(words), vectors=np.zeros((len(words), 2)))


class TestLoadLexicon:
    def test_binary(self, tmp_path):
        p = write_tsv(tmp_path / "lex.tsv", [("good", 1), ("bad", -1)])
        r = load_lexicon(p, prop="sentiment", kind="binary")
        assert r.entries == {"good": 1.0, "bad": -1.0}
        assert r.kind == "binary"
        assert len(r) == 2

    def test_binary_rejects_other_labels(self, tmp_path):
        p = write_tsv(tmp_path / "lex.tsv", [("good", 0.8)])
        with pytest.raises(LabelDomainError):
            load_lexicon(p, kind="binary")

    def test_continuous_accepts_fractions(self, tmp_path):
        p = write_tsv(tmp_path / "lex.tsv", [("good", 0.8)])
        r = load_lexicon(p, kind="continuous")
        assert r.entries == {"good": 0.8}

    def test_unparsable_label(self, tmp_path):
        p = write_tsv(tmp_path / "lex.tsv", [("good", "high")])
        with pytest.raises(ParseError, match="high"):
            load_lexicon(p, kind="continuous")

    def test_duplicate_token(self, tmp_path):
        p = write_tsv(tmp_path / "lex.tsv", [("good", 1), ("good", -1)])
        with pytest.raises(DuplicateWord):
            load_lexicon(p)

    def test_comments_and_blanks_ignored(self, tmp_path):
        p = tmp_path / "lex.tsv"
        p.write_text("# header comment\ngood\t1\n\nbad\t-1\n", encoding="utf-8")
        assert len(load_lexicon(p)) == 2

    def test_wrong_field_count(self, tmp_path):
        p = tmp_path / "lex.tsv"
        p.write_text("good 1\n", encoding="utf-8")
        with pytest.raises(ParseError):
            load_lexicon(p)

    def test_round_trip(self, tmp_path):
        r = LexiconResource(entries={"a": 0.25, "b": -0.75}, kind="continuous")
        p = tmp_path / "lex.tsv"
        save_lexicon_resource(r, p)
        assert load_lexicon(p, kind="continuous").entries == r.entries


class TestBinarize:
    def test_threshold_semantics(self):
        r = LexiconResource(
            entries={"a": 0.9, "b": -0.7, "c": 0.3}, kind="continuous"
        )
        out = binarize(r)
        assert out.entries == {"a": 1.0, "b": -1.0}
        assert out.kind == "binary"

    def test_boundary_dropped(self):
        r = LexiconResource(entries={"a": 0.5, "b": -0.5, "c": 0.51}, kind="continuous")
        assert binarize(r).entries == {"c": 1.0}

    def test_output_size_matches_dead_zone(self):
        rng = np.random.default_rng(0)
        values = rng.uniform(-1, 1, size=200)
        r = LexiconResource(
            entries={f"w{i}": float(v) for i, v in enumerate(values)},
            kind="continuous",
        )
        out = binarize(r, dead_zone=0.4)
        assert len(out) == int(np.sum(np.abs(values) > 0.4))

    def test_empty_result(self):
        r = LexiconResource(entries={"c": 0.3}, kind="continuous")
        with pytest.raises(EmptyResource):
            binarize(r)

    def test_rejects_binary_input(self):
        r = LexiconResource(entries={"a": 1.0}, kind="binary")
        with pytest.raises(LabelDomainError):
            binarize(r)

    def test_rejects_out_of_range(self):
        r = LexiconResource(entries={"a": 1.5}, kind="continuous")
        with pytest.raises(LabelDomainError):
            binarize(r)


class TestFrequencyLexicon:
    def test_default_construction(self):
        e = vocab(f"w{i}" for i in range(25000))
        r = frequency_lexicon(e)
        labels = np.array(list(r.entries.values()))
        assert int(np.sum(labels > 0)) == 2000
        assert int(np.sum(labels < 0)) == 2000
        assert r.property == "frequency"
        assert r.entries["w0"] == 1.0
        assert r.entries["w20000"] == -1.0

    def test_scaled_down(self):
        e = vocab(["w0", "w1", "w2", "w3", "w4", "w5"])
        r = frequency_lexicon(e, top=2, low_start=4, low_end=6)
        assert r.entries == {"w0": 1.0, "w1": 1.0, "w4": -1.0, "w5": -1.0}

    def test_insufficient_vocabulary(self):
        e = vocab(f"w{i}" for i in range(10))
        with pytest.raises(InsufficientVocabulary):
            frequency_lexicon(e)

    def test_bad_params(self):
        e = vocab(f"w{i}" for i in range(10))
        with pytest.raises(ValueError):
            frequency_lexicon(e, top=5, low_start=3, low_end=6)


class TestIntersect:
    def test_basic(self):
        r = LexiconResource(
            entries={"good": 1.0, "bad": -1.0, "zorp": 1.0}, kind="binary"
        )
        e = vocab(["good", "bad"])
        t = intersect(r, e)
        assert len(t) == 2
        assert t.dropped == 1
        assert not t.is_test.any()
        # entries in embedding order with the resource's labels
        assert list(t.word_indices) == [0, 1]
        assert list(t.labels) == [1, -1]

    def test_disjoint(self):
        r = LexiconResource(entries={"x": 1.0, "y": -1.0}, kind="binary")
        with pytest.raises(EmptyIntersection):
            intersect(r, vocab(["a", "b"]))

    def test_single_class(self):
        r = LexiconResource(entries={"a": 1.0, "b": 1.0, "zz": -1.0}, kind="binary")
        with pytest.raises(MissingClass):
            intersect(r, vocab(["a", "b"]))

    def test_rejects_continuous(self):
        r = LexiconResource(entries={"a": 0.5}, kind="continuous")
        with pytest.raises(LabelDomainError):
            intersect(r, vocab(["a", "b"]))


def make_table(n_pos, n_neg):
    n = n_pos + n_neg
    return TrainingTable(
        word_indices=np.arange(n),
        labels=np.array([1] * n_pos + [-1] * n_neg),
        is_test=np.zeros(n, dtype=bool),
    )


class TestSplit:
    def test_counts_and_determinism(self):
        t = make_table(5, 5)
        s1 = split(t, 0.2, seed=1)
        s2 = split(t, 0.2, seed=1)
        assert int(s1.is_test.sum()) == 2
        assert int((~s1.is_test).sum()) == 8
        assert np.array_equal(s1.is_test, s2.is_test)

    def test_seeds_differ(self):
        t = make_table(20, 20)
        a = split(t, 0.2, seed=1)
        b = split(t, 0.2, seed=2)
        assert not np.array_equal(a.is_test, b.is_test)

    def test_missing_class(self):
        t = make_table(1, 1)
        with pytest.raises(MissingClass):
            split(t, 0.5, seed=1)

    def test_ceil_rounding(self):
        t = make_table(5, 5)
        assert int(split(t, 0.11, seed=0).is_test.sum()) == 2  # ceil(1.1)

    def test_bad_fraction(self):
        with pytest.raises(ValueError):
            split(make_table(2, 2), 1.0, seed=0)

    def test_original_untouched(self):
        t = make_table(5, 5)
        split(t, 0.2, seed=1)
        assert not t.is_test.any()


class TestSubsample:
    def test_balanced(self):
        t = split(make_table(30, 30), 0.2, seed=3)
        sub = subsample_train(t, 20, seed=0)
        assert int((~sub.is_test).sum()) == 20
        assert int(sub.train_labels.sum()) == 0
        # test split untouched
        assert np.array_equal(
            np.sort(sub.test_word_indices), np.sort(t.test_word_indices)
        )

    def test_full_size_is_identity(self):
        t = split(make_table(10, 10), 0.2, seed=3)
        assert subsample_train(t, int((~t.is_test).sum()), seed=0) is t

    def test_too_large(self):
        t = split(make_table(10, 10), 0.2, seed=3)
        with pytest.raises(MissingClass):
            subsample_train(t, 100, seed=0)

    def test_too_small(self):
        t = split(make_table(10, 10), 0.2, seed=3)
        with pytest.raises(MissingClass):
            subsample_train(t, 3, seed=0)

    def test_deterministic(self):
        t = split(make_table(30, 30), 0.2, seed=3)
        a = subsample_train(t, 20, seed=5)
        b = subsample_train(t, 20, seed=5)
        assert np.array_equal(a.word_indices, b.word_indices)


class TestValidation:
    def test_binary_resource_rejects_fractional(self):
        with pytest.raises(LabelDomainError):
            LexiconResource(entries={"a": 0.5}, kind="binary")

    def test_table_rejects_repeated_indices(self):
        with pytest.raises(DuplicateWord):
            TrainingTable(
                word_indices=[0, 0],
                labels=[1, -1],
                is_test=[False, False],
            )

    def test_table_rejects_bad_labels(self):
        with pytest.raises(LabelDomainError):
            TrainingTable(word_indices=[0, 1], labels=[1, 2], is_test=[False, False])
