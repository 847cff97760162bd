"""Lexicon resources (word -> label tables) and their conversion into
index-resolved training tables.

Resource exchange format is TSV: UTF-8 lines ``token<TAB>label``, no header,
lines starting with '#' ignored. Binary resources carry labels in {-1, +1};
continuous ones carry any finite real and can be binarized with a dead zone
around zero.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .embeddings import EmbeddingSet
from .errors import (
    DuplicateWord,
    EmptyIntersection,
    EmptyResource,
    InsufficientVocabulary,
    InvalidValue,
    IoError,
    LabelDomainError,
    MissingClass,
    ParseError,
)

logger = logging.getLogger(__name__)

KINDS = ("binary", "continuous")
PROPERTIES = ("sentiment", "concreteness", "frequency", "other")


@dataclass(eq=False)
class LexiconResource:
    """A word -> label table with provenance metadata."""

    entries: dict[str, float]
    kind: str
    property: str = "other"
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        for token, label in self.entries.items():
            if not math.isfinite(label):
                raise InvalidValue(f"non-finite label for token {token!r}")
            if self.kind == "binary" and label not in (-1.0, 1.0):
                raise LabelDomainError(
                    f"binary resource has label {label!r} for token {token!r}"
                )

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(eq=False)
class TrainingTable:
    """Resource/vocabulary intersection: embedding row indices with +-1
    labels and a train/test tag per entry."""

    word_indices: np.ndarray
    labels: np.ndarray
    is_test: np.ndarray
    dropped: int = 0
    _positions: dict[int, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.word_indices = np.asarray(self.word_indices, dtype=np.int64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.is_test = np.asarray(self.is_test, dtype=bool)
        n = len(self.word_indices)
        if len(self.labels) != n or len(self.is_test) != n:
            raise ValueError("word_indices, labels and is_test must be parallel")
        if n and len(np.unique(self.word_indices)) != n:
            raise DuplicateWord("training table has repeated word indices")
        if not np.all(np.isin(self.labels, (-1, 1))):
            raise LabelDomainError("training table labels must be -1 or +1")
        self._positions = {int(w): i for i, w in enumerate(self.word_indices)}

    def __len__(self) -> int:
        return len(self.word_indices)

    @property
    def train_word_indices(self) -> np.ndarray:
        return self.word_indices[~self.is_test]

    @property
    def train_labels(self) -> np.ndarray:
        return self.labels[~self.is_test]

    @property
    def test_word_indices(self) -> np.ndarray:
        return self.word_indices[self.is_test]

    @property
    def test_labels(self) -> np.ndarray:
        return self.labels[self.is_test]


def load_lexicon(path, prop: str = "other", kind: str = "binary") -> LexiconResource:
    """Parse a resource TSV; binary kind validates labels in {-1, +1}."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    path = str(path)
    entries: dict[str, float] = {}
    try:
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ParseError(
                        f"{path}:{lineno}: expected 'token<TAB>label', got {len(parts)} fields"
                    )
                token, raw = parts
                try:
                    label = float(raw)
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: unparsable label {raw!r}") from None
                if not math.isfinite(label):
                    raise InvalidValue(f"{path}:{lineno}: non-finite label for {token!r}")
                if token in entries:
                    raise DuplicateWord(f"{path}:{lineno}: duplicate token {token!r}")
                if kind == "binary" and label not in (-1.0, 1.0):
                    raise LabelDomainError(
                        f"{path}:{lineno}: binary resource has label {raw!r} for {token!r}"
                    )
                entries[token] = label
    except OSError as exc:
        raise IoError(f"cannot read lexicon from {path}: {exc}") from exc
    return LexiconResource(entries=entries, kind=kind, property=prop, name=path)


def save_lexicon_resource(r: LexiconResource, path) -> None:
    """Write a resource TSV (insertion order, labels at full precision)."""
    path = str(path)
    try:
        with open(path, "w", encoding="utf-8") as f:
            for token, label in r.entries.items():
                value = "%d" % label if r.kind == "binary" else "%.17g" % label
                f.write(f"{token}\t{value}\n")
    except OSError as exc:
        raise IoError(f"cannot write lexicon to {path}: {exc}") from exc


def binarize(r: LexiconResource, dead_zone: float = 0.5) -> LexiconResource:
    """Drop entries with |label| <= dead_zone, map the rest to sign.

    Input labels must be continuous in [-1, 1]. The boundary is dropped
    inclusively; flip ``dead_zone`` slightly down to keep boundary words.
    """
    if r.kind != "continuous":
        raise LabelDomainError("binarize expects a continuous resource")
    entries: dict[str, float] = {}
    for token, label in r.entries.items():
        if not -1.0 <= label <= 1.0:
            raise LabelDomainError(
                f"continuous label {label!r} for {token!r} outside [-1, 1]"
            )
        if abs(label) > dead_zone:
            entries[token] = math.copysign(1.0, label)
    if not entries:
        raise EmptyResource(
            f"no labels exceed the dead zone +-{dead_zone} in {r.name or 'resource'}"
        )
    return LexiconResource(
        entries=entries, kind="binary", property=r.property,
        name=f"{r.name}|binarized@{dead_zone:g}" if r.name else f"binarized@{dead_zone:g}",
    )


def frequency_lexicon(
    e: EmbeddingSet,
    top: int = 2000,
    low_start: int = 20000,
    low_end: int = 22000,
) -> LexiconResource:
    """Build a frequency resource from the vocabulary's rank order: +1 for
    the ``top`` most frequent words, -1 for ranks [low_start, low_end)."""
    if top < 1 or low_start < top or low_end <= low_start:
        raise ValueError(
            f"need 1 <= top <= low_start < low_end, got {top}, {low_start}, {low_end}"
        )
    if len(e.words) < low_end:
        raise InsufficientVocabulary(
            f"vocabulary has {len(e.words)} words, need at least {low_end}"
        )
    entries: dict[str, float] = {w: 1.0 for w in e.words[:top]}
    entries.update({w: -1.0 for w in e.words[low_start:low_end]})
    return LexiconResource(
        entries=entries, kind="binary", property="frequency", name="rank-order"
    )


def intersect(r: LexiconResource, e: EmbeddingSet) -> TrainingTable:
    """Resolve resource tokens against the embedding vocabulary.

    Words absent from the vocabulary are dropped (count kept on the table).
    Entries come out in embedding order and are all tagged train.
    """
    if r.kind != "binary":
        raise LabelDomainError("intersect expects a binary resource")
    pairs = sorted(
        (e.index_of(token), label)
        for token, label in r.entries.items()
        if token in e
    )
    dropped = len(r.entries) - len(pairs)
    if dropped:
        logger.info(
            "dropped %d/%d resource words absent from the vocabulary (%s)",
            dropped, len(r.entries), r.name or r.property,
        )
    if not pairs:
        raise EmptyIntersection(
            f"no overlap between resource ({r.name or r.property}) and vocabulary"
        )
    labels = np.array([label for _, label in pairs])
    if not (np.any(labels > 0) and np.any(labels < 0)):
        raise MissingClass("intersection contains only one label class")
    return TrainingTable(
        word_indices=np.array([idx for idx, _ in pairs]),
        labels=labels,
        is_test=np.zeros(len(pairs), dtype=bool),
        dropped=dropped,
    )


def split(t: TrainingTable, test_fraction: float, seed: int) -> TrainingTable:
    """Deterministically tag ceil(test_fraction * n) entries as test.

    The train split must retain both classes or the split is rejected.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    n = len(t)
    n_test = math.ceil(test_fraction * n)
    order = np.random.default_rng(seed).permutation(n)
    is_test = np.zeros(n, dtype=bool)
    is_test[order[:n_test]] = True
    train_labels = t.labels[~is_test]
    if not (np.any(train_labels > 0) and np.any(train_labels < 0)):
        raise MissingClass(
            f"train split lost a label class (test_fraction={test_fraction}, n={n})"
        )
    return replace(t, is_test=is_test)


def subsample_train(t: TrainingTable, size: int, seed) -> TrainingTable:
    """Balanced seeded subsample of the train split; the test split is kept
    as is. ``size`` equal to the full train count returns the table
    unchanged."""
    n_train = int(np.sum(~t.is_test))
    if size > n_train:
        raise MissingClass(f"requested {size} train words but only {n_train} available")
    if size == n_train:
        return t
    per_class = size // 2
    if per_class < 2:
        raise MissingClass(f"subsample of {size} leaves fewer than 2 words per class")
    rng = np.random.default_rng(seed)
    train_pos = np.flatnonzero(~t.is_test & (t.labels > 0))
    train_neg = np.flatnonzero(~t.is_test & (t.labels < 0))
    if per_class > min(len(train_pos), len(train_neg)):
        raise MissingClass(
            f"cannot draw {per_class} words per class from "
            f"{len(train_pos)}+{len(train_neg)} train words"
        )
    keep = np.concatenate([
        np.sort(rng.choice(train_pos, size=per_class, replace=False)),
        np.sort(rng.choice(train_neg, size=per_class, replace=False)),
        np.flatnonzero(t.is_test),
    ])
    keep.sort()
    return TrainingTable(
        word_indices=t.word_indices[keep],
        labels=t.labels[keep],
        is_test=t.is_test[keep],
        dropped=t.dropped,
    )
