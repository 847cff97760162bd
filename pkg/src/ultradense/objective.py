"""The separation/alignment objective on ultradense subspaces.

For a subspace with dimension set D and weight alpha, the sampled loss over
a batch of differently-labeled pairs and a batch of same-labeled pairs is

    alpha * mean(-||(Q (e_w - e_v))[D]||)  +  (1 - alpha) * mean(||(Q (e_w - e_v))[D]||)

i.e. differently-labeled words are pushed apart inside the subspace and
same-labeled words pulled together. Both sums are normalized by their batch
size so alpha keeps the same meaning across batch sizes. The gradient with
respect to Q is exact: a pair with difference vector delta and subspace image
y contributes (y/||y||) outer delta into the rows D, and zero at the
||y|| = 0 kink (a valid subgradient).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embeddings import EmbeddingSet
from .errors import InvalidDimension, MissingClass, OverlappingSubspaces
from .resources import TrainingTable

# Subspace images shorter than this contribute nothing to the gradient.
KINK_TOL = 1e-12

GROUPS = ("different", "same")


@dataclass(frozen=True)
class SubspaceSpec:
    """A lexical property, the subspace dimensions carrying it, and the
    separation-vs-alignment weight alpha."""

    property: str
    dims: tuple[int, ...]
    alpha: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(i) for i in self.dims))
        if not self.dims:
            raise InvalidDimension(f"subspace for {self.property!r} has no dimensions")
        if len(set(self.dims)) != len(self.dims):
            raise InvalidDimension(f"repeated dimensions in {self.dims}")
        if min(self.dims) < 0:
            raise InvalidDimension(f"negative dimension index in {self.dims}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")


@dataclass(eq=False)
class PairBatch:
    """Index pairs (v, w) into an embedding set, all drawn from one group:
    'different' pairs have opposite labels, 'same' pairs equal labels."""

    v: np.ndarray
    w: np.ndarray
    group: str

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=np.int64)
        self.w = np.asarray(self.w, dtype=np.int64)
        if self.v.shape != self.w.shape or self.v.ndim != 1:
            raise ValueError("v and w must be parallel 1-d index arrays")
        if self.group not in GROUPS:
            raise ValueError(f"group must be one of {GROUPS}, got {self.group!r}")
        if np.any(self.v == self.w):
            raise ValueError("a pair may not repeat the same word")

    def __len__(self) -> int:
        return len(self.v)


def sample_batch(
    t: TrainingTable, group: str, batch_size: int, rng: np.random.Generator
) -> PairBatch:
    """Draw ``batch_size`` pairs uniformly with replacement from the train
    split's implied pair set (all opposite-label pairs for 'different', the
    union of both classes' within-class pairs for 'same')."""
    if group not in GROUPS:
        raise ValueError(f"group must be one of {GROUPS}, got {group!r}")
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    train_idx = t.train_word_indices
    train_lab = t.train_labels
    pos = train_idx[train_lab > 0]
    neg = train_idx[train_lab < 0]
    if group == "different":
        if len(pos) == 0 or len(neg) == 0:
            raise MissingClass("'different' pairs need both label classes in train")
        a = rng.choice(pos, size=batch_size)
        b = rng.choice(neg, size=batch_size)
        flip = rng.random(batch_size) < 0.5
        return PairBatch(v=np.where(flip, b, a), w=np.where(flip, a, b), group=group)
    pair_counts = np.array(
        [len(pos) * (len(pos) - 1) // 2, len(neg) * (len(neg) - 1) // 2], dtype=float
    )
    if pair_counts.sum() == 0:
        raise MissingClass("'same' pairs need a class with at least two train words")
    which = rng.choice(2, size=batch_size, p=pair_counts / pair_counts.sum())
    v = np.empty(batch_size, dtype=np.int64)
    w = np.empty(batch_size, dtype=np.int64)
    for cls, members in ((0, pos), (1, neg)):
        mask = which == cls
        k = int(mask.sum())
        if k == 0:
            continue
        first = rng.integers(0, len(members), size=k)
        second = rng.integers(0, len(members) - 1, size=k)
        second = np.where(second >= first, second + 1, second)
        v[mask] = members[first]
        w[mask] = members[second]
    return PairBatch(v=v, w=w, group="same")


def _subspace_norms(q: np.ndarray, e: EmbeddingSet, dims: np.ndarray, batch: PairBatch):
    delta = e.vectors[batch.w] - e.vectors[batch.v]
    y = delta @ q[dims].T
    return delta, y, np.linalg.norm(y, axis=1)


def _check_dims(spec: SubspaceSpec, d: int) -> np.ndarray:
    if max(spec.dims) >= d:
        raise InvalidDimension(
            f"subspace dimension {max(spec.dims)} out of range for d={d}"
        )
    return np.asarray(spec.dims, dtype=np.intp)


def loss(
    q: np.ndarray,
    e: EmbeddingSet,
    spec: SubspaceSpec,
    diff: PairBatch,
    same: PairBatch,
) -> float:
    """Batch-normalized separation/alignment loss; lower is better."""
    q = np.asarray(q, dtype=np.float64)
    dims = _check_dims(spec, e.dim)
    _require_groups(diff, same)
    total = 0.0
    if len(diff):
        _, _, norms = _subspace_norms(q, e, dims, diff)
        total -= spec.alpha * float(norms.mean())
    if len(same):
        _, _, norms = _subspace_norms(q, e, dims, same)
        total += (1.0 - spec.alpha) * float(norms.mean())
    return total


def gradient(
    q: np.ndarray,
    e: EmbeddingSet,
    spec: SubspaceSpec,
    diff: PairBatch,
    same: PairBatch,
) -> np.ndarray:
    """Exact d x d gradient of :func:`loss` with respect to Q.

    Only the rows in ``spec.dims`` are nonzero. Pairs whose subspace image
    is shorter than KINK_TOL contribute zero.
    """
    q = np.asarray(q, dtype=np.float64)
    dims = _check_dims(spec, e.dim)
    _require_groups(diff, same)
    g = np.zeros((e.dim, e.dim))
    for batch, coef in ((diff, -spec.alpha), (same, 1.0 - spec.alpha)):
        if not len(batch):
            continue
        delta, y, norms = _subspace_norms(q, e, dims, batch)
        safe = norms > KINK_TOL
        if not np.any(safe):
            continue
        yhat = np.zeros_like(y)
        yhat[safe] = y[safe] / norms[safe, None]
        g[dims] += (coef / len(batch)) * (yhat.T @ delta)
    return g


def _require_groups(diff: PairBatch, same: PairBatch) -> None:
    if diff.group != "different" or same.group != "same":
        raise ValueError("pass the 'different' batch first and the 'same' batch second")


def check_disjoint(specs: Sequence[SubspaceSpec]) -> None:
    """Reject configurations whose subspaces share a dimension."""
    seen: dict[int, str] = {}
    for spec in specs:
        for idx in spec.dims:
            if idx in seen:
                raise OverlappingSubspaces(
                    f"dimension {idx} assigned to both {seen[idx]!r} and {spec.property!r}"
                )
            seen[idx] = spec.property


def multi_loss(
    q: np.ndarray,
    e: EmbeddingSet,
    specs: Sequence[SubspaceSpec],
    batches: Sequence[tuple[PairBatch, PairBatch]],
) -> float:
    """Sum of per-subspace losses over disjoint subspaces."""
    _check_multi(specs, batches)
    return sum(loss(q, e, s, d, m) for s, (d, m) in zip(specs, batches))


def multi_gradient(
    q: np.ndarray,
    e: EmbeddingSet,
    specs: Sequence[SubspaceSpec],
    batches: Sequence[tuple[PairBatch, PairBatch]],
) -> np.ndarray:
    """Sum of per-subspace gradients over disjoint subspaces."""
    _check_multi(specs, batches)
    g = np.zeros((e.dim, e.dim))
    for spec, (diff, same) in zip(specs, batches):
        g += gradient(q, e, spec, diff, same)
    return g


def _check_multi(specs, batches) -> None:
    if len(specs) != len(batches):
        raise ValueError(f"{len(specs)} specs but {len(batches)} batch pairs")
    check_disjoint(specs)
