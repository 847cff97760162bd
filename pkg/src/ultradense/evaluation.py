"""Rank-correlation evaluation, significance testing, baselines and sweeps.

Kendall's tau is computed with the O(n log n) merge-sort counting algorithm.
The tau-b variant (default) corrects for ties, which matter here twice over:
gold resources contain tied labels, and out-of-vocabulary words are all
predicted as the same neutral 0.0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .embeddings import EmbeddingSet
from .errors import (
    DegenerateInput,
    InvalidDimension,
    InvalidValue,
    MissingClass,
    UndefinedCorrelation,
)
from .projection import (
    OutputLexicon,
    apply_orientation,
    fit_linear_map,
    project,
    score_word,
)
from .resources import TrainingTable, subsample_train
from .trainer import TrainConfig, train

logger = logging.getLogger(__name__)

TAU_VARIANTS = ("tau_a", "tau_b")
SWEEP_METHODS = ("ultradense", "pca", "random")


@dataclass
class EvalReport:
    """Evaluation outcome for one lexicon against one gold standard."""

    property: str
    n: int
    tau: float
    coverage: float
    method: str = "ultradense"
    baselines: dict[str, float] | None = None

    def tsv_row(self) -> str:
        return (
            f"{self.property}\t{self.n}\t{self.tau:.6f}\t"
            f"{self.coverage:.6f}\t{self.method}"
        )


# -- Kendall's tau ---------------------------------------------------------

def kendall_tau(x: Sequence[float], y: Sequence[float], variant: str = "tau_b") -> float:
    """Rank correlation between two equally long lists.

    tau_b = (C - D) / sqrt((C + D + Tx)(C + D + Ty)) where C/D count
    concordant/discordant pairs and Tx/Ty pairs tied in exactly one list.
    tau_a divides C - D by the total pair count and requires both lists to
    be non-constant.
    """
    if variant not in TAU_VARIANTS:
        raise ValueError(f"variant must be one of {TAU_VARIANTS}, got {variant!r}")
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    n = len(xs)
    if len(ys) != n:
        raise ValueError(f"length mismatch: {n} vs {len(ys)}")
    if n < 2:
        raise ValueError(f"need at least 2 observations, got {n}")
    if not all(map(math.isfinite, xs)) or not all(map(math.isfinite, ys)):
        raise InvalidValue("inputs to kendall_tau must be finite")

    order = sorted(range(n), key=lambda i: (xs[i], ys[i]))
    x_sorted = [xs[i] for i in order]
    y_by_x = [ys[i] for i in order]
    n0 = n * (n - 1) // 2
    n1 = _tie_pairs(x_sorted)
    n3 = _tie_pairs(list(zip(x_sorted, y_by_x)))
    swaps = _count_inversions(y_by_x)
    n2 = _tie_pairs(sorted(ys))
    con_minus_dis = n0 - n1 - n2 + n3 - 2 * swaps

    if variant == "tau_a":
        if n1 == n0 or n2 == n0:
            raise UndefinedCorrelation("tau_a is undefined for a constant list")
        return con_minus_dis / n0
    denom = math.sqrt((n0 - n1) * (n0 - n2))
    if denom == 0.0:
        raise UndefinedCorrelation("tau_b is undefined when one list is all ties")
    return con_minus_dis / denom


def _tie_pairs(sorted_values) -> int:
    """Sum of t*(t-1)/2 over runs of equal values in a sorted list."""
    total = 0
    run = 1
    for prev, cur in zip(sorted_values, sorted_values[1:]):
        if cur == prev:
            run += 1
        else:
            total += run * (run - 1) // 2
            run = 1
    return total + run * (run - 1) // 2


def _count_inversions(values: list[float]) -> int:
    """Strict inversions (i < j with values[i] > values[j]) via bottom-up
    merge sort; ties are kept stable and not counted."""
    values = list(values)
    n = len(values)
    tmp = [0.0] * n
    swaps = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if values[j] < values[i]:
                    tmp[k] = values[j]
                    j += 1
                    swaps += mid - i
                else:
                    tmp[k] = values[i]
                    i += 1
                k += 1
            while i < mid:
                tmp[k] = values[i]
                i += 1
                k += 1
            while j < hi:
                tmp[k] = values[j]
                j += 1
                k += 1
            values[lo:hi] = tmp[lo:hi]
        width *= 2
    return swaps


# -- lexicon evaluation ----------------------------------------------------

def evaluate(
    lex: OutputLexicon,
    test: Sequence[tuple[str, float]],
    variant: str = "tau_b",
    method: str = "ultradense",
) -> EvalReport:
    """Kendall's tau between gold values and lexicon scores over all test
    words; out-of-vocabulary words score neutral 0.0 and count against
    coverage."""
    if len(test) < 2:
        raise ValueError(f"need at least 2 test words, got {len(test)}")
    gold = [float(g) for _, g in test]
    preds = [score_word(lex, token) for token, _ in test]
    found = sum(1 for token, _ in test if token in lex._scores)
    tau = kendall_tau(gold, preds, variant)
    return EvalReport(
        property=lex.property,
        n=len(test),
        tau=tau,
        coverage=found / len(test),
        method=method,
    )


@dataclass
class ComparisonResult:
    significant: bool
    p_value: float
    z: float


def fisher_z_compare(
    tau1: float, n1: int, tau2: float, n2: int, alpha: float = 0.05
) -> ComparisonResult:
    """Two-sided z-test for a difference between two correlations.

    Both correlations are Fisher-transformed (atanh) and compared with
    variance 1/(n-3) per sample. That variance convention is the classical
    one for Pearson's r; applied to Kendall's tau it is an approximation,
    reported as such.
    """
    for tau, n in ((tau1, n1), (tau2, n2)):
        if abs(tau) >= 1.0:
            raise DegenerateInput(f"|tau| must be < 1, got {tau}")
        if n < 4:
            raise DegenerateInput(f"need n >= 4 per sample, got {n}")
    se = math.sqrt(1.0 / (n1 - 3) + 1.0 / (n2 - 3))
    z = (math.atanh(tau1) - math.atanh(tau2)) / se
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return ComparisonResult(significant=p < alpha, p_value=p, z=z)


# -- baseline subspaces ----------------------------------------------------

def pca_subspace(e: EmbeddingSet, d_sub: int) -> np.ndarray:
    """Top principal directions of the mean-centered embedding matrix as a
    (d_sub, d) projection with orthonormal rows."""
    if not 1 <= d_sub <= e.dim:
        raise InvalidDimension(f"d_sub must be in [1, {e.dim}], got {d_sub}")
    if len(e.words) <= e.dim:
        raise ValueError(
            f"PCA needs more words than dimensions ({len(e.words)} <= {e.dim})"
        )
    centered = e.vectors - e.vectors.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    return vt[:d_sub].copy()


def random_subspace(d: int, d_sub: int) -> np.ndarray:
    """Selector of the first d_sub original coordinates."""
    if not 1 <= d_sub <= d:
        raise InvalidDimension(f"d_sub must be in [1, {d}], got {d_sub}")
    return np.eye(d)[:d_sub].copy()


# -- sweep experiments -----------------------------------------------------

def _test_gold(table: TrainingTable, e: EmbeddingSet, gold) -> np.ndarray:
    if gold is None:
        return table.test_labels.astype(np.float64)
    return np.array([float(gold[e.words[i]]) for i in table.test_word_indices])


def _scalar_scores(reps: np.ndarray, table: TrainingTable) -> np.ndarray:
    """Reduce per-word representations to a scalar scale fitted on the train
    split."""
    train_rows = table.train_word_indices
    lm = fit_linear_map(reps[train_rows], table.train_labels.astype(np.float64))
    return lm(reps)


def sweep_subspace_size(
    e: EmbeddingSet,
    table: TrainingTable,
    sizes: Sequence[int],
    method: str,
    cfg: TrainConfig,
    gold: Mapping[str, float] | None = None,
) -> list[tuple[int, float]]:
    """Kendall's tau on the test split as a function of subspace size.

    method 'ultradense' retrains the transformation per size (subspace =
    first d_sub indices; sizes above one are reduced with a fitted linear
    map); 'pca' and 'random' project onto baseline subspaces and always fit
    the linear map. The same training seed is reused for every point, so
    curves differ only in the swept size. ``gold`` may supply continuous
    per-word gold values; by default the table's test labels are the gold.
    """
    if method not in SWEEP_METHODS:
        raise ValueError(f"method must be one of {SWEEP_METHODS}, got {method!r}")
    if len(cfg.specs) != 1:
        raise ValueError("subspace-size sweeps use exactly one subspace spec")
    base = cfg.specs[0]
    gold_values = _test_gold(table, e, gold)
    test_rows = table.test_word_indices
    curve: list[tuple[int, float]] = []
    for size in sizes:
        if not 1 <= size <= e.dim:
            raise InvalidDimension(f"subspace size {size} out of range for d={e.dim}")
        if method == "ultradense":
            spec = replace(base, dims=tuple(range(size)))
            result = train(replace(cfg, specs=[spec]), e, {spec.property: table})
            reps = project(e, result.transform, spec.property)
            if size == 1:
                scores = apply_orientation(
                    reps[:, 0], result.transform.orientation_for(spec.property)
                )
            else:
                scores = _scalar_scores(reps, table)
        else:
            proj = pca_subspace(e, size) if method == "pca" else random_subspace(e.dim, size)
            scores = _scalar_scores(e.vectors @ proj.T, table)
        tau = kendall_tau(gold_values, scores[test_rows])
        curve.append((int(size), float(tau)))
        logger.info("sweep %s size=%d tau=%.4f", method, size, tau)
    return curve


def sweep_resource_size(
    e: EmbeddingSet,
    table: TrainingTable,
    train_sizes: Sequence[int],
    cfg: TrainConfig,
    subsample_seed: int = 0,
    gold: Mapping[str, float] | None = None,
) -> list[tuple[int, float]]:
    """Kendall's tau on the fixed test split as a function of train-resource
    size; each point retrains on a balanced seeded subsample with the same
    training seed."""
    if len(cfg.specs) != 1:
        raise ValueError("resource-size sweeps use exactly one subspace spec")
    spec = cfg.specs[0]
    gold_values = _test_gold(table, e, gold)
    test_rows = table.test_word_indices
    curve: list[tuple[int, float]] = []
    for size in train_sizes:
        sub = subsample_train(table, int(size), seed=[subsample_seed, int(size)])
        if not (np.any(sub.train_labels > 0) and np.any(sub.train_labels < 0)):
            raise MissingClass(f"subsample of {size} train words lost a class")
        result = train(cfg, e, {spec.property: sub})
        reps = project(e, result.transform, spec.property)
        if len(spec.dims) == 1:
            scores = apply_orientation(
                reps[:, 0], result.transform.orientation_for(spec.property)
            )
        else:
            scores = _scalar_scores(reps, sub)
        tau = kendall_tau(gold_values, scores[test_rows])
        curve.append((int(size), float(tau)))
        logger.info("sweep resource size=%d tau=%.4f", size, tau)
    return curve


def curve_tsv(curve: Sequence[tuple[int, float]]) -> str:
    """Serialize a sweep curve as 'size<TAB>tau' rows."""
    return "".join(f"{size}\t{tau:.6f}\n" for size, tau in curve)
