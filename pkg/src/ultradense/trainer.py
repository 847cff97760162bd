"""Stochastic gradient descent with per-step SVD reorthogonalization.

Every iteration draws one 'different' and one 'same' batch per subspace,
takes an additive gradient step, and retracts back to the orthogonal group
by replacing the stepped matrix with its nearest orthogonal matrix.
Orthogonal matrices are not closed under addition, so the retraction is the
whole point: without it Q drifts off the manifold immediately. The learning
rate starts high (the early steps behave like random restarts) and decays
geometrically; the cost typically stays flat, then drops steeply once the
rate enters its sweet spot, then flattens.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .embeddings import EmbeddingSet
from .errors import DegenerateMatrix, InvalidDimension, UnknownProperty
from .linalg import nearest_orthogonal, orthogonality_error, random_orthogonal
from .objective import (
    SubspaceSpec,
    check_disjoint,
    multi_gradient,
    multi_loss,
    sample_batch,
)
from .projection import AS_IS, TransformMatrix, orient
from .resources import TrainingTable

logger = logging.getLogger(__name__)

FINAL_ORTHOGONALITY_TOL = 1e-8


@dataclass
class TrainConfig:
    """Hyperparameters of one training run.

    ``deterministic`` is recorded for provenance; gradient accumulation
    order is fixed in this implementation, so seeded runs are always
    reproducible. ``record_orthogonality`` additionally stores the
    per-step orthogonality error (debug mode).
    """

    specs: list[SubspaceSpec]
    batch_size: int = 100
    lr0: float = 5.0
    lr_decay: float = 0.99
    iterations: int = 1000
    seed: int = 0
    deterministic: bool = True
    early_stop: bool = False
    early_stop_window: int = 50
    early_stop_rel_tol: float = 1e-4
    record_orthogonality: bool = False

    def __post_init__(self):
        if not self.specs:
            raise ValueError("at least one subspace spec is required")
        check_disjoint(self.specs)
        if self.lr0 <= 0:
            raise ValueError(f"lr0 must be positive, got {self.lr0}")
        if not 0.0 < self.lr_decay <= 1.0:
            raise ValueError(f"lr_decay must be in (0, 1], got {self.lr_decay}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")


@dataclass
class TrainResult:
    transform: TransformMatrix
    cost_history: np.ndarray
    wall_time: float
    config: TrainConfig
    orthogonality_history: np.ndarray | None = field(default=None, repr=False)


def learning_rate(cfg: TrainConfig, iteration: int) -> float:
    """Geometric schedule: lr0 * lr_decay ** iteration."""
    if iteration < 0:
        raise ValueError(f"iteration must be >= 0, got {iteration}")
    return cfg.lr0 * cfg.lr_decay**iteration


def train(
    cfg: TrainConfig, e: EmbeddingSet, tables: dict[str, TrainingTable]
) -> TrainResult:
    """Learn the orthogonal transformation for all configured subspaces.

    The recorded cost per iteration is the sampled loss of that iteration's
    batches evaluated before the step. Raises DegenerateMatrix (with the
    iteration index) if a step destroys Q.
    """
    for spec in cfg.specs:
        if spec.property not in tables:
            raise UnknownProperty(f"no training table for property {spec.property!r}")
        if max(spec.dims) >= e.dim:
            raise InvalidDimension(
                f"subspace {spec.dims} out of range for {e.dim}-dimensional embeddings"
            )
    start = time.perf_counter()
    q = random_orthogonal(e.dim, cfg.seed)
    # Child stream so batch draws do not replay the initialization stream.
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(1)[0])
    costs: list[float] = []
    orth: list[float] | None = [] if cfg.record_orthogonality else None
    for it in range(cfg.iterations):
        lr = learning_rate(cfg, it)
        batches = [
            (
                sample_batch(tables[s.property], "different", cfg.batch_size, rng),
                sample_batch(tables[s.property], "same", cfg.batch_size, rng),
            )
            for s in cfg.specs
        ]
        costs.append(multi_loss(q, e, cfg.specs, batches))
        step = q - lr * multi_gradient(q, e, cfg.specs, batches)
        try:
            q = nearest_orthogonal(step)
        except DegenerateMatrix as exc:
            raise DegenerateMatrix(
                f"reorthogonalization failed at iteration {it}: {exc}"
            ) from exc
        if orth is not None:
            orth.append(orthogonality_error(q))
        if cfg.early_stop and len(costs) > cfg.early_stop_window:
            ref = costs[-1 - cfg.early_stop_window]
            if abs(costs[-1] - ref) < cfg.early_stop_rel_tol * max(1.0, abs(ref)):
                logger.info("cost plateau at iteration %d, stopping early", it)
                break
    err = orthogonality_error(q)
    if err > FINAL_ORTHOGONALITY_TOL:
        raise DegenerateMatrix(f"final transform drifted off orthogonality ({err:.3e})")
    orientations = {}
    for spec in cfg.specs:
        if len(spec.dims) == 1:
            scores = e.vectors @ q[spec.dims[0]]
            orientations[spec.property] = orient(scores, tables[spec.property])
        else:
            orientations[spec.property] = AS_IS
    transform = TransformMatrix(
        q=q,
        specs=list(cfg.specs),
        orientations=orientations,
        provenance=f"seed={cfg.seed} iterations={len(costs)} lr0={cfg.lr0:g} "
        f"lr_decay={cfg.lr_decay:g} batch_size={cfg.batch_size}",
    )
    wall = time.perf_counter() - start
    logger.info(
        "trained d=%d transform in %.2fs (%d iterations, final cost %.6g)",
        e.dim, wall, len(costs), costs[-1],
    )
    return TrainResult(
        transform=transform,
        cost_history=np.asarray(costs),
        wall_time=wall,
        config=cfg,
        orthogonality_history=None if orth is None else np.asarray(orth),
    )
