"""Ultradense projections and output lexicons.

A trained transformation is a d x d orthogonal matrix plus the subspace
assignment per lexical property. Projecting selects the subspace rows of
Q e_w; a one-dimensional subspace yields the word's score directly, larger
subspaces are reduced to a scalar with a least-squares linear map. Because
the training objective is sign-symmetric, scores are calibrated so the
positive train class averages higher ("orientation").
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .embeddings import EmbeddingSet
from .errors import (
    DimensionMismatch,
    DuplicateWord,
    InvalidDimension,
    InvalidMatrix,
    InvalidValue,
    IoError,
    MissingClass,
    NeedsLinearMap,
    ParseError,
    UnknownProperty,
)
from .linalg import orthogonality_error
from .objective import SubspaceSpec, check_disjoint
from .resources import TrainingTable

logger = logging.getLogger(__name__)

ORTHOGONALITY_TOL = 1e-8
AS_IS = "as-is"
FLIPPED = "flipped"
ORIENTATIONS = (AS_IS, FLIPPED)

TRANSFORM_MAGIC = "ULTRADENSE"
TRANSFORM_VERSION = 1


@dataclass(eq=False)
class TransformMatrix:
    """An orthogonal transformation with its subspace index sets, per-property
    orientation flags and provenance."""

    q: np.ndarray
    specs: list[SubspaceSpec]
    orientations: dict[str, str] = field(default_factory=dict)
    provenance: str = ""

    def __post_init__(self):
        self.q = np.ascontiguousarray(self.q, dtype=np.float64)
        if self.q.ndim != 2 or self.q.shape[0] != self.q.shape[1]:
            raise InvalidMatrix(f"transform must be square, got shape {self.q.shape}")
        err = orthogonality_error(self.q)
        if err > ORTHOGONALITY_TOL:
            raise InvalidMatrix(
                f"transform is not orthogonal (||Q'Q - I||_F = {err:.3e})"
            )
        check_disjoint(self.specs)
        for spec in self.specs:
            if max(spec.dims) >= self.dim:
                raise InvalidDimension(
                    f"subspace {spec.dims} out of range for d={self.dim}"
                )
        for prop, orientation in self.orientations.items():
            if orientation not in ORIENTATIONS:
                raise ValueError(f"bad orientation {orientation!r} for {prop!r}")
        self.q.setflags(write=False)

    @property
    def dim(self) -> int:
        return int(self.q.shape[0])

    def spec_for(self, prop: str) -> SubspaceSpec:
        for spec in self.specs:
            if spec.property == prop:
                return spec
        raise UnknownProperty(
            f"transform has no subspace for {prop!r} "
            f"(has: {[s.property for s in self.specs]})"
        )

    def orientation_for(self, prop: str) -> str:
        self.spec_for(prop)
        return self.orientations.get(prop, AS_IS)


@dataclass(eq=False)
class OutputLexicon:
    """Full-vocabulary word scores, sorted descending (ties by token)."""

    entries: list[tuple[str, float]]
    property: str = "other"
    orientation: str = AS_IS

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"bad orientation {self.orientation!r}")
        self._scores = {token: float(score) for token, score in self.entries}
        if len(self._scores) != len(self.entries):
            raise DuplicateWord("output lexicon has repeated tokens")
        for token, score in self._scores.items():
            if not math.isfinite(score):
                raise InvalidValue(f"non-finite score for token {token!r}")
        self.entries = sorted(self.entries, key=lambda kv: (-kv[1], kv[0]))

    def __len__(self) -> int:
        return len(self.entries)

    def score(self, token: str) -> float:
        return self._scores.get(token, 0.0)


def score_word(lex: OutputLexicon, token: str) -> float:
    """Stored score, or 0.0 (neutral) for out-of-vocabulary tokens."""
    return lex.score(token)


def project(e: EmbeddingSet, t: TransformMatrix, prop: str) -> np.ndarray:
    """Per-word subspace representations (Q e_w restricted to the property's
    dimensions), one row per vocabulary word in order."""
    spec = t.spec_for(prop)
    if t.dim != e.dim:
        raise DimensionMismatch(
            f"transform is {t.dim}-dimensional but embeddings are {e.dim}-dimensional"
        )
    return e.vectors @ t.q[np.asarray(spec.dims, dtype=np.intp)].T


def orient(scores: np.ndarray, table: TrainingTable) -> str:
    """Pick the sign making the positive train class average at least as
    high as the negative one. Ties keep the raw sign."""
    scores = np.asarray(scores, dtype=np.float64)
    train_idx = table.train_word_indices
    train_lab = table.train_labels
    pos = scores[train_idx[train_lab > 0]]
    neg = scores[train_idx[train_lab < 0]]
    if len(pos) == 0 or len(neg) == 0:
        raise MissingClass("orientation needs both classes in the train split")
    return FLIPPED if pos.mean() < neg.mean() else AS_IS


def apply_orientation(scores: np.ndarray, orientation: str) -> np.ndarray:
    if orientation not in ORIENTATIONS:
        raise ValueError(f"bad orientation {orientation!r}")
    return -scores if orientation == FLIPPED else +scores


@dataclass
class LinearMap:
    """Affine reduction of a d*-dimensional subspace to a scalar scale."""

    weights: np.ndarray
    bias: float
    rank: int

    @property
    def rank_deficient(self) -> bool:
        return self.rank < len(self.weights)

    def __call__(self, reps: np.ndarray) -> np.ndarray:
        reps = np.atleast_2d(np.asarray(reps, dtype=np.float64))
        return reps @ self.weights + self.bias


def fit_linear_map(reps: np.ndarray, labels: np.ndarray) -> LinearMap:
    """Least-squares fit of ``w . u + b`` to the labels.

    A rank-deficient design falls back to the minimum-norm solution and is
    reported on the result (and logged). Fitting is done on mean-centered
    features, so constant features get weight zero rather than absorbing
    the intercept.
    """
    reps = np.asarray(reps, dtype=np.float64)
    if reps.ndim == 1:
        reps = reps[:, None]
    labels = np.asarray(labels, dtype=np.float64)
    n, k = reps.shape
    if len(labels) != n:
        raise ValueError(f"{n} representations but {len(labels)} labels")
    if n < k + 1:
        raise ValueError(f"need at least {k + 1} points to fit a {k}-dim map, got {n}")
    center = reps.mean(axis=0)
    label_mean = labels.mean()
    w, _, rank, _ = np.linalg.lstsq(reps - center, labels - label_mean, rcond=None)
    if rank < k:
        logger.warning(
            "rank-deficient design (rank %d < %d); using minimum-norm solution", rank, k
        )
    return LinearMap(weights=w, bias=float(label_mean - center @ w), rank=int(rank))


def emit_lexicon(
    e: EmbeddingSet,
    t: TransformMatrix,
    prop: str,
    orientation: str | None = None,
    linear_map: LinearMap | None = None,
) -> OutputLexicon:
    """Score every vocabulary word on the property's subspace.

    One-dimensional subspaces use the raw projected coordinate; larger ones
    require a fitted :class:`LinearMap`. ``orientation`` defaults to the
    flag stored on the transform.
    """
    spec = t.spec_for(prop)
    reps = project(e, t, prop)
    if len(spec.dims) == 1:
        raw = reps[:, 0]
    else:
        if linear_map is None:
            raise NeedsLinearMap(
                f"subspace for {prop!r} has {len(spec.dims)} dimensions; "
                "fit a linear map to emit scalar scores"
            )
        raw = linear_map(reps)
    if orientation is None:
        orientation = t.orientation_for(prop)
    scores = apply_orientation(raw, orientation)
    entries = list(zip(e.words, (float(s) for s in scores)))
    return OutputLexicon(entries=entries, property=prop, orientation=orientation)


# -- serialization --------------------------------------------------------

def save_output_lexicon(lex: OutputLexicon, path) -> None:
    """Write ``token<TAB>score`` lines, scores at 6 significant digits,
    sorted descending."""
    path = str(path)
    try:
        with open(path, "w", encoding="utf-8") as f:
            for token, score in lex.entries:
                f.write(f"{token}\t{score:.6g}\n")
    except OSError as exc:
        raise IoError(f"cannot write lexicon to {path}: {exc}") from exc


def load_output_lexicon(path, prop: str = "other") -> OutputLexicon:
    """Read a ``token<TAB>score`` lexicon file ('#' comment lines ignored)."""
    path = str(path)
    entries: list[tuple[str, float]] = []
    try:
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ParseError(
                        f"{path}:{lineno}: expected 'token<TAB>score', got {len(parts)} fields"
                    )
                try:
                    entries.append((parts[0], float(parts[1])))
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: unparsable score {parts[1]!r}") from None
    except OSError as exc:
        raise IoError(f"cannot read lexicon from {path}: {exc}") from exc
    return OutputLexicon(entries=entries, property=prop)


def save_transform(t: TransformMatrix, path) -> None:
    """Write the transform file: magic+version, dimension, per-property
    subspace dims, orientation flags, then Q row-major at 17 significant
    digits (exact float64 round-trip)."""
    path = str(path)
    dims_line = ";".join(
        f"{s.property}:{','.join(str(i) for i in s.dims)}" for s in t.specs
    )
    orient_line = ";".join(
        f"{s.property}:{t.orientations.get(s.property, AS_IS)}" for s in t.specs
    )
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"{TRANSFORM_MAGIC} {TRANSFORM_VERSION}\n")
            f.write(f"{t.dim}\n")
            f.write(dims_line + "\n")
            f.write(orient_line + "\n")
            for row in t.q:
                f.write(" ".join("%.17g" % v for v in row) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write transform to {path}: {exc}") from exc


def load_transform(path) -> TransformMatrix:
    """Read a transform file written by :func:`save_transform`.

    Subspace weights (alpha) are training-time parameters and are not stored
    in the file; loaded specs carry the neutral default.
    """
    path = str(path)
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read transform from {path}: {exc}") from exc
    if len(lines) < 4:
        raise ParseError(f"{path}: transform file has fewer than 4 header lines")
    magic = lines[0].split()
    if len(magic) != 2 or magic[0] != TRANSFORM_MAGIC:
        raise ParseError(f"{path}:1: bad magic line {lines[0]!r}")
    if magic[1] != str(TRANSFORM_VERSION):
        raise ParseError(f"{path}:1: unsupported version {magic[1]!r}")
    try:
        d = int(lines[1])
    except ValueError:
        raise ParseError(f"{path}:2: bad dimension {lines[1]!r}") from None
    if d < 1:
        raise ParseError(f"{path}:2: bad dimension {d}")
    specs = []
    for part in _split_fields(lines[2], path, 3):
        prop, _, idxs = part.partition(":")
        try:
            dims = tuple(int(i) for i in idxs.split(","))
        except ValueError:
            raise ParseError(f"{path}:3: bad subspace field {part!r}") from None
        specs.append(SubspaceSpec(property=prop, dims=dims))
    orientations = {}
    for part in _split_fields(lines[3], path, 4):
        prop, _, orientation = part.partition(":")
        if orientation not in ORIENTATIONS:
            raise ParseError(f"{path}:4: bad orientation field {part!r}")
        orientations[prop] = orientation
    if len(lines) < 4 + d:
        raise ParseError(f"{path}: expected {d} matrix rows, found {len(lines) - 4}")
    q = np.empty((d, d))
    for i in range(d):
        fields = lines[4 + i].split()
        if len(fields) != d:
            raise ParseError(f"{path}:{5 + i}: expected {d} values, got {len(fields)}")
        try:
            q[i] = [float(v) for v in fields]
        except ValueError as exc:
            raise ParseError(f"{path}:{5 + i}: {exc}") from None
    return TransformMatrix(
        q=q, specs=specs, orientations=orientations, provenance=f"loaded from {path}"
    )


def _split_fields(line: str, path: str, lineno: int) -> list[str]:
    parts = [p for p in line.split(";") if p]
    if not parts or any(":" not in p for p in parts):
        raise ParseError(f"{path}:{lineno}: expected ';'-separated 'name:value' fields")
    return parts
