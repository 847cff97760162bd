"""Flat key=value experiment configuration.

The file format is deliberately primitive so any tooling can parse it:
one ``key = value`` per line, '#' starts a comment, no sections or nesting.
Per-property keys use a dotted suffix, e.g. ``resource.sentiment``. Paths
are resolved relative to the config file. The special resource value
``rank-order`` synthesizes the frequency resource from the vocabulary's
frequency ranks instead of reading a file.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, IoError
from .objective import SubspaceSpec, check_disjoint
from .trainer import TrainConfig

DEFAULT_DIMS = {"sentiment": (0,), "concreteness": (10,), "frequency": (20,)}
DEFAULT_ALPHA = 0.4
RANK_ORDER = "rank-order"

_SCALARS = {
    "embeddings": str,
    "embeddings_format": str,
    "top_k": int,
    "test_fraction": float,
    "seed": int,
    "deterministic": bool,
    "normalize": bool,
    "out_dir": str,
    "batch_size": int,
    "lr0": float,
    "lr_decay": float,
    "iterations": int,
    "freq_top": int,
    "freq_low_start": int,
    "freq_low_end": int,
}
_PROPERTY_KEYS = {
    "resource": str,
    "resource_kind": str,
    "dims": "dims",
    "alpha": float,
    "dead_zone": float,
}


@dataclass
class PropertySetup:
    """Resource and subspace assignment for one lexical property."""

    property: str
    resource: str
    kind: str = "binary"
    dims: tuple[int, ...] = ()
    alpha: float = DEFAULT_ALPHA
    dead_zone: float = 0.5

    def spec(self) -> SubspaceSpec:
        return SubspaceSpec(property=self.property, dims=self.dims, alpha=self.alpha)


@dataclass
class ExperimentConfig:
    embeddings: str
    properties: list[PropertySetup]
    embeddings_format: str = "text"
    top_k: int = 80000
    test_fraction: float = 0.1
    seed: int = 0
    deterministic: bool = True
    normalize: bool = False
    out_dir: str = "out"
    batch_size: int = 100
    lr0: float = 5.0
    lr_decay: float = 0.99
    iterations: int = 1000
    freq_top: int = 2000
    freq_low_start: int = 20000
    freq_low_end: int = 22000
    source: str = field(default="", repr=False)

    def validate(self) -> None:
        if self.embeddings_format not in ("text", "binary"):
            raise ConfigError(f"unknown embeddings_format {self.embeddings_format!r}")
        if not self.properties:
            raise ConfigError("config defines no properties (resource.<property> keys)")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError(f"test_fraction must be in (0, 1), got {self.test_fraction}")
        if self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {self.top_k}")
        for p in self.properties:
            if p.kind not in ("binary", "continuous"):
                raise ConfigError(f"resource_kind.{p.property} must be binary or continuous")
            if not 0.0 <= p.alpha <= 1.0:
                raise ConfigError(f"alpha.{p.property} must be in [0, 1], got {p.alpha}")
            if not p.dims:
                raise ConfigError(
                    f"no subspace dims for {p.property!r}; set dims.{p.property}"
                )
        check_disjoint([p.spec() for p in self.properties])
        if not os.path.exists(self.embeddings):
            raise IoError(f"embedding file does not exist: {self.embeddings}")
        for p in self.properties:
            if p.resource != RANK_ORDER and not os.path.exists(p.resource):
                raise IoError(
                    f"resource file for {p.property!r} does not exist: {p.resource}"
                )

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            specs=[p.spec() for p in self.properties],
            batch_size=self.batch_size,
            lr0=self.lr0,
            lr_decay=self.lr_decay,
            iterations=self.iterations,
            seed=self.seed,
            deterministic=self.deterministic,
        )

    def echo(self) -> str:
        """Reproducible key=value rendition of the resolved configuration."""
        lines = [
            f"embeddings = {self.embeddings}",
            f"embeddings_format = {self.embeddings_format}",
            f"top_k = {self.top_k}",
            f"test_fraction = {self.test_fraction:g}",
            f"seed = {self.seed}",
            f"deterministic = {str(self.deterministic).lower()}",
            f"normalize = {str(self.normalize).lower()}",
            f"out_dir = {self.out_dir}",
            f"batch_size = {self.batch_size}",
            f"lr0 = {self.lr0:g}",
            f"lr_decay = {self.lr_decay:g}",
            f"iterations = {self.iterations}",
            f"freq_top = {self.freq_top}",
            f"freq_low_start = {self.freq_low_start}",
            f"freq_low_end = {self.freq_low_end}",
        ]
        for p in sorted(self.properties, key=lambda p: p.property):
            lines.append(f"resource.{p.property} = {p.resource}")
            lines.append(f"resource_kind.{p.property} = {p.kind}")
            lines.append(f"dims.{p.property} = {','.join(map(str, p.dims))}")
            lines.append(f"alpha.{p.property} = {p.alpha:g}")
            lines.append(f"dead_zone.{p.property} = {p.dead_zone:g}")
        return "\n".join(lines) + "\n"


def parse_key_values(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse ``key = value`` lines; '#' comments and blank lines ignored."""
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"{source}:{lineno}: empty key or value in {raw!r}")
        if key in pairs:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


def _convert(key: str, value: str, target, source: str):
    if target is bool:
        lowered = value.lower()
        if lowered in ("true", "yes", "1", "on"):
            return True
        if lowered in ("false", "no", "0", "off"):
            return False
        raise ConfigError(f"{source}: {key} must be a boolean, got {value!r}")
    if target == "dims":
        try:
            return tuple(int(v) for v in value.split(","))
        except ValueError:
            raise ConfigError(f"{source}: {key} must be comma-separated ints, got {value!r}") from None
    try:
        return target(value)
    except ValueError:
        raise ConfigError(
            f"{source}: {key} must be a {target.__name__}, got {value!r}"
        ) from None


def load_experiment_config(path) -> ExperimentConfig:
    """Parse and validate a config file; relative paths are resolved against
    the file's directory."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read config from {path}: {exc}") from exc
    pairs = parse_key_values(text, source=str(path))
    return build_experiment_config(pairs, base_dir=path.parent, source=str(path))


def build_experiment_config(
    pairs: dict[str, str], base_dir=".", source: str = "<config>"
) -> ExperimentConfig:
    base_dir = Path(base_dir)
    scalars: dict = {}
    per_property: dict[str, dict] = {}
    for key, value in pairs.items():
        if key in _SCALARS:
            scalars[key] = _convert(key, value, _SCALARS[key], source)
            continue
        head, _, prop = key.partition(".")
        if prop and head in _PROPERTY_KEYS:
            per_property.setdefault(prop, {})[head] = _convert(
                key, value, _PROPERTY_KEYS[head], source
            )
            continue
        raise ConfigError(f"{source}: unknown key {key!r}")
    if "embeddings" not in scalars:
        raise ConfigError(f"{source}: missing required key 'embeddings'")

    properties = []
    for prop, kv in sorted(per_property.items()):
        if "resource" not in kv:
            raise ConfigError(f"{source}: property {prop!r} has no resource.{prop} key")
        resource = kv["resource"]
        if resource != RANK_ORDER:
            resource = str(_resolve(base_dir, resource))
        dims = kv.get("dims", DEFAULT_DIMS.get(prop))
        if dims is None:
            raise ConfigError(
                f"{source}: no default subspace for {prop!r}; set dims.{prop}"
            )
        properties.append(
            PropertySetup(
                property=prop,
                resource=resource,
                kind=kv.get("resource_kind", "binary"),
                dims=tuple(dims),
                alpha=kv.get("alpha", DEFAULT_ALPHA),
                dead_zone=kv.get("dead_zone", 0.5),
            )
        )
    scalars["embeddings"] = str(_resolve(base_dir, scalars["embeddings"]))
    cfg = ExperimentConfig(properties=properties, source=source, **scalars)
    cfg.validate()
    return cfg


def _resolve(base_dir: Path, value: str) -> Path:
    p = Path(value)
    return p if p.is_absolute() else base_dir / p
