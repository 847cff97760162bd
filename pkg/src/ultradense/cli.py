"""Command-line front end.

Subcommands wire ingestion, training, lexicon emission and evaluation into
reproducible seeded experiments:

    ultradense train   --config exp.cfg [overrides]
    ultradense lexicon --transform out/transform.ultradense --embeddings E --property P --out lex.tsv
    ultradense eval    --lexicon lex.tsv --gold gold.tsv [--tau-variant tau_b]
    ultradense sweep   --config exp.cfg --kind subspace --values 1,2,4,10

Exit codes: 0 ok, 2 input/IO, 3 configuration, 4 evaluation degeneracy,
5 numerical abort. Reports are written as TSV with a rendered PNG figure
alongside.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager
from pathlib import Path

from .config import ExperimentConfig, load_experiment_config
from .embeddings import load_embeddings, normalize_embeddings, top_k_filter
from .errors import UltradenseError
from .evaluation import evaluate, sweep_resource_size, sweep_subspace_size
from .projection import (
    emit_lexicon,
    load_output_lexicon,
    load_transform,
    save_output_lexicon,
    save_transform,
)
from .resources import binarize, frequency_lexicon, intersect, load_lexicon, split
from .trainer import learning_rate, train

PROPERTIES_WITH_ALPHA_FLAG = ("sentiment", "concreteness", "frequency", "other")


@contextmanager
def _stage(name: str):
    """Prefix errors with the pipeline stage they came from."""
    try:
        yield
    except UltradenseError as exc:
        raise type(exc)(f"[{name}] {exc}") from exc


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "deterministic", None):
        cfg.deterministic = True
    if getattr(args, "top_k", None) is not None:
        cfg.top_k = args.top_k
    if getattr(args, "iterations", None) is not None:
        cfg.iterations = args.iterations
    if getattr(args, "out_dir", None) is not None:
        cfg.out_dir = args.out_dir
    for prop in PROPERTIES_WITH_ALPHA_FLAG:
        value = getattr(args, f"alpha_{prop}", None)
        if value is None:
            continue
        matched = [p for p in cfg.properties if p.property == prop]
        if not matched:
            raise UltradenseError(f"--alpha-{prop} given but config has no such property")
        matched[0].alpha = value
    cfg.validate()
    return cfg


def _load_working_set(cfg: ExperimentConfig):
    with _stage("load-embeddings"):
        e = load_embeddings(cfg.embeddings, cfg.embeddings_format)
        e = top_k_filter(e, cfg.top_k)
        if cfg.normalize:
            e = normalize_embeddings(e)
    return e


def _build_tables(cfg: ExperimentConfig, e):
    tables = {}
    with _stage("resources"):
        for p in cfg.properties:
            if p.resource == "rank-order":
                resource = frequency_lexicon(
                    e, top=cfg.freq_top,
                    low_start=cfg.freq_low_start, low_end=cfg.freq_low_end,
                )
            else:
                resource = load_lexicon(p.resource, prop=p.property, kind=p.kind)
                if resource.kind == "continuous":
                    resource = binarize(resource, dead_zone=p.dead_zone)
            table = intersect(resource, e)
            tables[p.property] = split(table, cfg.test_fraction, cfg.seed)
    return tables


def cmd_train(args) -> int:
    with _stage("config"):
        cfg = _apply_overrides(load_experiment_config(args.config), args)
    e = _load_working_set(cfg)
    tables = _build_tables(cfg, e)
    with _stage("train"):
        result = train(cfg.train_config(), e, tables)
    with _stage("write"):
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        transform_path = out / "transform.ultradense"
        save_transform(result.transform, transform_path)
        log_path = out / "training_log.tsv"
        with open(log_path, "w", encoding="utf-8") as f:
            for it, cost in enumerate(result.cost_history):
                lr = learning_rate(result.config, it)
                f.write(f"{it}\t{lr:.10g}\t{cost:.10g}\n")
        echo_path = out / "config_echo.txt"
        echo_path.write_text(cfg.echo(), encoding="utf-8")
        from .plotting import plot_cost_curve

        figure_path = out / "training_cost.png"
        plot_cost_curve(result.cost_history, figure_path)
    print(f"transform: {transform_path}")
    print(f"training log: {log_path}")
    print(f"config echo: {echo_path}")
    print(f"figure: {figure_path}")
    print(
        f"final cost {result.cost_history[-1]:.6g} after "
        f"{len(result.cost_history)} iterations ({result.wall_time:.2f}s)"
    )
    return 0


def cmd_lexicon(args) -> int:
    with _stage("load-transform"):
        transform = load_transform(args.transform)
    with _stage("load-embeddings"):
        e = load_embeddings(args.embeddings, args.embeddings_format)
        if args.top_k is not None:
            e = top_k_filter(e, args.top_k)
        if args.normalize:
            e = normalize_embeddings(e)
    with _stage("emit"):
        lex = emit_lexicon(e, transform, args.prop)
        save_output_lexicon(lex, args.out)
    print(f"lexicon: {args.out} ({len(lex)} words, orientation {lex.orientation})")
    return 0


def cmd_eval(args) -> int:
    with _stage("load"):
        lex = load_output_lexicon(args.lexicon, prop=args.prop)
        gold = load_lexicon(args.gold, prop=args.prop, kind="continuous")
    with _stage("evaluate"):
        report = evaluate(
            lex, list(gold.entries.items()), variant=args.tau_variant,
            method=args.tau_variant,
        )
    print("#property\tn\ttau\tcoverage\tmethod")
    print(report.tsv_row())
    return 0


def cmd_sweep(args) -> int:
    with _stage("config"):
        cfg = _apply_overrides(load_experiment_config(args.config), args)
        prop = args.prop
        if prop is None:
            if len(cfg.properties) != 1:
                names = [p.property for p in cfg.properties]
                raise UltradenseError(
                    f"config defines {names}; pick one with --property"
                )
            prop = cfg.properties[0].property
        setups = [p for p in cfg.properties if p.property == prop]
        if not setups:
            raise UltradenseError(f"config has no property {prop!r}")
        values = [int(v) for v in args.values.split(",") if v]
        if not values:
            raise UltradenseError(f"--values parsed to an empty list: {args.values!r}")
    cfg.properties = setups
    e = _load_working_set(cfg)
    tables = _build_tables(cfg, e)
    table = tables[prop]
    gold = None
    if args.gold is not None:
        with _stage("load-gold"):
            gold = load_lexicon(args.gold, prop=prop, kind="continuous").entries
    train_cfg = cfg.train_config()
    with _stage("sweep"):
        if args.kind == "subspace":
            curve = sweep_subspace_size(e, table, values, args.method, train_cfg, gold=gold)
        else:
            curve = sweep_resource_size(
                e, table, values, train_cfg, subsample_seed=cfg.seed, gold=gold
            )
    with _stage("write"):
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        suffix = args.kind if args.kind == "resource" else f"{args.kind}_{args.method}"
        tsv_path = out / f"sweep_{suffix}.tsv"
        with open(tsv_path, "w", encoding="utf-8") as f:
            for size, tau in curve:
                f.write(f"{size}\t{tau:.6f}\n")
        from .plotting import plot_sweep_curve

        figure_path = out / f"sweep_{suffix}.png"
        xlabel = "subspace size" if args.kind == "subspace" else "train resource size"
        plot_sweep_curve(curve, figure_path, xlabel=xlabel, title=prop)
    print(f"curve: {tsv_path}")
    print(f"figure: {figure_path}")
    return 0


def _add_override_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--deterministic", action="store_true",
                   help="force deterministic mode (seeded runs are always reproducible here)")
    p.add_argument("--top-k", type=int, default=None, dest="top_k",
                   help="override the vocabulary truncation")
    p.add_argument("--iterations", type=int, default=None,
                   help="override the training iteration count")
    p.add_argument("--out-dir", default=None, dest="out_dir",
                   help="override the output directory")
    for prop in PROPERTIES_WITH_ALPHA_FLAG:
        p.add_argument(
            f"--alpha-{prop}", type=float, default=None, dest=f"alpha_{prop}",
            help=f"override the separation weight for {prop}",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ultradense",
        description="Learn orthogonal embedding transformations that concentrate "
        "lexical information in tiny subspaces; create and evaluate lexicons.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a transformation from a config file")
    p_train.add_argument("--config", required=True)
    _add_override_flags(p_train)
    p_train.set_defaults(func=cmd_train)

    p_lex = sub.add_parser("lexicon", help="emit a full-vocabulary lexicon TSV")
    p_lex.add_argument("--transform", required=True)
    p_lex.add_argument("--embeddings", required=True)
    p_lex.add_argument("--embeddings-format", default="text",
                       choices=("text", "binary"), dest="embeddings_format")
    p_lex.add_argument("--property", required=True, dest="prop")
    p_lex.add_argument("--out", required=True)
    p_lex.add_argument("--top-k", type=int, default=None, dest="top_k")
    p_lex.add_argument("--normalize", action="store_true")
    p_lex.set_defaults(func=cmd_lexicon)

    p_eval = sub.add_parser("eval", help="Kendall's tau of a lexicon against gold")
    p_eval.add_argument("--lexicon", required=True)
    p_eval.add_argument("--gold", required=True, help="token<TAB>value TSV")
    p_eval.add_argument("--tau-variant", default="tau_b", choices=("tau_a", "tau_b"),
                        dest="tau_variant")
    p_eval.add_argument("--property", default="other", dest="prop")
    p_eval.set_defaults(func=cmd_eval)

    p_sweep = sub.add_parser("sweep", help="subspace-size or resource-size curve")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--kind", required=True, choices=("subspace", "resource"))
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated sizes, e.g. 1,2,4,10")
    p_sweep.add_argument("--method", default="ultradense",
                         choices=("ultradense", "pca", "random"),
                         help="subspace construction for --kind subspace")
    p_sweep.add_argument("--property", default=None, dest="prop")
    p_sweep.add_argument("--gold", default=None,
                         help="optional continuous gold TSV for the swept property")
    _add_override_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UltradenseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
