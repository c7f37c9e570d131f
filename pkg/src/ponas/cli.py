"""Command-line pipeline: cost, build-table, loss-table, specialize, analyze.

Every command is deterministic for fixed flags and seed, and the primary
output goes to stdout (side files only via --out / --log). JSON outputs carry
a provenance header with the tool version, seed, and subcommand so emitted
files are self-describing. Timing and other diagnostics go to stderr, keeping
stdout byte-stable.

Exit codes: 0 success, 2 usage, 3 infeasible, 4 I/O, 5 validation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .accuracy_table import (
    AccuracyLossTable,
    layer_importance,
    load,
    table_document,
    to_loss_domain,
)
from .analysis import PairedSamples, export_evolution, kendall_tau
from .cost_model import Constraint, Metric, SlotCostTable, architecture_cost
from .errors import InfeasibleError, PonasError, ValidationError
from .progressive_builder import SyntheticEvaluator, TwoStageSchedule, build_table, run_manifest
from .search_space import MacroArchitecture, decode, default_macro, toy_macro
from .specializer import (
    GAConfig,
    brute_force,
    chromosome_loss,
    improve_at,
    specialize,
    worst_network,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4
EXIT_VALIDATION = 5


class _UsageError(Exception):
    """Bad command-line input that argparse cannot catch itself."""


def _provenance(args) -> dict:
    return {
        "tool_version": __version__,
        "seed": args.seed,
        "command": args.command,
    }


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    sys.stdout.write(text)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _macro_for_table(table) -> MacroArchitecture:
    # The canonical 19x12 table maps onto the standard macro-architecture;
    # anything else gets a dimension-matched toy macro so costs still exist.
    macro = default_macro()
    if table.layers == macro.num_searchable and table.candidates == macro.num_candidates:
        return macro
    return toy_macro(table.layers, table.candidates)


def _as_loss(table) -> AccuracyLossTable:
    if isinstance(table, AccuracyLossTable):
        return table
    return to_loss_domain(table)


def _parse_genes(text: str, macro: MacroArchitecture) -> tuple[int, ...]:
    length = macro.num_searchable
    if text == "largest":
        return (macro.num_candidates - 1,) * length
    if text == "smallest":
        return (0,) * length
    try:
        genes = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise _UsageError(f"--genes must be a comma-separated list of integers, got {text!r}")
    if len(genes) != length:
        raise _UsageError(f"expected {length} genes, got {len(genes)}")
    return genes


def _cmd_cost(args) -> int:
    macro = default_macro()
    genes = _parse_genes(args.genes, macro)
    try:
        spec = decode(genes, macro)
    except ValidationError as exc:
        raise _UsageError(str(exc)) from exc
    report = architecture_cost(spec)
    doc = {"provenance": _provenance(args), "genes": list(genes)}
    doc.update(report.to_json())
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_build_table(args) -> int:
    macro = default_macro()
    evaluator = SyntheticEvaluator(args.seed, macro)
    started = time.perf_counter()
    table, best = build_table(macro, evaluator, threads=args.threads)
    elapsed = time.perf_counter() - started
    manifest = {"provenance": _provenance(args)}
    manifest.update(run_manifest(TwoStageSchedule(), args.seed, table, best))
    _emit(manifest, args.out)
    print(f"built {table.layers}x{table.candidates} table in {elapsed:.3f}s", file=sys.stderr)
    return EXIT_OK


def _cmd_loss_table(args) -> int:
    table = load(args.table)
    if isinstance(table, AccuracyLossTable):
        raise ValidationError(f"{args.table} is already in the loss domain")
    loss = to_loss_domain(table)
    doc = {"provenance": _provenance(args)}
    doc.update(table_document(loss.deltas, domain="loss"))
    _emit(doc, args.out)
    return EXIT_OK


def _constraint(args) -> Constraint:
    return Constraint(metric=Metric(args.metric), ceiling=args.ceiling)


def _cmd_specialize(args) -> int:
    loss = _as_loss(load(args.table))
    macro = _macro_for_table(loss)
    cfg = GAConfig(
        population=args.population,
        generations=args.generations,
        mutation_prob=args.mutation,
        seed=args.seed,
    )
    started = time.perf_counter()
    genes, log = specialize(loss, _constraint(args), macro, cfg)
    elapsed = time.perf_counter() - started
    doc = {
        "provenance": _provenance(args),
        "genes": list(genes),
        "loss": log.best_loss,
        "flops": log.best_cost.flops,
        "params": log.best_cost.params,
        "generations": args.generations,
        "seed": args.seed,
    }
    _emit(doc, args.out)
    if args.log:
        export_evolution(log, args.log)
    print(f"specialized in {elapsed:.3f}s over {args.generations} generations", file=sys.stderr)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    loss = _as_loss(load(args.table))
    macro = _macro_for_table(loss)
    costs = SlotCostTable.from_macro(macro)
    genes = brute_force(loss, _constraint(args), macro)
    cost = costs.chromosome_cost(genes)
    doc = {
        "provenance": _provenance(args),
        "genes": list(genes),
        "loss": chromosome_loss(genes, loss),
        "flops": cost.flops,
        "params": cost.params,
    }
    _emit(doc, args.out)
    return EXIT_OK


def _cmd_analyze(args) -> int:
    if args.what == "importance":
        loss = _as_loss(load(args.table))
        if args.format == "json":
            doc = {
                "provenance": _provenance(args),
                "layers": [
                    {"layer": layer, "max_loss": float(f"{value:.6f}")}
                    for layer, value in enumerate(layer_importance(loss))
                ],
            }
            _emit(doc, args.out)
        else:
            lines = ["layer,max_loss"]
            for layer, value in enumerate(layer_importance(loss)):
                lines.append(f"{layer},{value:.6f}")
            text = "\n".join(lines) + "\n"
            sys.stdout.write(text)
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text)
        return EXIT_OK

    if args.what == "kendall":
        xs = _parse_floats(args.xs, "--xs")
        ys = _parse_floats(args.ys, "--ys")
        tau = kendall_tau(PairedSamples(xs, ys))
        sys.stdout.write(f"{tau:.6f}\n")
        return EXIT_OK

    # ablation-worst: the all-worst network plus its single-layer repairs at
    # the least and most important layers.
    loss = _as_loss(load(args.table))
    worst = worst_network(loss)
    importance = layer_importance(loss)
    least = int(np.argmin(importance))
    most = int(np.argmax(importance))
    doc = {"provenance": _provenance(args)}
    for name, genes in (
        ("worst", worst),
        ("worst_plus_least", improve_at(worst, least, loss)),
        ("worst_plus_most", improve_at(worst, most, loss)),
    ):
        doc[name] = {"genes": list(genes), "loss": chromosome_loss(genes, loss)}
    _emit(doc, args.out)
    return EXIT_OK


def _parse_floats(text: str, flag: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise _UsageError(f"{flag} must be a comma-separated list of numbers, got {text!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ponas",
        description="Constrained architecture specialization from accuracy tables.",
    )
    parser.add_argument("--version", action="version", version=f"ponas {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="random seed (default 42)")
    common.add_argument("--out", help="also write the primary output to this file")

    p = sub.add_parser("cost", parents=[common], help="cost of a decoded architecture")
    p.add_argument("--genes", required=True,
                   help="comma-separated block indices, or 'largest' / 'smallest'")
    p.set_defaults(func=_cmd_cost)

    p = sub.add_parser("build-table", parents=[common],
                       help="fill an accuracy table with the synthetic evaluator")
    p.add_argument("--evaluator", choices=["synthetic"], default="synthetic")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="parallel evaluations per layer (output is thread-count invariant)")
    p.set_defaults(func=_cmd_build_table)

    p = sub.add_parser("loss-table", parents=[common],
                       help="convert an accuracy table to the loss domain")
    p.add_argument("--table", required=True, help="accuracy table JSON path")
    p.set_defaults(func=_cmd_loss_table)

    p = sub.add_parser("specialize", parents=[common],
                       help="evolve the best architecture under a cost ceiling")
    p.add_argument("--table", required=True, help="accuracy or loss table JSON path")
    p.add_argument("--metric", choices=["flops", "params"], required=True)
    p.add_argument("--ceiling", type=int, required=True, help="cost upper bound")
    p.add_argument("--generations", type=int, default=1000)
    p.add_argument("--population", type=int, default=20)
    p.add_argument("--mutation", type=float, default=0.1)
    p.add_argument("--log", help="write the evolution curve CSV here")
    p.set_defaults(func=_cmd_specialize)

    p = sub.add_parser("oracle", parents=[common],
                       help="exhaustive optimum for small tables (validation aid)")
    p.add_argument("--table", required=True, help="accuracy or loss table JSON path")
    p.add_argument("--metric", choices=["flops", "params"], required=True)
    p.add_argument("--ceiling", type=int, required=True)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("analyze", parents=[common], help="ablation and reporting utilities")
    p.add_argument("what", choices=["importance", "kendall", "ablation-worst"])
    p.add_argument("--table", help="table JSON path (importance / ablation-worst)")
    p.add_argument("--xs", help="comma-separated x samples (kendall)")
    p.add_argument("--ys", help="comma-separated y samples (kendall)")
    p.add_argument("--format", choices=["csv", "json"], default="csv",
                   help="importance output format (default csv)")
    p.set_defaults(func=_cmd_analyze)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "analyze":
        if args.what in ("importance", "ablation-worst") and not args.table:
            parser.error(f"analyze {args.what} requires --table")
        if args.what == "kendall" and not (args.xs and args.ys):
            parser.error("analyze kendall requires --xs and --ys")
        args.command = f"analyze {args.what}"
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"ponas: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleError as exc:
        print(f"ponas: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"ponas: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except PonasError as exc:
        print(f"ponas: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
