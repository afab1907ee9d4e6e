"""Command line entry points.

Four subcommands: simulate (draw data from a ground-truth model, or
materialize the built-in demo scenario), fuse (run the full pipeline and
emit the report), evaluate (score the fused graph against ground truth),
sensitivity (run the perturbation grid). Validation problems exit 2, I/O
problems exit 1; failures print one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .errors import InvalidInput, ScmFuseError
from .evaluate import (
    compare_graphs,
    load_ground_truth,
    sensitivity_run,
    sensitivity_to_csv,
    simulate_data,
)
from .fixture import write_default_scenario
from .fuse import fuse_all, load_inputs, scm_to_dict, scm_to_dot
from .ingest import load_config, write_dataset

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _cmd_simulate(args) -> int:
    if args.demo is not None:
        config_path = write_default_scenario(
            args.demo, sample_seed=args.seed, n=args.n
        )
        print(str(config_path))
        return EXIT_OK
    if args.truth is None or args.out is None:
        raise InvalidInput("simulate needs either --demo or both --truth and --out")
    truth = load_ground_truth(args.truth)
    columns = args.columns.split(",") if args.columns else None
    dataset = simulate_data(
        truth, args.n, args.seed, columns=columns, name=args.name
    )
    write_dataset(dataset, args.out)
    return EXIT_OK


def _cmd_fuse(args) -> int:
    config = load_config(args.config)
    result = fuse_all(config, load_inputs(config))
    _emit(_json_text(result.report()), args.out)
    if args.scm is not None:
        _emit(_json_text(scm_to_dict(result.scm)), args.scm)
    if args.dot is not None:
        _emit(scm_to_dot(result.scm), args.dot)
    return EXIT_OK


def _resolve_truth(config, override: Optional[str]):
    path = override or config.ground_truth
    if path is None:
        raise InvalidInput(
            "no ground truth available: pass --truth or set it in the config"
        )
    return load_ground_truth(path)


def _cmd_evaluate(args) -> int:
    config = load_config(args.config)
    truth = _resolve_truth(config, args.truth)
    result = fuse_all(config, load_inputs(config))
    metrics = compare_graphs(result.scm, truth)
    _emit(_json_text(metrics.to_dict()), args.out)
    return EXIT_OK


def _cmd_sensitivity(args) -> int:
    config = load_config(args.config)
    truth = _resolve_truth(config, args.truth)
    rows = sensitivity_run(config, load_inputs(config), truth)
    _emit(sensitivity_to_csv(rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scmfuse",
        description="Fuse expert, data and literature causal claims.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="sample data from a causal model")
    p_sim.add_argument("--truth", help="ground-truth model JSON")
    p_sim.add_argument("--out", help="output CSV path")
    p_sim.add_argument("--n", type=int, default=5000, help="rows to draw")
    p_sim.add_argument("--seed", type=int, default=1, help="generator seed")
    p_sim.add_argument(
        "--columns", help="comma-separated subset of variables to keep"
    )
    p_sim.add_argument("--name", help="dataset name (defaults from seed)")
    p_sim.add_argument(
        "--demo",
        metavar="DIR",
        help="write the built-in demo scenario into DIR and print its config path",
    )
    p_sim.set_defaults(func=_cmd_simulate)

    p_fuse = sub.add_parser("fuse", help="run the fusion pipeline")
    p_fuse.add_argument("--config", required=True, help="scenario config JSON")
    p_fuse.add_argument("--out", help="report JSON path (default stdout)")
    p_fuse.add_argument("--scm", help="also write the fused model JSON here")
    p_fuse.add_argument("--dot", help="also write a Graphviz rendering here")
    p_fuse.set_defaults(func=_cmd_fuse)

    p_eval = sub.add_parser(
        "evaluate", help="score the fused graph against ground truth"
    )
    p_eval.add_argument("--config", required=True, help="scenario config JSON")
    p_eval.add_argument("--truth", help="override the config's ground truth")
    p_eval.add_argument("--out", help="metrics JSON path (default stdout)")
    p_eval.set_defaults(func=_cmd_evaluate)

    p_sens = sub.add_parser(
        "sensitivity", help="run the tier-corruption grid"
    )
    p_sens.add_argument("--config", required=True, help="scenario config JSON")
    p_sens.add_argument("--truth", help="override the config's ground truth")
    p_sens.add_argument("--out", help="grid CSV path (default stdout)")
    p_sens.set_defaults(func=_cmd_sensitivity)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScmFuseError as exc:
        sys.stderr.write(
            json.dumps(
                {
                    "error": type(exc).__name__,
                    "message": str(exc),
                    "context": getattr(exc, "context", {}),
                },
                sort_keys=True,
                default=str,
            )
            + "\n"
        )
        return EXIT_INVALID
    except OSError as exc:
        sys.stderr.write(
            json.dumps(
                {"error": type(exc).__name__, "message": str(exc), "context": {}},
                sort_keys=True,
            )
            + "\n"
        )
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
