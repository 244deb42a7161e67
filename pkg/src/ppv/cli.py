"""Command-line entry points over the same file formats as the service."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .exports import (
    canonical_json,
    comparison_to_csv,
    comparison_to_dict,
    influence_to_csv,
    influence_to_dict,
    intermediary_weights_from,
    load_simulation_config,
    results_document,
    tally_to_csv,
    trajectory_to_csv,
    trajectory_to_dict,
)
from .matrix import EqualSplit, Weighted, build_matrix, validate
from .solver import compare_with_ld, influence_report, limit_by_squaring, tally
from .utility import SimulationConfig, run_simulation


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _strategy(args, data):
    if args.intermediary_strategy == "weighted":
        return Weighted(intermediary_weights_from(data))
    return EqualSplit()


def _load(args):
    with open(args.input, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    from .exports import parse_ballot_data

    registry, ballots = parse_ballot_data(data)
    return registry, ballots, data


def cmd_compute(args) -> int:
    registry, ballots, data = _load(args)
    strategy = _strategy(args, data)
    vote_matrix = build_matrix(registry, ballots, strategy)
    report = validate(vote_matrix, registry)
    limit = limit_by_squaring(vote_matrix, args.tol, args.max_squarings)
    result = tally(limit, registry)
    influence = influence_report(vote_matrix, registry)
    comparison = (
        compare_with_ld(ballots, registry, strategy, args.tol, args.max_squarings)
        if args.ld_compare
        else None
    )
    if args.format == "csv":
        _emit(tally_to_csv(result, registry), args.output)
        return 0
    doc = results_document(
        result,
        influence,
        comparison,
        report,
        extras={"iterations_used": limit.iterations_used, "residual": limit.residual},
    )
    _emit(canonical_json(doc), args.output)
    return 0


def cmd_influence(args) -> int:
    registry, ballots, data = _load(args)
    vote_matrix = build_matrix(registry, ballots, _strategy(args, data))
    influence = influence_report(vote_matrix, registry)
    if args.format == "csv":
        _emit(influence_to_csv(influence, registry), args.output)
    else:
        _emit(canonical_json(influence_to_dict(influence)), args.output)
    return 0


def cmd_ld_compare(args) -> int:
    registry, ballots, data = _load(args)
    comparison = compare_with_ld(
        ballots, registry, _strategy(args, data), args.tol, args.max_squarings
    )
    if args.format == "csv":
        _emit(comparison_to_csv(comparison), args.output)
    else:
        _emit(canonical_json(comparison_to_dict(comparison)), args.output)
    return 0


def cmd_simulate(args) -> int:
    config, registry = load_simulation_config(args.input)
    if args.seed is not None:
        config = SimulationConfig(
            periods=config.periods,
            profiles=config.profiles,
            g_params=config.g_params,
            feedback=config.feedback,
            seed=args.seed,
            initial=config.initial,
        )
    result = run_simulation(config, registry)
    if args.format == "csv":
        _emit(trajectory_to_csv(result), args.output)
    else:
        _emit(canonical_json(trajectory_to_dict(result)), args.output)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    from .session import SessionStore, default_data_dir

    data_dir = Path(args.data_dir) if args.data_dir else default_data_dir()
    app = create_app(SessionStore(data_dir))
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppv",
        description="Fractional-delegation voting engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="ballot file (JSON)")
        p.add_argument("--output", help="write to this path instead of stdout")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--tol", type=float, default=1e-12)
        p.add_argument("--max-squarings", type=int, default=64)
        p.add_argument(
            "--intermediary-strategy",
            choices=["equal-split", "weighted"],
            default="equal-split",
            help="'weighted' reads the file's intermediary_weights entry",
        )

    p = sub.add_parser("compute", help="tally a ballot file")
    common(p)
    p.add_argument("--ld-compare", action="store_true", help="include the liquid-democracy comparison")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("influence", help="influence ranking for a ballot file")
    common(p)
    p.set_defaults(func=cmd_influence)

    p = sub.add_parser("ld-compare", help="fractional vs whole-vote comparison")
    common(p)
    p.set_defaults(func=cmd_ld_compare)

    p = sub.add_parser("simulate", help="run the delegation dynamic")
    p.add_argument("--input", required=True, help="simulation config (JSON or TOML)")
    p.add_argument("--output", help="write to this path instead of stdout")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--data-dir", help="event-log root (default: PPV_DATA_DIR or ./ppv-data)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
