"""Command-line interface: solve, bayes, market, simulate, lp.

Every subcommand is a thin adapter over the library: the JSON it prints is
exactly what the corresponding report builder serialises, so scripted use
and library use cannot drift apart. Reports are machine-readable; plots are
left to downstream tools fed by the CSV outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
import traceback
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import bayes, core, lp, market, sim, solver
from .core import LiquidityGameError


@dataclass(frozen=True)
class RunManifest:
    """Where one invocation reads from and writes to."""

    subcommand: str
    input_path: Optional[Path]
    output_path: Optional[Path]
    format: str
    seed: Optional[int]


def _dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    # Never leave a partial file behind: write next to the target, then rename.
    tmp = path.with_name(path.name + f".tmp.{os.getpid()}")
    try:
        tmp.write_text(text)
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def _emit(manifest: RunManifest, text: str) -> None:
    if manifest.output_path is None:
        sys.stdout.write(text)
    else:
        _atomic_write(manifest.output_path, text)


def build_solve_report(instance: core.GameInstance, dimension_cap: int) -> dict:
    matrix = core.build_payoff_matrix(instance)
    pure = solver.find_pure_equilibria(matrix)
    mixed = solver.solve_mixed(matrix, dimension_cap=dimension_cap)
    return {
        "instance": core.instance_to_jsonable(instance),
        "actions_i": list(matrix.actions_i),
        "actions_j": list(matrix.actions_j),
        "payoff_matrix": matrix.to_jsonable(),
        "pure_equilibria": [eq.to_jsonable() for eq in pure],
        "mixed_equilibria": [profile.to_jsonable() for profile in mixed],
    }


def build_bayes_report(
    game: bayes.ConditionalGame,
    space: bayes.TypeSpace,
    responses: Optional[dict[str, str]] = None,
) -> dict:
    dominant = {}
    for index, type_label in enumerate(game.types):
        found = bayes.dominant_strategy_per_type(game, index)
        dominant[type_label] = (
            None if found is None else {"strategy": found[0], "strictness": found[1]}
        )
    if responses is None:
        responses = {}
        for type_label, info in dominant.items():
            if info is None:
                raise LiquidityGameError(
                    f"type {type_label!r} has no dominant strategy; "
                    "pass an explicit response map"
                )
            responses[type_label] = info["strategy"]
    solution = bayes.indifference_threshold(game, space, responses)
    payoffs_at_prior = {
        s: bayes.expected_payoff(game, space, s, responses) for s in game.strategies_i
    }
    best_at_prior = max(game.strategies_i, key=lambda s: payoffs_at_prior[s])
    report = {
        "types": list(game.types),
        "prior": list(space.prior),
        "strategies_i": list(game.strategies_i),
        "strategies_j": list(game.strategies_j),
        "dominant_strategies": dominant,
        "expected_payoffs_at_prior": payoffs_at_prior,
        "best_strategy_at_prior": best_at_prior,
    }
    report.update(solution.to_jsonable())
    return report


def build_market_report(matrix: market.CompositionMatrix, mode: str, table: Optional[str]) -> dict:
    analysis = market.quadrant_analysis(matrix)
    best = market.best_quadrant(analysis)
    report = {"mode": mode}
    if table is not None:
        report["table"] = table
    report.update(analysis.to_jsonable())
    report["best_quadrant"] = list(best)
    return report


def build_lp_report(problem: lp.TransferProblem) -> dict:
    return {
        "receiver": problem.capacity_receiver,
        "sender": problem.capacity_sender,
        "max_transfer": lp.max_transfer(problem),
    }


def _parse_strategy(text: str) -> sim.StrategySpec:
    aliases = {
        "high": sim.HIGH_STRATEGY,
        "low": sim.LOW_STRATEGY,
        "full": sim.StrategySpec("full_balance"),
        "full_balance": sim.StrategySpec("full_balance"),
        "random": sim.StrategySpec("uniform_random"),
        "uniform_random": sim.StrategySpec("uniform_random"),
    }
    if text in aliases:
        return aliases[text]
    if text.startswith("fraction:"):
        return sim.StrategySpec("fixed_fraction", float(text.split(":", 1)[1]))
    raise ValueError(
        f"unknown strategy {text!r}; use high, low, full, random or fraction:<x>"
    )


def _parse_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    if not _:
        raise ValueError(f"range must look like lo:hi, got {text!r}")
    return (int(lo), int(hi))


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(","))


def _parse_responses(text: str) -> dict[str, str]:
    responses = {}
    for item in text.split(","):
        type_label, _, strategy = item.partition("=")
        if not _:
            raise ValueError(f"response must look like type=strategy, got {item!r}")
        responses[type_label.strip()] = strategy.strip()
    return responses


def _manifest(args: argparse.Namespace, input_path: Optional[Path], default_format: str = "json") -> RunManifest:
    return RunManifest(
        subcommand=args.command,
        input_path=input_path,
        output_path=args.output,
        format=args.format or default_format,
        seed=args.seed,
    )


def _cmd_solve(args: argparse.Namespace) -> int:
    if args.config is not None:
        instance = core.instance_from_json(Path(args.config).read_text())
        input_path = Path(args.config)
    else:
        if args.bi is None or args.bj is None:
            raise ValueError("pass --bi and --bj, or --config <file>")
        instance = core.build_instance(args.bi, args.bj, args.cap)
        input_path = None
    manifest = _manifest(args, input_path)
    if manifest.format == "csv":
        _emit(manifest, core.build_payoff_matrix(instance).to_csv())
        return 0
    report = build_solve_report(instance, args.dimension_cap)
    _emit(manifest, _dumps(report))
    return 0


def _cmd_bayes(args: argparse.Namespace) -> int:
    if args.game is not None:
        game, space = bayes.load_game_document(Path(args.game))
        input_path = Path(args.game)
    else:
        game, space = bayes.load_bundled_game()
        input_path = None
    if args.prior is not None:
        space = bayes.TypeSpace(types=game.types, prior=_parse_floats(args.prior))
    responses = _parse_responses(args.response) if args.response else None
    manifest = _manifest(args, input_path)
    if manifest.format == "csv":
        raise ValueError("bayes reports have no csv form; use --format json")
    report = build_bayes_report(game, space, responses)
    _emit(manifest, _dumps(report))
    return 0


def _cmd_market(args: argparse.Namespace) -> int:
    if args.published is not None and args.constructive:
        raise ValueError("choose one of --published or --constructive")
    if args.published is not None:
        matrix = market.load_published_matrix(args.published)
        mode, table, input_path = "published", args.published, None
    elif args.constructive:
        if args.config is not None:
            raw = json.loads(Path(args.config).read_text())
            types = tuple(raw["types"])
            strategies = tuple(raw["strategies"])
            matrices = {}
            for key, grid in raw["matrices"].items():
                t_i, _, t_j = key.partition(",")
                matrices[(t_i, t_j)] = tuple(
                    tuple((float(u), float(v)) for u, v in row) for row in grid
                )
            prior_i = tuple(float(p) for p in raw["prior_i"])
            prior_j = tuple(float(p) for p in raw["prior_j"])
            input_path = Path(args.config)
        else:
            game, space = bayes.load_bundled_game()
            types = game.types
            strategies = game.strategies_i
            matrices = market.pairwise_base_from_conditional(game)
            prior_i = prior_j = space.prior
            input_path = None
        if args.priors is not None:
            prior_i = prior_j = _parse_floats(args.priors)
        if args.priors_j is not None:
            prior_j = _parse_floats(args.priors_j)
        matrix = market.weight_by_priors(types, strategies, matrices, prior_i, prior_j)
        mode, table = "constructive", None
    else:
        raise ValueError("pass --published <table> or --constructive")
    manifest = _manifest(args, input_path)
    if manifest.format == "csv":
        _emit(manifest, matrix.cells_csv())
        return 0
    report = build_market_report(matrix, mode, table)
    _emit(manifest, _dumps(report))
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    raw: dict = {}
    input_path = None
    if args.config is not None:
        input_path = Path(args.config)
        raw = json.loads(input_path.read_text())
    if args.trials is not None:
        raw["trials"] = args.trials
    raw.setdefault("trials", 10_000)
    if args.range_i is not None:
        raw["balance_range_i"] = list(_parse_range(args.range_i))
    if args.range_j is not None:
        raw["balance_range_j"] = list(_parse_range(args.range_j))
    if args.strategy_i is not None:
        raw["strategy_i"] = _parse_strategy(args.strategy_i).to_jsonable()
    if args.strategy_j is not None:
        raw["strategy_j"] = _parse_strategy(args.strategy_j).to_jsonable()
    if args.mode is not None:
        raw["mode"] = args.mode
    if args.max_rounds is not None:
        raw["max_rounds"] = args.max_rounds
    if args.seed is not None:
        raw["seed"] = args.seed
    elif "seed" not in raw:
        drawn = secrets.randbits(64)
        print(f"seed: {drawn}", file=sys.stderr)
        raw["seed"] = drawn
    config = sim.SimConfig.from_jsonable(raw)
    report = sim.run_simulation(config)
    manifest = _manifest(args, input_path)
    if manifest.format == "csv":
        _emit(manifest, report.histogram_csv())
    else:
        _emit(manifest, report.to_json())
    if args.histogram is not None:
        _atomic_write(Path(args.histogram), report.histogram_csv())
    return 0


def _cmd_lp(args: argparse.Namespace) -> int:
    problem = lp.TransferProblem(args.receiver, args.sender)
    manifest = _manifest(args, None, default_format="plain")
    if manifest.format == "csv":
        raise ValueError("lp has no csv form; use --format json or the default")
    if manifest.format == "json":
        _emit(manifest, _dumps(build_lp_report(problem)))
    else:
        _emit(manifest, f"{lp.max_transfer(problem)}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", type=Path, help="write the report here (atomic)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (unsigned 64-bit)")

    parser = argparse.ArgumentParser(
        prog="liqgame",
        description="Equilibria, Bayesian analysis and simulation of bilateral "
        "bond-transfer games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", parents=[common], help="payoff matrix and equilibria")
    p_solve.add_argument("--bi", type=int, help="long player's balance (positive)")
    p_solve.add_argument("--bj", type=int, help="short player's balance (negative)")
    p_solve.add_argument("--cap", type=int, default=1_000_000, help="bonds on issue")
    p_solve.add_argument("--config", type=Path, help="JSON instance document")
    p_solve.add_argument(
        "--dimension-cap",
        type=int,
        default=solver.DEFAULT_DIMENSION_CAP,
        help="refuse support enumeration beyond this many actions per side",
    )
    p_solve.set_defaults(handler=_cmd_solve)

    p_bayes = sub.add_parser("bayes", parents=[common], help="two-type threshold analysis")
    p_bayes.add_argument("--game", type=Path, help="game document (default: bundled)")
    p_bayes.add_argument("--prior", type=str, help="override prior, e.g. 0.35,0.65")
    p_bayes.add_argument(
        "--response", type=str, help="counterfactual responses, e.g. a=high,b=low"
    )
    p_bayes.set_defaults(handler=_cmd_bayes)

    p_market = sub.add_parser("market", parents=[common], help="composition aggregates")
    p_market.add_argument(
        "--published", choices=sorted(market.PUBLISHED_TABLES), help="bundled table"
    )
    p_market.add_argument(
        "--constructive", action="store_true", help="weight per-type-pair tables by priors"
    )
    p_market.add_argument("--config", type=Path, help="constructive base document")
    p_market.add_argument("--priors", type=str, help="type weights for both sides, e.g. 0.35,0.65")
    p_market.add_argument("--priors-j", type=str, help="column-side weights when different")
    p_market.set_defaults(handler=_cmd_market)

    p_sim = sub.add_parser("simulate", parents=[common], help="seeded Monte Carlo runs")
    p_sim.add_argument("--config", type=Path, help="JSON simulation config")
    p_sim.add_argument("--trials", type=int)
    p_sim.add_argument("--range-i", type=str, help="long balance range lo:hi")
    p_sim.add_argument("--range-j", type=str, help="short balance range lo:hi")
    p_sim.add_argument("--strategy-i", type=str, help="high|low|full|random|fraction:<x>")
    p_sim.add_argument("--strategy-j", type=str)
    p_sim.add_argument("--mode", choices=sim.MODES)
    p_sim.add_argument("--max-rounds", type=int)
    p_sim.add_argument("--histogram", type=Path, help="also write the rounds,count CSV here")
    p_sim.set_defaults(handler=_cmd_simulate)

    p_lp = sub.add_parser("lp", parents=[common], help="largest feasible transfer")
    p_lp.add_argument("--receiver", type=int, required=True, help="absolute need of the short side")
    p_lp.add_argument("--sender", type=int, required=True, help="holding of the long side")
    p_lp.set_defaults(handler=_cmd_lp)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (
        LiquidityGameError,
        ValueError,
        KeyError,
        json.JSONDecodeError,
        OSError,
    ) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
