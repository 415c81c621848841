"""Command-line entry point: ``ldpc-fl <subcommand> [options]``.

Exit codes: 0 success, 1 domain error (or a failed reproduction check),
2 usage or configuration error.
"""

import argparse
import logging
import sys
import time
from datetime import datetime, timezone
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ValidationError

from analysis.approximation import ErasureApproximation
from analysis.catalog import CATALOG, preset
from analysis.density_evolution import r1_curve, threshold
from analysis.scaling import scaling_per_critical_point
from analysis.stopping_sets import expurgation_probability, spectrum
from analysis.variance import variance_finite, variance_limit
from cli.options import (
    CurveOptions,
    FloorOptions,
    OptimizeOptions,
    R1CurveOptions,
    ReproduceOptions,
    ScalingOptions,
    SimulateOptions,
    ThresholdOptions,
    VarianceOptions,
    resolve_options,
)
from cli.output import OutputDir, sha256_of, to_json
from cli.reproduce import optim_example_checks
from models.ensemble import DegreePair
from models.manifest import RunManifest
from models.optimization import OptimizerConfig
from optimization.optimizer import multi_start, optimize
from shared.config import Settings, load_config_file, settings_from_mapping
from shared.console_utils import ConsoleFormatter
from shared.errors import ConfigError, LdpcError
from shared.logging_config import level_from_name, setup_file_logging
from simulation.trials import mean_trajectory, run_trials

logger = logging.getLogger(__name__)

SERVICE_NAME = "ldpc-fl"
EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
TOP_LEVEL_KEYS = {"settings", "ensemble", "preset"}


def _package_version() -> str:
    try:
        return version("ldpc-finite-length")
    except PackageNotFoundError:
        return "0.1.0"


class RunContext:
    """State shared by one subcommand invocation."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.inputs: Dict[str, str] = {}
        self.config: Dict[str, Any] = {}
        self.settings: Settings = settings_from_mapping(None)
        self.out = OutputDir(Path(args.out))
        self.options: Optional[BaseModel] = None
        self.pair: Optional[DegreePair] = None
        self.seed: Optional[int] = None

    def load_config(self) -> None:
        if self.args.config:
            path = Path(self.args.config)
            self.config = load_config_file(path)
            self.inputs[str(path)] = sha256_of(path)
            unknown = set(self.config) - TOP_LEVEL_KEYS - set(SUBCOMMANDS)
            if unknown:
                raise ConfigError("unknown config key", (sorted(unknown)[0],))
        self.settings = settings_from_mapping(self.config.get("settings"))

    def options_for(self, model: type, overrides: Dict[str, Any]) -> Any:
        name = self.args.command
        self.options = resolve_options(model, self.config.get(name), overrides, name)
        return self.options

    def ensemble(self) -> DegreePair:
        pair = self.optional_ensemble()
        if pair is None:
            raise ConfigError("no ensemble given; use --preset or --ensemble")
        return pair

    def optional_ensemble(self) -> Optional[DegreePair]:
        """--ensemble file, then --preset, then the config's "ensemble"/"preset"."""
        source: Any = None
        key = "ensemble"
        if self.args.ensemble:
            path = Path(self.args.ensemble)
            source = load_config_file(path)
            self.inputs[str(path)] = sha256_of(path)
        elif self.args.preset:
            source, key = self.args.preset, "preset"
        elif "ensemble" in self.config:
            source = self.config["ensemble"]
        elif "preset" in self.config:
            source, key = self.config["preset"], "preset"

        if source is None:
            return None
        if isinstance(source, str):
            try:
                self.pair = preset(source)
            except KeyError as e:
                raise ConfigError(str(e.args[0]), (key,)) from e
            return self.pair
        try:
            self.pair = DegreePair.model_validate(source)
        except ValidationError as e:
            first = e.errors()[0]
            raise ConfigError(first["msg"], ("ensemble", *first["loc"])) from e
        return self.pair

    def manifest(self, started: datetime, elapsed: float, exit_code: int) -> Path:
        manifest = RunManifest(
            subcommand=self.args.command,
            config=self.options.model_dump(mode="json") if self.options else {},
            settings=self.settings.model_dump(mode="json"),
            ensemble=self.pair.to_json_dict() if self.pair else None,
            version=_package_version(),
            seed=self.seed,
            started_at=started,
            wall_clock_s=elapsed,
            inputs=self.inputs,
            outputs=dict(self.out.digests),
            exit_code=exit_code,
        )
        path = self.out.root / f"{self.args.command}.manifest.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(manifest.model_dump_json(indent=2) + "\n")
        return path


def _emit(data: Any) -> None:
    sys.stdout.write(to_json(data))


def cmd_threshold(ctx: RunContext) -> int:
    options = ctx.options_for(ThresholdOptions, {"tol": ctx.args.tol})
    summary = threshold(ctx.ensemble(), options.tol, ctx.settings)
    report = summary.as_report()
    ctx.out.json("threshold.json", report)
    _emit(report)
    return EXIT_OK


def cmd_r1curve(ctx: RunContext) -> int:
    options = ctx.options_for(
        R1CurveOptions, {"epsilon": ctx.args.epsilon, "points": ctx.args.points}
    )
    pair = ctx.ensemble()
    ys = np.linspace(0.0, 1.0, options.points)
    values = r1_curve(pair, options.epsilon, ys)
    rows = [{"y": float(y), "r1": float(v)} for y, v in zip(ys, values)]
    path = ctx.out.csv("r1curve.csv", rows, ["y", "r1"])
    logger.info(f"wrote {len(rows)} points to {path}")
    return EXIT_OK


def cmd_scaling(ctx: RunContext) -> int:
    ctx.options_for(ScalingOptions, {})
    pair = ctx.ensemble()
    de = threshold(pair, settings=ctx.settings)
    params = scaling_per_critical_point(pair, de, ctx.settings)
    report: Any = (
        params[0].as_report() if len(params) == 1 else [p.as_report() for p in params]
    )
    ctx.out.json("scaling.json", report)
    _emit(report)
    return EXIT_OK


def cmd_floor(ctx: RunContext) -> int:
    options = ctx.options_for(
        FloorOptions,
        {"n": ctx.args.n, "s_min": ctx.args.s_min, "s_max": ctx.args.s_max},
    )
    spec = spectrum(options.n, ctx.ensemble(), options.s_max, ctx.settings)
    ctx.out.csv(
        "floor.csv",
        [{"s": s, "A": a, "A_tilde": t} for s, a, t in spec.rows()],
        ["s", "A", "A_tilde"],
    )
    report = {
        "n": options.n,
        "s_min": options.s_min,
        "s_max": spec.s_max,
        "expurgation_probability": expurgation_probability(spec, options.s_min),
    }
    ctx.out.json("floor.json", report)
    _emit(report)
    return EXIT_OK


def cmd_curve(ctx: RunContext) -> int:
    args = ctx.args
    options = ctx.options_for(
        CurveOptions,
        {
            "n": args.n,
            "s_min": args.s_min,
            "s_max": args.s_max,
            "eps_min": args.eps_min,
            "eps_max": args.eps_max,
            "points": args.points,
        },
    )
    approx = ErasureApproximation(
        options.n, ctx.ensemble(), options.s_min, ctx.settings, s_max=options.s_max
    )
    rows = [p.as_row() for p in approx.curve(options.grid())]
    ctx.out.csv("curve.csv", rows)
    return EXIT_OK


class _OptimizeRecord(BaseModel):
    run: OptimizeOptions
    optimizer: OptimizerConfig


def cmd_optimize(ctx: RunContext) -> int:
    args = ctx.args
    block = ctx.config.get("optimize") or {}
    if not isinstance(block, dict):
        raise ConfigError("expected a JSON object", ("optimize",))
    # run keys (starts, workers, ...) sit next to the OptimizerConfig fields
    run_keys = set(OptimizeOptions.model_fields)
    options = resolve_options(
        OptimizeOptions,
        {k: v for k, v in block.items() if k in run_keys},
        {"starts": args.starts, "workers": args.workers},
        "optimize",
    )
    optimizer_block = {k: v for k, v in block.items() if k not in run_keys}
    if args.seed is not None:
        optimizer_block["seed"] = args.seed
    try:
        config = OptimizerConfig.model_validate(optimizer_block)
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(first["msg"], ("optimize", *first["loc"])) from e
    ctx.options = _OptimizeRecord(run=options, optimizer=config)
    ctx.seed = config.seed
    initial = ctx.optional_ensemble()

    rates: List[float] = []
    if options.starts > 1:
        result = multi_start(
            config, options.starts, workers=options.workers, settings=ctx.settings
        )
        trace = result.best
        rates = list(result.final_rates)
    else:
        trace = optimize(config, initial, ctx.settings, options.check_gradients)

    ctx.out.jsonl("optimize-trace.jsonl", [s.as_record() for s in trace.steps])
    ctx.out.json("optimize-pair.json", trace.final.pair.to_json_dict())
    summary = {
        "status": trace.status,
        "rate": trace.final.rate,
        "p": trace.final.p,
        "rounds": len(trace.steps) - 1,
        "richardson_gap": trace.richardson_gap,
        "start_rates": rates or None,
    }
    ctx.out.json("optimize-summary.json", summary)
    _emit(summary)
    return EXIT_OK if trace.feasible else EXIT_DOMAIN


def cmd_simulate(ctx: RunContext) -> int:
    args = ctx.args
    options = ctx.options_for(
        SimulateOptions,
        {
            "n": args.n,
            "epsilons": args.epsilon,
            "trials": args.trials,
            "seed": args.seed,
            "expurgate_below": args.expurgate_below,
            "trials_per_graph": args.trials_per_graph,
            "workers": args.workers,
            "trajectories": args.trajectories,
        },
    )
    ctx.seed = options.seed
    pair = ctx.ensemble()
    estimates = [
        run_trials(
            options.n,
            pair,
            eps,
            options.trials,
            seed=options.seed,
            gamma_split=options.gamma_split,
            expurgate_below=options.expurgate_below,
            trials_per_graph=options.trials_per_graph,
            workers=options.workers,
            settings=ctx.settings,
        )
        for eps in sorted(options.epsilons)
    ]
    ctx.out.csv("simulate.csv", [e.as_row() for e in estimates])
    ctx.out.json(
        "simulate-histograms.json",
        [{"epsilon": e.epsilon, "size_histogram": e.size_histogram} for e in estimates],
    )
    if options.trajectories:
        rows = []
        for eps in sorted(options.epsilons):
            if eps <= 0.0:
                continue
            mean = mean_trajectory(
                options.n, pair, eps, options.trajectories, options.seed, options.bins
            )
            rows.extend({"epsilon": eps, **row} for row in mean.rows())
        ctx.out.csv("trajectory.csv", rows)
    for e in estimates:
        logger.info(
            f"eps={e.epsilon:.6g}: P_B={e.p_block:.4g} "
            f"[{e.p_block_ci.low:.3g}, {e.p_block_ci.high:.3g}], P_b={e.p_bit:.4g}"
        )
    return EXIT_OK


def cmd_variance(ctx: RunContext) -> int:
    args = ctx.args
    options = ctx.options_for(
        VarianceOptions,
        {
            "ells": args.ell,
            "eps_min": args.eps_min,
            "eps_max": args.eps_max,
            "points": args.points,
            "limit": args.limit or None,
        },
    )
    pair = ctx.ensemble()
    rows: List[Dict[str, Any]] = []
    for ell in options.ells:
        for eps in options.grid():
            rows.append(
                {
                    "epsilon": eps,
                    "ell": ell,
                    "value": variance_finite(pair, eps, ell, ctx.settings),
                }
            )
    if options.limit:
        de = threshold(pair, settings=ctx.settings)
        for eps in options.grid():
            rows.append(
                {
                    "epsilon": eps,
                    "ell": "inf",
                    "value": variance_limit(pair, eps, ctx.settings, de),
                }
            )
    ctx.out.csv("variance.csv", rows, ["epsilon", "ell", "value"])
    return EXIT_OK


def cmd_reproduce(ctx: RunContext) -> int:
    options = ctx.options_for(
        ReproduceOptions,
        {
            "case": ctx.args.case,
            "with_optimization": ctx.args.with_optimization or None,
        },
    )
    checks = optim_example_checks(ctx.settings, options.with_optimization)
    ctx.out.json("reproduce.json", [c.model_dump() for c in checks])
    print(
        ConsoleFormatter.format_check_table(
            [c.model_dump() for c in checks], title=f"reproduce {options.case}"
        )
    )
    return EXIT_OK if all(c.passed is not False for c in checks) else EXIT_DOMAIN


SUBCOMMANDS: Dict[str, Callable[[RunContext], int]] = {
    "threshold": cmd_threshold,
    "r1curve": cmd_r1curve,
    "scaling": cmd_scaling,
    "floor": cmd_floor,
    "curve": cmd_curve,
    "optimize": cmd_optimize,
    "simulate": cmd_simulate,
    "variance": cmd_variance,
    "reproduce": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", default="results", help="Directory for artifacts")
    common.add_argument("--log-level", help="Console log level (default from settings)")
    source = common.add_mutually_exclusive_group()
    source.add_argument(
        "--preset", help=f"Named ensemble: {', '.join(sorted(CATALOG))}"
    )
    source.add_argument("--ensemble", help="Ensemble JSON file {lambda: ..., rho: ...}")

    parser = argparse.ArgumentParser(
        prog=SERVICE_NAME, description="Finite-length analysis of LDPC codes on the BEC"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("threshold", parents=[common], help="eps*, y*, x*, nu* as JSON")
    p.add_argument("--tol", type=float)

    p = sub.add_parser("r1curve", parents=[common], help="CSV of (y, r1(y))")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--points", type=int)

    sub.add_parser("scaling", parents=[common], help="alpha, beta, gamma as JSON")

    p = sub.add_parser("floor", parents=[common], help="Stopping-set spectrum")
    p.add_argument("--n", type=int)
    p.add_argument("--s-min", type=int)
    p.add_argument("--s-max", type=int)

    p = sub.add_parser("curve", parents=[common], help="Erasure probability curve")
    p.add_argument("--n", type=int)
    p.add_argument("--s-min", type=int)
    p.add_argument("--s-max", type=int)
    p.add_argument("--eps-min", type=float)
    p.add_argument("--eps-max", type=float)
    p.add_argument("--points", type=int)

    p = sub.add_parser(
        "optimize", parents=[common], help="Optimize degree distributions"
    )
    p.add_argument("--starts", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser(
        "simulate", parents=[common], help="Monte Carlo peeling decoding"
    )
    p.add_argument("--n", type=int)
    p.add_argument("--epsilon", type=float, nargs="+")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--expurgate-below", type=int)
    p.add_argument("--trials-per-graph", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--trajectories", type=int, help="Trajectory samples per epsilon")

    p = sub.add_parser("variance", parents=[common], help="Finite-ell message variance")
    p.add_argument("--ell", type=int, nargs="+")
    p.add_argument("--eps-min", type=float)
    p.add_argument("--eps-max", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--limit", action="store_true")

    p = sub.add_parser("reproduce", parents=[common], help="PASS/FAIL anchor table")
    p.add_argument("--case", choices=["optim-example"])
    p.add_argument("--with-optimization", action="store_true")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    started = datetime.now(timezone.utc)
    clock = time.perf_counter()
    ctx = RunContext(args)
    try:
        ctx.load_config()
        level = level_from_name(args.log_level or ctx.settings.log_level)
        setup_file_logging(
            SERVICE_NAME, log_level=level, log_dir=Path(args.out) / "logs"
        )
        code = SUBCOMMANDS[args.command](ctx)
    except ConfigError as e:
        message = ConsoleFormatter.error_message(f"configuration error: {e}")
        print(message, file=sys.stderr)
        code = EXIT_USAGE
    except LdpcError as e:
        logger.error(f"{args.command} failed: {e}", exc_info=True)
        print(ConsoleFormatter.error_message(str(e)), file=sys.stderr)
        code = EXIT_DOMAIN
    except ValueError as e:
        print(ConsoleFormatter.error_message(f"invalid argument: {e}"), file=sys.stderr)
        code = EXIT_USAGE

    path = ctx.manifest(started, time.perf_counter() - clock, code)
    logger.debug(f"manifest written to {path}")
    return code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
