"""
Command-line front end: curve, price, simulate, contagion, verify and plot
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from ..config.schema import RunConfig, load_config, parse_tolerances
from ..config.settings import get_output_dir, settings
from ..dynamics.coefficients import coefficient_frame
from ..lrb.bridge import Measure, simulate
from ..pricing.assets import asset_price, breaching_paths
from ..pricing.monte_carlo import Instrument, InstrumentKind, mc_price
from ..pricing.options import CLOSED_FORM_KINDS, caplet_price, swaption_price
from ..scenario.contagion import run_scenario
from ..utils.errors import ConfigError, HeatKernelError, PlotError
from .export import Exporter
from .plotting import plot_csv, plot_frame
from .verify import run_checks, summarize

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

# simulated paths stop short of U where the rational coefficients degenerate
SIMULATION_END = 0.9
MAX_LISTED_PATHS = 20


def _require(config: RunConfig, what: str, section: str) -> None:
    if getattr(config, what) is None:
        raise ConfigError(f"this command needs a {section} section", path=section)


def _require_seed(config: RunConfig) -> int:
    if config.seed is None:
        raise ConfigError("stochastic commands need a seed (config key or --seed)", path="seed")
    return config.seed


def cmd_curve(config: RunConfig, args, exporter: Exporter) -> int:
    _require(config, "bond_model", "model")
    model, functions = config.bond_model, config.functions
    grid = np.linspace(0.0, config.horizon, config.source.grid.steps + 1)
    frame = pd.DataFrame({
        "t": grid,
        "P0": model.curve(grid),
        "f0": functions.f0(grid),
        "f1": functions.f1(grid),
        "b": model.single_leg.coefficient(grid),
    })
    if config.curve is not None:
        frame["market"] = config.curve(grid)
    result = exporter.export_frame(frame, "curve.csv")
    return EXIT_OK if result["success"] else EXIT_FAILED


def cmd_price(config: RunConfig, args, exporter: Exporter) -> int:
    _require(config, "bond_model", "model")
    seed = _require_seed(config)
    model, factor = config.bond_model, config.factor
    rows = []
    for instrument in config.instruments:
        if instrument.kind != InstrumentKind.BOND and factor.kind in CLOSED_FORM_KINDS:
            if instrument.kind == InstrumentKind.CAPLET:
                value = caplet_price(model, instrument.K, instrument.t, instrument.T)
            else:
                value = swaption_price(model, instrument.K, instrument.t, instrument.resets)
            rows.append({"id": instrument.id, "estimate": value, "se": 0.0, "method": "closed_form"})
        estimate, se = mc_price(instrument, model, config.n_paths, seed, workers=args.workers)
        rows.append({"id": instrument.id, "estimate": estimate, "se": se, "method": "monte_carlo"})
    for asset_id, asset in config.assets.items():
        claim = Instrument.asset_claim(config.asset_maturity(asset_id), id=asset_id)
        estimate, se = mc_price(claim, asset, config.n_paths, seed, workers=args.workers)
        rows.append({"id": asset_id, "estimate": estimate, "se": se, "method": "monte_carlo"})
    if not rows:
        raise ConfigError("no instruments to price", path="instruments")
    result = exporter.export_frame(pd.DataFrame(rows), "prices.csv")
    return EXIT_OK if result["success"] else EXIT_FAILED


def cmd_simulate(config: RunConfig, args, exporter: Exporter) -> int:
    _require(config, "bond_model", "model")
    seed = _require_seed(config)
    bridge = config.bridge
    end = config.source.grid.end or SIMULATION_END * config.horizon
    grid = np.linspace(0.0, end, config.source.grid.steps + 1)
    batch = simulate(bridge, grid, config.n_paths, seed, Measure.P, workers=args.workers)
    frames = []
    for i in range(batch.n_paths):
        frame = pd.DataFrame(batch.values[i].T, columns=[f"component_{c + 1}" for c in range(bridge.dimension)])
        frame.insert(0, "t", batch.grid)
        frame.insert(0, "path", i)
        frames.append(frame)
    paths = pd.concat(frames, ignore_index=True)
    ok = exporter.export_frame(paths, "paths.csv")["success"]
    if config.factor.gaussian:
        coefficients = coefficient_frame(config.bond_model, float(batch.grid[-1]), batch.grid, batch.values[0])
        ok = exporter.export_frame(coefficients, "coefficients.csv")["success"] and ok
    if config.assets:
        ok = exporter.export_frame(_asset_frame(config, batch), "assets.csv")["success"] and ok
    return EXIT_OK if ok else EXIT_FAILED


def _asset_frame(config: RunConfig, batch) -> pd.DataFrame:
    """S_tT of every configured asset along the simulated paths, up to its maturity"""
    frames = []
    for asset_id, asset in config.assets.items():
        T = config.asset_maturity(asset_id)
        times = batch.grid[batch.grid <= T]
        for k, t in enumerate(times):
            frames.append(pd.DataFrame({
                "path": np.arange(batch.n_paths),
                "t": t,
                "asset": asset_id,
                "S": asset_price(asset, float(t), T, batch.values[:, :, k]),
            }))
        if asset.limited_liability:
            breaches = breaching_paths(asset, times, batch.values, T)
            if breaches.size:
                shown = ", ".join(str(i) for i in breaches[:MAX_LISTED_PATHS])
                more = f" (+{breaches.size - MAX_LISTED_PATHS} more)" if breaches.size > MAX_LISTED_PATHS else ""
                logger.warning(f"Asset {asset_id} breaks limited liability on {breaches.size} path(s): {shown}{more}")
    return pd.concat(frames, ignore_index=True)


def cmd_contagion(config: RunConfig, args, exporter: Exporter) -> int:
    _require(config, "scenario", "contagion")
    _require_seed(config)
    frame = run_scenario(config.scenario, workers=args.workers)
    result = exporter.export_frame(frame, "contagion.csv")
    plot_frame(frame, exporter.out_dir, "contagion")
    return EXIT_OK if result["success"] else EXIT_FAILED


def cmd_verify(config: RunConfig, args, exporter: Exporter) -> int:
    _require_seed(config)
    tolerances = parse_tolerances(args.tol)
    report = run_checks(config, tolerances, workers=args.workers)
    exporter.export_report(report, "verify.json")
    print(summarize(report))
    return EXIT_OK if report["passed"] else EXIT_FAILED


def cmd_plot(args, exporter: Exporter) -> int:
    written = []
    for path in args.inputs:
        written.extend(plot_csv(path, exporter.out_dir))
    logger.info(f"Wrote {len(written)} charts")
    return EXIT_OK


COMMANDS = {
    "curve": cmd_curve,
    "price": cmd_price,
    "simulate": cmd_simulate,
    "contagion": cmd_contagion,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help=f"output directory (default {settings.output_dir}, env HEATKERNEL_OUTPUT_DIR)")
    common.add_argument("--workers", type=int, default=None, help="threads for block-parallel simulation")

    run = argparse.ArgumentParser(add_help=False)
    run.add_argument("--config", required=True, help="YAML run configuration")
    run.add_argument("--seed", type=int, default=None, help="64-bit unsigned seed, overrides the config")
    run.add_argument("--paths", type=int, default=None, help="number of Monte-Carlo paths, overrides the config")
    run.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE", help="verify tolerance override")

    parser = argparse.ArgumentParser(prog="heatkernel", description="Rational heat-kernel pricing engine")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("curve", parents=[common, run], help="model discount curve and coefficients")
    commands.add_parser("price", parents=[common, run], help="price the configured instruments")
    commands.add_parser("simulate", parents=[common, run], help="simulate LRB paths and SDE coefficients")
    commands.add_parser("contagion", parents=[common, run], help="run the sovereign contagion scenario")
    commands.add_parser("verify", parents=[common, run], help="run the verification checks")
    plot = commands.add_parser("plot", parents=[common], help="render result CSVs as SVG charts")
    plot.add_argument("inputs", nargs="+", help="CSV files in a documented schema")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, settings.log_level.upper(), logging.INFO), format=settings.log_format)
    try:
        exporter = Exporter(get_output_dir(args.out))
        if args.command == "plot":
            return cmd_plot(args, exporter)
        if args.paths is not None and args.paths < 1:
            raise ConfigError("--paths must be at least 1", path="--paths")
        config = load_config(Path(args.config), {"seed": args.seed, "n_paths": args.paths})
        return COMMANDS[args.command](config, args, exporter)
    except (ConfigError, PlotError) as e:
        logger.error(str(e))
        return EXIT_CONFIG
    except HeatKernelError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
