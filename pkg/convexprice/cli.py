"""Command-line interface: ``convexprice frontier|shares|estimate|price|validate``.

Data goes to stdout (or ``--out``), diagnostics and logs to stderr.
Exit codes: 0 success, 1 invalid input, 2 internal invariant failure.
"""

import functools
from pathlib import Path
from typing import Annotated, Callable, Optional

import typer
from rich.console import Console
from rich.table import Table

from convexprice.config import RunConfig, load_run_config
from convexprice.distribution import PreferenceCdf, Uniform01, cdf_to_json, estimate_mixture
from convexprice.errors import InputError, InputFormatError, InvariantViolation
from convexprice.fileio import (
    curve_csv,
    dump_json,
    frontier_csv,
    parse_normalization,
    read_cdf,
    read_history,
    read_listings,
    shares_csv,
    write_text,
)
from convexprice.frontier import classify, upper_frontier
from convexprice.logs import configure_logging, get_logger
from convexprice.market_model import normalize_market, raw_price_for
from convexprice.oracle import SweepConfig, run_oracle_suite
from convexprice.plotting import write_profit_curve_svg
from convexprice.preference import market_shares
from convexprice.pricing import build_problem, optimize_price

log = get_logger(__name__)

app = typer.Typer(add_completion=False, no_args_is_help=True, help="Convex-frontier market shares and pricing.")

ConfigOption = Annotated[Optional[Path], typer.Option("--config", help="JSON run configuration file.")]
OutOption = Annotated[Optional[Path], typer.Option("--out", help="Write the result here instead of stdout.")]
NormalizationOption = Annotated[
    Optional[str], typer.Option("--normalization", help="NormalizationConfig as inline JSON or a JSON file.")
]
LogLevelOption = Annotated[Optional[str], typer.Option("--log-level", help="DEBUG, INFO, WARNING or ERROR.")]
LogJsonOption = Annotated[Optional[bool], typer.Option("--log-json/--log-console", help="Log records as JSON lines.")]
UniformOption = Annotated[bool, typer.Option("--uniform", help="Uniform preference distribution on [0, 1].")]
CdfOption = Annotated[Optional[Path], typer.Option("--cdf", help="Preference distribution JSON file.")]
HistoryOption = Annotated[Optional[Path], typer.Option("--history", help="Purchase history CSV to estimate from.")]
RepOption = Annotated[Optional[float], typer.Option("--rep", help="Raw reputation of the focal seller.")]
FocalIdOption = Annotated[
    Optional[str], typer.Option("--focal-id", help="Id of the focal seller's row in the CSV (removed from competitors).")
]
CeilingOption = Annotated[Optional[float], typer.Option("--ceiling", help="Profit ceiling C in (C - p) * share.")]


def _handled(command: Callable) -> Callable:
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except InputError as exc:
            typer.echo(f"{type(exc).__name__}: {exc}", err=True)
            raise typer.Exit(code=1) from exc
        except InvariantViolation as exc:
            typer.echo(f"{type(exc).__name__}: {exc}", err=True)
            raise typer.Exit(code=2) from exc

    return wrapper


def _source_overrides(uniform: bool, cdf: Optional[Path], history: Optional[Path]) -> dict:
    if uniform + (cdf is not None) + (history is not None) > 1:
        raise InputFormatError("give at most one of --uniform, --cdf and --history")
    if uniform:
        return {"cdf_source": "uniform"}
    if cdf is not None:
        return {"cdf_source": "file", "cdf_path": cdf}
    if history is not None:
        return {"cdf_source": "history", "history_path": history}
    return {}


def _setup(config: Optional[Path], normalization: Optional[str], log_level: Optional[str], log_json: Optional[bool], **overrides) -> RunConfig:
    cfg = load_run_config(
        config,
        normalization=parse_normalization(normalization),
        log_level=log_level,
        log_json=log_json,
        **overrides,
    )
    configure_logging(cfg.log_level, cfg.log_json)
    return cfg


def _resolve_cdf(cfg: RunConfig) -> PreferenceCdf:
    if cfg.cdf_source == "file":
        return read_cdf(cfg.cdf_path)
    if cfg.cdf_source == "history":
        return estimate_mixture(read_history(cfg.history_path, cfg.normalization)).cdf
    return Uniform01()


@app.command()
@_handled
def frontier(
    market: Annotated[Path, typer.Argument(help="Listings CSV with header id,price,reputation.")],
    out: OutOption = None,
    config: ConfigOption = None,
    normalization: NormalizationOption = None,
    log_level: LogLevelOption = None,
    log_json: LogJsonOption = None,
) -> None:
    """Classify every listing as frontier vertex, interior or dominated."""
    cfg = _setup(config, normalization, log_level, log_json, out=out)
    snapshot = normalize_market(read_listings(market), cfg.normalization, label=str(market))
    classification = classify(snapshot, upper_frontier(snapshot))
    write_text(frontier_csv(snapshot, classification), cfg.out)


@app.command()
@_handled
def shares(
    market: Annotated[Path, typer.Argument(help="Listings CSV with header id,price,reputation.")],
    uniform: UniformOption = False,
    cdf: CdfOption = None,
    history: HistoryOption = None,
    out: OutOption = None,
    config: ConfigOption = None,
    normalization: NormalizationOption = None,
    log_level: LogLevelOption = None,
    log_json: LogJsonOption = None,
) -> None:
    """Alpha interval and market share of each frontier vertex."""
    cfg = _setup(config, normalization, log_level, log_json, out=out, **_source_overrides(uniform, cdf, history))
    snapshot = normalize_market(read_listings(market), cfg.normalization, label=str(market))
    table = market_shares(upper_frontier(snapshot), _resolve_cdf(cfg))
    write_text(shares_csv(table), cfg.out)


@app.command()
@_handled
def estimate(
    history: Annotated[Path, typer.Argument(help="History CSV: market_label,id,price,reputation,chosen.")],
    out: OutOption = None,
    config: ConfigOption = None,
    normalization: NormalizationOption = None,
    log_level: LogLevelOption = None,
    log_json: LogJsonOption = None,
) -> None:
    """Estimate the preference distribution from purchase history."""
    cfg = _setup(config, normalization, log_level, log_json, out=out)
    result = estimate_mixture(read_history(history, cfg.normalization))
    write_text(cdf_to_json(result.cdf) + "\n", cfg.out)
    typer.echo(f"records used={result.used} excluded={result.excluded}", err=True)


@app.command()
@_handled
def price(
    competitors: Annotated[Path, typer.Argument(help="Competitor listings CSV.")],
    rep: RepOption = None,
    focal_id: FocalIdOption = None,
    ceiling: CeilingOption = None,
    uniform: UniformOption = False,
    cdf: CdfOption = None,
    history: HistoryOption = None,
    p_min: Annotated[Optional[float], typer.Option("--p-min", help="Smallest admissible normalized price.")] = None,
    curve: Annotated[Optional[Path], typer.Option("--curve", help="Write p,share,profit samples as CSV.")] = None,
    svg: Annotated[Optional[Path], typer.Option("--svg", help="Write the profit curve as SVG.")] = None,
    curve_points: Annotated[Optional[int], typer.Option("--curve-points", help="Samples in the profit curve.")] = None,
    out: OutOption = None,
    config: ConfigOption = None,
    normalization: NormalizationOption = None,
    log_level: LogLevelOption = None,
    log_json: LogJsonOption = None,
) -> None:
    """Profit-maximizing price for a seller with a fixed reputation."""
    cfg = _setup(
        config,
        normalization,
        log_level,
        log_json,
        out=out,
        ceiling=ceiling,
        p_min_admissible=p_min,
        curve_path=curve,
        svg_path=svg,
        curve_points=curve_points,
        **_source_overrides(uniform, cdf, history),
    )
    listings = read_listings(competitors)
    problem = build_problem(
        listings, rep, cfg.normalization, cfg.ceiling, _resolve_cdf(cfg), focal_id, cfg.p_min_admissible
    )
    wants_curve = cfg.curve_path is not None or cfg.svg_path is not None
    solution = optimize_price(problem, cfg.curve_points if wants_curve else 0)

    prices = [listing.price for listing in listings if focal_id is None or listing.id != focal_id]
    interval = solution.interval
    payload = {
        "p_star": solution.p_star,
        "raw_price_equivalent": raw_price_for(solution.p_star, prices, cfg.normalization),
        "profit": solution.profit,
        "share": solution.share,
        "interval": {
            "index": solution.interval_index,
            "p_lo": interval.p_lo,
            "p_hi": interval.p_hi,
            "kind": interval.kind.value,
            "left": interval.left.id if interval.left is not None else None,
            "right": interval.right.id if interval.right is not None else None,
        },
    }
    write_text(dump_json(payload), cfg.out)
    if cfg.curve_path is not None:
        write_text(curve_csv(solution.curve), cfg.curve_path)
    if cfg.svg_path is not None:
        write_profit_curve_svg(cfg.svg_path, solution.curve, problem.intervals.breakpoints, solution.p_star)


@app.command()
@_handled
def validate(
    market: Annotated[Path, typer.Argument(help="Listings CSV with header id,price,reputation.")],
    rep: RepOption = None,
    focal_id: FocalIdOption = None,
    ceiling: CeilingOption = None,
    uniform: UniformOption = False,
    cdf: CdfOption = None,
    history: HistoryOption = None,
    grid_points: Annotated[Optional[int], typer.Option("--grid-points", help="Alpha grid size.")] = None,
    price_grid_points: Annotated[Optional[int], typer.Option("--price-grid-points", help="Price grid size.")] = None,
    config: ConfigOption = None,
    normalization: NormalizationOption = None,
    log_level: LogLevelOption = None,
    log_json: LogJsonOption = None,
) -> None:
    """Check the analytic results against brute-force grids; exit 2 on any failure."""
    cfg = _setup(
        config,
        normalization,
        log_level,
        log_json,
        ceiling=ceiling,
        grid_points=grid_points,
        price_grid_points=price_grid_points,
        **_source_overrides(uniform, cdf, history),
    )
    listings = read_listings(market)
    snapshot = normalize_market(listings, cfg.normalization, label=str(market))
    preference = _resolve_cdf(cfg)
    problem = None
    if rep is not None or focal_id is not None:
        problem = build_problem(
            listings, rep, cfg.normalization, cfg.ceiling, preference, focal_id, cfg.p_min_admissible
        )
    report = run_oracle_suite(
        snapshot, preference, problem, SweepConfig(grid_points=cfg.grid_points), cfg.price_grid_points
    )

    table = Table(title=f"oracle checks: {market.name}")
    table.add_column("check")
    table.add_column("result")
    table.add_column("detail")
    for check in report.checks:
        table.add_row(check.name, "pass" if check.passed else "FAIL", check.detail)
    Console().print(table)
    if not report.passed:
        log.warning("oracle_checks_failed", failed=[check.name for check in report.failures()])
        raise typer.Exit(code=2)
