"""Command-line entry point: ``netload-uq <command> [--config ...]``.

Every command writes a JSON document plus a flat CSV into the output
directory and logs progress to standard error only. Failures print a single
JSON object ``{"error": ..., "message": ...}`` to standard error and exit
with status 2 (bad input or config) or 1 (anything else).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Sequence

from .config import RunConfig, load_config
from .errors import ConfigError, IncompatibleResolution, NetloadError, ParseError
from .interaction import monte_carlo_interaction
from .io import load_profile, write_json, write_rows
from .metrics_basefree import ramp_rate
from .profile_core import TimeSeriesProfile, resample_minutes
from .report import METRIC_NAMES, compute_metrics
from .scenario import EvRealization, PvProfile, evaluate_scenario, sweep
from .sensitivity import first_order_indices_with_baseload, per_consumer_indices
from .synthetic import synthetic_base_load, synthetic_pool, synthetic_pv_shape

log = logging.getLogger("netload_uq")


def _package_version() -> str:
    try:
        return version("netload-uq")
    except PackageNotFoundError:
        return "unknown"


def provenance(config: RunConfig, command: str) -> dict[str, Any]:
    return {
        "command": command,
        "config_hash": config.config_hash(),
        "seed": config.seed,
        "version": _package_version(),
    }


# --------------------------------------------------------------------------- #
# Inputs
# --------------------------------------------------------------------------- #


def _pv_like(base: TimeSeriesProfile, config: RunConfig) -> TimeSeriesProfile:
    """Synthetic per-kWp PV shape on the same clock as ``base``."""
    midnight = base.start.replace(hour=0, minute=0, second=0, microsecond=0)
    offset = int(round((base.start - midnight).total_seconds() / 3600.0 / base.dt))
    t_per_day = round(24.0 / base.dt)
    n_days = math.ceil((offset + base.n) / t_per_day)
    full = synthetic_pv_shape(n_days, base.dt, midnight, config.seed, config.inputs.pv_annual_yield)
    return base.with_values(full.values[offset : offset + base.n])


def load_base(config: RunConfig, dt_h: float | None = None) -> TimeSeriesProfile:
    if config.inputs.base is not None:
        return load_profile(config.inputs.base)
    syn = config.inputs.synthetic
    return synthetic_base_load(
        syn.kind, syn.n_days, dt_h or syn.dt_h, seed=config.seed, annual_kwh=syn.annual_kwh
    )


def load_pv(config: RunConfig, base: TimeSeriesProfile) -> PvProfile:
    if config.inputs.pv_norm is not None:
        return PvProfile.of(load_profile(config.inputs.pv_norm))
    return PvProfile.of(_pv_like(base, config))


def load_pool(config: RunConfig, size: int) -> list[TimeSeriesProfile]:
    """Base profiles for multi-consumer runs: the input file, or a synthetic pool."""
    if config.inputs.base is not None:
        return [load_profile(config.inputs.base)]
    syn = config.inputs.synthetic
    return synthetic_pool(syn.kind, size, syn.n_days, syn.dt_h, seed=config.seed)


# --------------------------------------------------------------------------- #
# Commands
# --------------------------------------------------------------------------- #


def _metric_row(report, **extra) -> dict[str, Any]:
    return {**extra, **{m: report.values[m] for m in METRIC_NAMES}}


def run_metrics(config: RunConfig, out: Path) -> dict[str, Any]:
    """Base load alone, then each PV level without EV and each EV level without PV."""
    options = config.metrics.options()
    base = load_base(config)
    pv = load_pv(config, base)
    realization = EvRealization(base, config.ev_model.params(config.seed), config.seed)
    cases = [("base", 0.0, 0.0)]
    cases += [("pv", lv, 0.0) for lv in config.grid.pv_levels if lv > 0]
    cases += [("ev", 0.0, lv) for lv in config.grid.ev_levels if lv > 0]
    reports = []
    for label, pv_kwp, ev_kw in cases:
        log.info("metrics: %s pv=%g kWp ev=%g kW", label, pv_kwp, ev_kw)
        r = evaluate_scenario(base, pv, realization, pv_kwp, ev_kw, options)
        r.scenario["case"] = label
        reports.append(r)
    doc = {"provenance": provenance(config, "metrics"), "reports": [r.to_dict() for r in reports]}
    write_json(doc, out / "metrics.json")
    rows = [_metric_row(r, case=r.scenario["case"], pv_kwp=r.scenario["pv_kwp"], ev_kw=r.scenario["ev_kw"])
            for r in reports]
    write_rows(rows, out / "metrics.csv")
    return doc


def run_sweep(config: RunConfig, out: Path) -> dict[str, Any]:
    """Full PV x EV grid; the heatmap CSV holds (pv, ev, metric, value) rows."""
    base = load_base(config)
    pv = load_pv(config, base)
    log.info("sweep: %d x %d cells", len(config.grid.pv_levels), len(config.grid.ev_levels))
    result = sweep(base, pv, config.ev_model.params(config.seed), config.grid.pv_levels,
                   config.grid.ev_levels, config.seed, config.metrics.options(), config.threads)
    doc = {"provenance": provenance(config, "sweep"), **result.to_dict()}
    write_json(doc, out / "sweep.json")
    rows = [{"pv_kwp": pv_, "ev_kw": ev_, "metric": m, "value": v}
            for pv_, ev_, m, v in result.heatmap_rows(METRIC_NAMES)]
    write_rows(rows, out / "heatmap.csv", ["pv_kwp", "ev_kw", "metric", "value"])
    return doc


def run_sensitivity(config: RunConfig, out: Path) -> dict[str, Any]:
    """Per-consumer PV/EV indices and their mean; optionally the base-profile variant."""
    options = config.metrics.options()
    params = config.ev_model.params(config.seed)
    consumers = load_pool(config, config.sensitivity.consumers)
    pv = load_pv(config, consumers[0])
    log.info("sensitivity: %d consumer(s)", len(consumers))
    each, mean = per_consumer_indices(consumers, pv, params, config.grid.pv_levels, config.grid.ev_levels,
                                      config.seed, options, max_workers=config.threads)
    doc: dict[str, Any] = {
        "provenance": provenance(config, "sensitivity"),
        "per_consumer": [r.to_dict() for r in each],
        "mean": mean.to_dict(),
    }
    rows = [{"variant": "pv_ev", **row} for row in mean.rows()]
    if config.sensitivity.pool_size >= 2:
        pool = load_pool(config, config.sensitivity.pool_size)
        if len(pool) < 2:
            raise ConfigError("sensitivity.pool_size needs synthetic inputs (a single base file gives one profile)")
        log.info("sensitivity: base-load pool of %d", len(pool))
        with_base = first_order_indices_with_baseload(pool, load_pv(config, pool[0]), params,
                                                      config.grid.pv_levels, config.grid.ev_levels,
                                                      config.seed, options, max_workers=config.threads)
        doc["with_base"] = with_base.to_dict()
        rows += [{"variant": "base_pv_ev", **row} for row in with_base.rows()]
    write_json(doc, out / "sensitivity.json")
    write_rows(rows, out / "sensitivity.csv", ["variant", "metric", "s_b", "s_pv", "s_ev", "residual"])
    return doc


def run_interaction(config: RunConfig, out: Path) -> dict[str, Any]:
    ic = config.interaction
    pool = load_pool(config, ic.pool_size)
    pv = load_pv(config, pool[0])
    log.info("interaction: %d draws over a pool of %d", ic.n_iter, len(pool))
    summary = monte_carlo_interaction(
        pool, pv, config.ev_model.params(config.seed), ic.pv_level, ic.ev_level,
        n_iter=ic.n_iter, seed=config.seed, options=config.metrics.options(), levels=ic.levels,
    )
    doc = {"provenance": provenance(config, "interaction"), **summary.to_dict()}
    write_json(doc, out / "interaction.json")
    write_rows(summary.rows(), out / "interaction.csv")
    return doc


def run_resample(config: RunConfig, out: Path) -> dict[str, Any]:
    """Metrics of the base load at each resolution, with a kW/min ramp-rate column.

    Synthetic inputs are generated at the finest requested resolution;
    file inputs must be at least that fine.
    """
    options = config.metrics.options()
    finest = min(config.resolutions_min)
    base = load_base(config, dt_h=finest / 60.0)
    reports, rows = [], []
    for minutes in config.resolutions_min:
        try:
            coarse = resample_minutes(base, minutes)
        except IncompatibleResolution as err:
            raise IncompatibleResolution(
                f"cannot resample {base.dt * 60:g}-min data to {minutes:g} min: {err}"
            ) from None
        log.info("resample: %g min (%d samples)", minutes, coarse.n)
        r = compute_metrics(coarse, coarse, options, {"resolution_min": minutes})
        rate = ramp_rate(coarse)
        r.diagnostics["ramp_rate_kw_per_min"] = rate
        reports.append(r)
        rows.append(_metric_row(r, resolution_min=minutes, ramp_rate=rate))
    doc = {"provenance": provenance(config, "resample"), "reports": [r.to_dict() for r in reports]}
    write_json(doc, out / "resample.json")
    write_rows(rows, out / "resample.csv")
    return doc


COMMANDS = {
    "metrics": run_metrics,
    "sweep": run_sweep,
    "sensitivity": run_sensitivity,
    "interaction": run_interaction,
    "resample": run_resample,
}


# --------------------------------------------------------------------------- #
# Entry point
# --------------------------------------------------------------------------- #


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netload-uq", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run config (defaults apply when omitted)")
    common.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
    common.add_argument("--seed", type=int, help="random seed, 0 <= seed < 2**64 (overrides seed)")
    common.add_argument("--threads", type=int, help="worker threads for sweeps (overrides threads)")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=(fn.__doc__ or name).splitlines()[0])
    return parser


def _apply_flags(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    doc = config.model_dump()
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.threads is not None:
        doc["threads"] = args.threads
    if args.out is not None:
        doc["output_dir"] = str(args.out)
    try:
        return RunConfig.model_validate(doc)
    except Exception as err:
        raise ConfigError(f"invalid command-line override: {err}") from None


def _fail(err: BaseException, code: int) -> int:
    payload: dict[str, Any] = {"error": type(err).__name__, "message": str(err)}
    if isinstance(err, ParseError) and err.line is not None:
        payload["line"] = err.line
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = _apply_flags(load_config(args.config), args)
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](config, out)
    except (NetloadError, OSError) as err:
        return _fail(err, 2)
    except Exception as err:  # pragma: no cover - last-resort structured error
        log.debug("unexpected failure", exc_info=True)
        return _fail(err, 1)
    log.info("%s: wrote results to %s", args.command, out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
