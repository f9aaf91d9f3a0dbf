"""Command-line entry point: ``wsvol <subcommand> [--config FILE] [overrides]``."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .config import RunConfig, load_config
from .decomposition import (
    decompose,
    format_energy,
    passive_storage_requirement,
    scale_to_demand,
    storage_fluctuation,
)
from .smartmeter import MINUTES_PER_DAY, ScenarioConfig, prepare_inputs, simulate, wasted_power_stats
from .sweep import (
    DEFAULT_TAUS_MINUTES,
    INVERSION_HEADER,
    FleetSpec,
    fleet_size,
    invert_tau,
    model_for,
    sweep_surface,
)
from .timeseries import (
    DataError,
    ParseError,
    SyntheticSpec,
    dataset_to_csv,
    format_timestamp,
    parse_dataset,
    synthesize,
    total_volatile,
)

EXIT_OK = 0
EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_UNREACHABLE = 5

REFERENCE_FLEET = {"nominal_mw": 650000.0, 1.5: 430000, 6.0: 110000}


def _digest(path) -> str:
    if path is None:
        return "none"
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _provenance(cfg: RunConfig, input_path, command):
    return [
        f"wsvol {__version__} {command}",
        f"input_sha256={_digest(input_path)}",
        f"config: {cfg.echo()}",
    ]


def _write(out_dir, name, text):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text, encoding="utf-8", newline="\n")
    return out / name


def _require_data(cfg):
    if not cfg.data:
        raise DataError("no dataset given (use --data or 'data =' in the config)")
    return parse_dataset(cfg.data, cfg.step_minutes)


def _taus_minutes(cfg):
    if cfg.taus_days is None:
        return DEFAULT_TAUS_MINUTES
    return tuple(int(round(t * MINUTES_PER_DAY)) for t in cfg.taus_days)


def _cap_mwh(cfg):
    return None if cfg.storage_cap_gwh is None else cfg.storage_cap_gwh * 1e3


def cmd_ingest(cfg: RunConfig):
    d = _require_data(cfg)
    means = d.channel_means()
    print(f"rows={len(d)} step_minutes={d.step_minutes} start={d.load.start_time.isoformat()}")
    print("grid: uniform, no gaps")
    for name, m in means.items():
        print(f"mean_{name}_mw={m:.6g}")
    print(f"mean_volatile_mw={total_volatile(d).mean():.6g}")
    return EXIT_OK


def cmd_synth(cfg: RunConfig):
    if not cfg.spec:
        raise DataError("synth needs --spec FILE (JSON)")
    spec_dict = json.loads(Path(cfg.spec).read_text())
    if cfg.seed is not None:
        spec_dict["seed"] = cfg.seed
    try:
        spec = SyntheticSpec.from_dict(spec_dict)
    except TypeError as exc:
        raise DataError(f"bad synthetic spec: {exc}") from None
    d = synthesize(spec)
    path = _write(cfg.out, "dataset.csv", dataset_to_csv(d, _provenance(cfg, cfg.spec, "synth")))
    print(f"wrote {path} ({len(d)} rows)")
    return EXIT_OK


def cmd_decompose(cfg: RunConfig):
    d = _require_data(cfg)
    head = _provenance(cfg, cfg.data, "decompose")
    raw_v = total_volatile(d)
    dec_d = decompose(d.load)
    dec_v = decompose(scale_to_demand(raw_v, dec_d.average))
    e_sf = storage_fluctuation(dec_v, dec_d)
    req = passive_storage_requirement(e_sf)
    _write(cfg.out, "e_vf.csv", dec_v.cumulative_fluct.to_csv(head))
    _write(cfg.out, "e_df.csv", dec_d.cumulative_fluct.to_csv(head))
    _write(cfg.out, "e_sf.csv", e_sf.to_csv(head))
    lines = [
        f"p_da_mw={dec_d.average:.6g}",
        f"p_va_unscaled_mw={raw_v.mean():.6g}",
        f"scaling_factor={dec_d.average / raw_v.mean():.6g}" if raw_v.mean() > 0 else "scaling_factor=nan",
        f"passive_storage_mwh={req:.10g}",
        f"passive_storage={format_energy(req)}",
    ]
    _write(cfg.out, "summary.txt", "\n".join(["# " + h for h in head] + lines) + "\n")
    print("\n".join(lines))
    return EXIT_OK


def cmd_simulate(cfg: RunConfig):
    d = _require_data(cfg)
    head = _provenance(cfg, cfg.data, "simulate")
    inputs = prepare_inputs(d)
    model = model_for(cfg.model, inputs, cfg.alpha, cfg.p_nom_mw, cfg.gain)
    sc = ScenarioConfig.from_days(model, cfg.tau_days, storage_cap_mwh=_cap_mwh(cfg))
    r = simulate(inputs.demand_energy, inputs.volatile, sc)
    _write(cfg.out, "trajectory.csv", r.trajectory_csv(head))
    lines = [r.summary()]
    if r.shortfall_total > 0:
        lines.append(f"shortfall_twh={r.shortfall_total / 1e6:.6g}")
    if cfg.window_hours is not None:
        rolling, annual = wasted_power_stats(r, int(round(cfg.window_hours * 60)))
        lines.append(f"wasted_mean_gw={annual / 1e3:.6g}")
        _write(cfg.out, "wasted_rolling.csv", _power_csv(rolling, head))
    _write(cfg.out, "summary.txt", "\n".join(["# " + h for h in head] + lines) + "\n")
    print("\n".join(lines))
    return EXIT_OK


def _power_csv(p, head):
    rows = [f"# {h}" for h in head] + ["timestamp_utc,value_mw"]
    rows += [f"{format_timestamp(t)},{float(v)!r}" for t, v in zip(p.timestamps(), p.values)]
    return "\n".join(rows) + "\n"


def _inversion_csv(grid, targets_gwh, head):
    rows = [f"# {h}" for h in head] + [INVERSION_HEADER]
    unreachable = False
    for a in grid.alphas:
        for t in targets_gwh:
            inv = invert_tau(grid, a, t * 1e3)
            unreachable |= inv.status == "unreachable"
            rows.append(inv.csv_row())
    return "\n".join(rows) + "\n", unreachable


def _run_sweep(cfg):
    inputs = prepare_inputs(_require_data(cfg))
    model = model_for(cfg.model, inputs, 0.0, cfg.p_nom_mw, cfg.gain)
    return sweep_surface(
        inputs, model, cfg.alphas, _taus_minutes(cfg), _cap_mwh(cfg), cfg.cache_dir, cfg.workers
    )


def cmd_sweep(cfg: RunConfig):
    grid = _run_sweep(cfg)
    head = _provenance(cfg, cfg.data, "sweep")
    path = _write(cfg.out, "surface.csv", grid.to_csv(head))
    print(f"wrote {path} ({len(grid.alphas)} x {len(grid.taus_minutes)})")
    for kind, a, t in grid.non_monotone():
        print(f"warning: non-monotone in {kind} at alpha={a:g} tau_days={t / MINUTES_PER_DAY:g}")
    code = EXIT_OK
    if cfg.targets_gwh:
        text, unreachable = _inversion_csv(grid, cfg.targets_gwh, head)
        _write(cfg.out, "inversion.csv", text)
        code = EXIT_UNREACHABLE if unreachable else EXIT_OK
    return code


def cmd_invert(cfg: RunConfig):
    if not cfg.targets_gwh:
        raise DataError("invert needs --targets-gwh")
    grid = _run_sweep(cfg)
    text, unreachable = _inversion_csv(grid, cfg.targets_gwh, _provenance(cfg, cfg.data, "invert"))
    _write(cfg.out, "inversion.csv", text)
    sys.stdout.write(text)
    return EXIT_UNREACHABLE if unreachable else EXIT_OK


def cmd_fleet(cfg: RunConfig):
    print("turbine_mw,nominal_mw,turbine_count,reference_count")
    for unit in cfg.turbine_mw:
        spec = FleetSpec(cfg.target_average_mw, cfg.capacity_factor, cfg.solar_share, unit)
        nominal, count = fleet_size(spec)
        ref = REFERENCE_FLEET.get(unit, "")
        print(f"{unit:g},{nominal:.1f},{count},{ref}")
    # reference figures are rounded; the formula gives 666667 MW for the default inputs
    print(
        "note: reference figures (650000 MW nominal; 430000 x 1.5 MW, 110000 x 6 MW) are rounded "
        "and imply a solar share slightly below 1/3; values above are the exact formula "
        "target*(1-solar_share)/capacity_factor"
    )
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "synth": cmd_synth,
    "decompose": cmd_decompose,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "invert": cmd_invert,
    "fleet": cmd_fleet,
}


def build_parser():
    p = argparse.ArgumentParser(prog="wsvol", description=__doc__)
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--data", help="canonical dataset CSV")
    p.add_argument("--step-minutes", type=int, help="expected grid step (default 15)")
    p.add_argument("--spec", help="synthetic spec JSON (synth)")
    p.add_argument("--model", choices=["constant", "low_tanh", "offshore"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--gain", type=float)
    p.add_argument("--p-nom-mw", type=float)
    p.add_argument("--tau-days", type=float)
    p.add_argument("--storage-cap-gwh", type=float)
    p.add_argument("--alphas", help="comma-separated alpha axis")
    p.add_argument("--taus-days", help="comma-separated tau axis in days")
    p.add_argument("--targets-gwh", help="comma-separated storage targets")
    p.add_argument("--window-hours", type=float, help="rolling window for wasted power")
    p.add_argument("--workers", type=int)
    p.add_argument("--cache-dir")
    p.add_argument("--target-average-mw", type=float)
    p.add_argument("--capacity-factor", type=float)
    p.add_argument("--solar-share", type=float)
    p.add_argument("--turbine-mw", help="comma-separated turbine sizes")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        cfg = load_config(args.config, overrides)
        return COMMANDS[args.command](cfg)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DataError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
