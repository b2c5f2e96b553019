"""Command-line scenario runner.

    tropisim simulate  --building B.json --weather W.csv --out DIR
    tropisim windstudy --building B.json --weather W.csv --out DIR
    tropisim sweep     --building B.json --weather W.csv --out DIR [--ext 15,25 --int 15,25]
    tropisim compare   --building BAD.json --improved GOOD.json --weather W.csv --out DIR
    tropisim check     --building B.json [--rules DIR] --out DIR

Exit status: 0 success, 1 input error, 2 convergence failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .airflow import AirflowConvergenceError
from .building_io import BuildingFileError, load_building
from .ecodom import RuleTableError, check_building, load_rule_tables
from .metrics import SEASON_DAYS, WINDOW_SEMANTICS
from .model import validate
from .scenarios import (ATTRIBUTION_METHOD, SWEEP_STEPS, ScenarioError, case_compare, criteria_dict,
                        override_discharge, permeability_sweep, wind_study, zone_summaries)
from .simulation import SimulationConfig, SimulationResult, simulate
from .thermal import ThermalConfig
from .weather import WeatherError, load_weather, typical_day_path

log = logging.getLogger("tropisim")

SERIES_COLUMNS = ("hour", "zone", "T_air", "T_mr", "T_res", "w", "ACH", "cooling_W")
OVERRIDE_KEYS = ("h_in", "h_out_still", "h_out_wind", "nodes_per_layer", "cd", "cp_table", "wind_speed",
                 "wind_direction")


class InputError(ValueError):
    pass


def _g(x: float) -> str:
    return f"{x:.6g}"


def emit_series(result: SimulationResult, path, hour_offset: int = 0) -> None:
    """One row per hour per zone, fixed column order, 6 significant digits."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_COLUMNS)
        for k in range(len(result.hours)):
            for z in result.zone_ids:
                w.writerow([hour_offset + k, z, _g(result.t_air[z][k]), _g(result.t_mr[z][k]),
                            _g(result.t_res[z][k]), _g(result.humidity[z][k]), _g(result.ach[z][k]),
                            _g(result.cooling[z][k])])


def _write_json(path, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def parse_overrides(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in OVERRIDE_KEYS:
            raise InputError(f"bad override {item!r}; keys: {', '.join(OVERRIDE_KEYS)}")
        try:
            if key == "cp_table":
                pairs = [p.split(":") for p in value.split(";") if p.strip()]
                out[key] = tuple((float(a), float(c)) for a, c in pairs)
            elif key == "nodes_per_layer":
                out[key] = int(value)
            else:
                out[key] = float(value)
        except ValueError:
            raise InputError(f"bad value in override {item!r}") from None
    return out


def _config(ov: dict) -> SimulationConfig:
    thermal = ThermalConfig()
    fields = {k: ov[k] for k in ("h_in", "h_out_still", "h_out_wind", "nodes_per_layer") if k in ov}
    if fields:
        thermal = replace(thermal, **fields)
    return SimulationConfig(thermal=thermal, cp_table=ov.get("cp_table"))


def _building(path, ov: dict):
    if path is None:
        raise InputError("--building is required")
    model = load_building(path)
    problems = validate(model)
    if problems:
        raise InputError(f"{path}: " + "; ".join(map(str, problems)))
    if "cd" in ov:
        model = override_discharge(model, ov["cd"])
    return model


def _weather(path, ov: dict):
    weather = load_weather(path if path is not None else typical_day_path())
    if "wind_speed" in ov or "wind_direction" in ov:
        speed = ov.get("wind_speed", weather.records[0].wind_speed)
        direction = ov.get("wind_direction", weather.records[0].wind_direction)
        weather = weather.with_wind(speed, direction)
    return weather


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run_metadata(model, result: SimulationResult, season_days: int) -> dict:
    return {"building": model.name, "structure_class": model.structure_class, "windows": WINDOW_SEMANTICS,
            "season_days": season_days, "warmup_cycles": result.warmup_cycles,
            "nonconverged_steps": result.nonconverged_steps,
            "max_thermal_residual_W": result.max_thermal_residual,
            "max_airflow_residual_kg_s": result.max_airflow_residual,
            "max_moisture_residual_kg_s": result.max_moisture_residual}


def cmd_simulate(args, ov) -> int:
    model = _building(args.building, ov)
    weather = _weather(args.weather, ov)
    result = simulate(model, weather, _config(ov))
    out = _out(args)
    emit_series(result, out / "series.csv")
    days = len(result.hours) // 24
    summary = {"metadata": _run_metadata(model, result, args.season_days),
               "days": [{z: criteria_dict(s) for z, s in zone_summaries(model, result, args.season_days, d).items()}
                        for d in range(days)]}
    _write_json(out / "summary.json", summary)
    (out / "run.log").write_text("\n".join(result.log) + "\n")
    print(f"simulate: {model.name}, {len(result.hours)} h, {len(result.zone_ids)} zones -> {out}")
    return 0


def cmd_windstudy(args, ov) -> int:
    model = _building(args.building, ov)
    weather = _weather(args.weather, {})
    days = wind_study(model, weather, _config(ov), args.jobs)
    out = _out(args)
    with (out / "series.csv").open("w", newline="") as fh:
        fh.write(",".join(SERIES_COLUMNS) + "\n")
    for d in days:
        tmp = out / f".day{d.day}.csv"
        emit_series(d.result, tmp, hour_offset=24 * (d.day - 1))
        with (out / "series.csv").open("a") as fh:
            fh.write("".join(tmp.read_text().splitlines(keepends=True)[1:]))
        tmp.unlink()
    with (out / "ach_by_day.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        zones = list(days[0].zone_ach)
        w.writerow(["day", "wind_ms", "wind_dir_deg", "dwelling_ACH"] + [f"ACH_{z}" for z in zones])
        for d in days:
            w.writerow([d.day, _g(d.wind_speed), _g(d.wind_direction), _g(d.mean_ach)]
                       + [_g(d.zone_ach[z]) for z in zones])
    print(f"windstudy: {model.name}, 7 days -> {out}")
    return 0


def _percent_list(text) -> list[float]:
    if text is None:
        return list(SWEEP_STEPS)
    try:
        return [float(p) / 100.0 for p in text.split(",") if p.strip()]
    except ValueError:
        raise InputError(f"bad percentage list {text!r}") from None


def cmd_sweep(args, ov) -> int:
    model = _building(args.building, ov)
    weather = _weather(args.weather, {})
    wind = (ov.get("wind_speed", 1.0), ov.get("wind_direction", 135.0))
    cells = permeability_sweep(model, weather, _percent_list(args.ext), _percent_list(args.int), wind, _config(ov),
                               args.jobs)
    out = _out(args)
    with (out / "sweep.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ext_pct", "int_pct", "dwelling_ACH", "night_resultant_C", "day_resultant_C"])
        for c in cells:
            w.writerow([_g(100 * c.p_ext), _g(100 * c.p_int), _g(c.mean_ach), _g(c.night_resultant),
                        _g(c.day_resultant)])
    print(f"sweep: {model.name}, {len(cells)} cells, wind {wind[0]:g} m/s from {wind[1]:g} deg -> {out}")
    return 0


def cmd_compare(args, ov) -> int:
    if args.improved is None:
        raise InputError("compare needs --improved")
    bad = _building(args.building, ov)
    good = _building(args.improved, ov)
    weather = _weather(args.weather, ov)
    cmp = case_compare(bad, good, weather, _config(ov), args.season_days, jobs=args.jobs)
    doc = {
        "bad": {"building": bad.name, "dwelling": vars(cmp.bad),
                "zones": {z: criteria_dict(s) for z, s in cmp.bad_zones.items()}},
        "good": {"building": good.name, "dwelling": vars(cmp.good),
                 "zones": {z: criteria_dict(s) for z, s in cmp.good_zones.items()}},
        "attribution": {"criterion": cmp.criterion, "method": ATTRIBUTION_METHOD, "gains": cmp.gains,
                        "share_pct": cmp.shares},
        "metadata": {"windows": WINDOW_SEMANTICS, "season_days": args.season_days},
    }
    out = _out(args)
    _write_json(out / "compare.json", doc)
    lines = [f"{'':<22}{'bad':>10}{'good':>10}"]
    for key in ("day_resultant", "night_resultant", "max_resultant", "mean_ach", "cooling_kwh"):
        lines.append(f"{key:<22}{getattr(cmp.bad, key):>10.2f}{getattr(cmp.good, key):>10.2f}")
    lines.append(f"attribution of {cmp.criterion} ({ATTRIBUTION_METHOD})")
    for m, share in cmp.shares.items():
        lines.append(f"  {m:<12}{'n/a' if share is None else f'{share:.1f} %':>10}")
    (out / "compare.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return 0


def cmd_check(args, ov) -> int:
    model = _building(args.building, ov)
    tables = load_rule_tables(args.rules)
    report = check_building(model, tables)
    out = _out(args)
    _write_json(out / "report.json", report.to_dict())
    (out / "report.txt").write_text(report.summary())
    print(report.summary(), end="")
    return 0


COMMANDS = {"simulate": cmd_simulate, "windstudy": cmd_windstudy, "sweep": cmd_sweep, "compare": cmd_compare,
            "check": cmd_check}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tropisim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--building", help="building description (JSON)")
        p.add_argument("--weather", help="hourly weather CSV (default: bundled typical day)")
        p.add_argument("--rules", help="directory of rule tables (default: bundled)")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--override", action="append", metavar="KEY=VALUE",
                       help=f"one of {', '.join(OVERRIDE_KEYS)}; cp_table as 'angle:cp;angle:cp'")
        p.add_argument("--season-days", type=int, default=SEASON_DAYS)
        p.add_argument("--jobs", type=int, default=1, help="worker processes for independent runs")
        if name == "compare":
            p.add_argument("--improved", help="improved building description (JSON)")
        if name == "sweep":
            p.add_argument("--ext", help="exterior permeabilities in percent, comma separated")
            p.add_argument("--int", help="interior permeabilities in percent, comma separated")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        ov = parse_overrides(args.override)
        return COMMANDS[args.command](args, ov)
    except AirflowConvergenceError as exc:
        print(f"error: airflow did not converge: {exc}", file=sys.stderr)
        return 2
    except (InputError, BuildingFileError, WeatherError, RuleTableError, ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
