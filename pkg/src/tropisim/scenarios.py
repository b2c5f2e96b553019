"""Study drivers: component edits, closed-building runs, permeability sweeps, wind study, case comparison."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .metrics import SEASON_DAYS, CriteriaSummary, periodic_trapezoid_kwh, summarize
from .model import BuildingModel, Construction, LargeOpening, Layer, Material, validate
from .simulation import SimulationConfig, SimulationResult, simulate
from .weather import WIND_STUDY_DAYS, WeatherSequence

log = logging.getLogger(__name__)

INSULATION_MATERIAL = Material("added_insulation", 0.041, 30.0, 1030.0)
PERMEABILITY_RANGE = (0.15, 0.40)
SWEEP_STEPS = (0.15, 0.20, 0.25, 0.30, 0.35, 0.40)
MEASURES = ("roof", "walls", "windows", "ventilation")
ATTRIBUTION_METHOD = "one-at-a-time: each measure applied alone to the bad case, gains normalized to sum to 100%"


class ScenarioError(ValueError):
    pass


def _checked(model: BuildingModel) -> BuildingModel:
    problems = validate(model)
    if problems:
        raise ScenarioError(f"{model.name}: " + "; ".join(map(str, problems)))
    return model


# Component edits -------------------------------------------------------------

def _replace_constructions(model: BuildingModel, names, edit) -> BuildingModel:
    cons = tuple(edit(c) if c.name in names else c for c in model.constructions)
    return replace(model, constructions=cons)


def with_roof(model: BuildingModel, absorptivity: Optional[float] = None,
              insulation_cm: Optional[float] = None) -> BuildingModel:
    """Change the exterior colour and/or added insulation of every roof construction.

    Insulation goes in as one layer just inside the outermost layer, replacing
    any layer previously added this way.
    """
    names = {s.construction for s in model.surfaces if s.is_roof}
    materials = model.materials
    if insulation_cm is not None and INSULATION_MATERIAL.name not in model.material_map:
        materials = materials + (INSULATION_MATERIAL,)

    def edit(c: Construction) -> Construction:
        if absorptivity is not None:
            c = replace(c, exterior_absorptivity=absorptivity)
        if insulation_cm is not None:
            layers = [l for l in c.layers if l.material != INSULATION_MATERIAL.name]
            if insulation_cm > 0:
                layers.insert(1, Layer(INSULATION_MATERIAL.name, insulation_cm / 100.0))
            c = replace(c, layers=tuple(layers))
        return c

    return _checked(replace(_replace_constructions(model, names, edit), materials=materials))


def closed_building(model: BuildingModel) -> BuildingModel:
    """Drop every openable large opening; cracks and fixed openings stay."""
    links = tuple(l for l in model.links if not (isinstance(l.kind, LargeOpening) and l.kind.openable))
    return replace(model, name=f"{model.name}-closed", links=links)


def _check_permeability(p: float) -> None:
    lo, hi = PERMEABILITY_RANGE
    if not lo - 1e-12 <= p <= hi + 1e-12:
        raise ScenarioError(f"permeability {p} outside [{lo}, {hi}]")


def scale_permeability(model: BuildingModel, p_ext: float, p_int: float) -> BuildingModel:
    """Resize openable large openings so that opening area / room floor area hits the targets.

    Exterior openings of a room share its target area in proportion to their
    current areas; an interior opening is sized on the smaller of its two rooms.
    Heights are kept and widths scaled.
    """
    _check_permeability(p_ext)
    _check_permeability(p_int)
    zmap = model.zone_map
    ext_total: dict = {}
    for l in model.links:
        if isinstance(l.kind, LargeOpening) and l.kind.openable and len(l.zones()) == 1:
            z = l.zones()[0]
            ext_total[z] = ext_total.get(z, 0.0) + l.kind.area
    links = []
    for l in model.links:
        k = l.kind
        if not (isinstance(k, LargeOpening) and k.openable):
            links.append(l)
            continue
        zs = l.zones()
        if len(zs) == 1:
            target = p_ext * zmap[zs[0]].floor_area * k.area / ext_total[zs[0]]
        else:
            target = p_int * min(zmap[z].floor_area for z in zs)
        links.append(replace(l, kind=replace(k, width=target / k.height)))
    name = f"{model.name}-ext{round(100 * p_ext)}-int{round(100 * p_int)}"
    return _checked(replace(model, name=name, links=tuple(links)))


def override_discharge(model: BuildingModel, cd: float) -> BuildingModel:
    links = tuple(replace(l, kind=replace(l.kind, discharge_coefficient=cd)) if isinstance(l.kind, LargeOpening)
                  else l for l in model.links)
    return _checked(replace(model, links=links))


# Dwelling-level figures --------------------------------------------------------

def dwelling_ach(model: BuildingModel, result: SimulationResult) -> list[float]:
    """Hourly volume-weighted mean of the zone air-change rates (vol/h)."""
    vol = np.array([model.zone_map[z].volume for z in result.zone_ids])
    ach = np.array([result.ach[z] for z in result.zone_ids])
    return list((vol @ ach) / vol.sum())


def zone_summaries(model: BuildingModel, result: SimulationResult, season_days: int = SEASON_DAYS,
                   day: int = 0) -> dict:
    sl = slice(24 * day, 24 * (day + 1))
    return {z: summarize(result.t_res[z][sl], result.cooling[z][sl], model.zone_map[z].floor_area, season_days)
            for z in result.zone_ids}


def _area_weighted(model: BuildingModel, summaries: dict, attr: str) -> float:
    total = sum(model.zone_map[z].floor_area for z in summaries)
    return sum(getattr(s, attr) * model.zone_map[z].floor_area for z, s in summaries.items()) / total


@dataclass(frozen=True)
class DwellingFigures:
    day_resultant: float  # floor-area weighted over zones
    night_resultant: float
    max_resultant: float
    mean_ach: float
    cooling_kwh: float  # daily, all conditioned zones

    @classmethod
    def from_run(cls, model: BuildingModel, result: SimulationResult, season_days: int = SEASON_DAYS):
        s = zone_summaries(model, result, season_days)
        return cls(_area_weighted(model, s, "day_resultant"), _area_weighted(model, s, "night_resultant"),
                   max(v.max_resultant for v in s.values()), float(np.mean(dwelling_ach(model, result))),
                   sum(v.daily_energy for v in s.values()))


# Permeability sweep ------------------------------------------------------------

@dataclass(frozen=True)
class SweepCell:
    p_ext: float
    p_int: float
    mean_ach: float
    night_resultant: float
    day_resultant: float


def _sweep_cell(args) -> SweepCell:
    model, weather, p_ext, p_int, config = args
    scaled = scale_permeability(model, p_ext, p_int)
    fig = DwellingFigures.from_run(scaled, simulate(scaled, weather, config))
    return SweepCell(p_ext, p_int, fig.mean_ach, fig.night_resultant, fig.day_resultant)


def _map(fn, tasks, jobs: int):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def permeability_sweep(model: BuildingModel, weather: WeatherSequence, exterior: Sequence[float] = SWEEP_STEPS,
                       interior: Sequence[float] = SWEEP_STEPS, wind: Optional[tuple] = (1.0, 135.0),
                       config: Optional[SimulationConfig] = None, jobs: int = 1) -> list[SweepCell]:
    """Dwelling ACH and comfort for every (exterior, interior) permeability pair.

    ``wind`` (speed, direction) replaces the weather file's wind for the whole
    day; pass None to keep it. Cells are returned in row-major order of the
    inputs whatever the number of worker processes.
    """
    for p in list(exterior) + list(interior):
        _check_permeability(p)
    if wind is not None:
        weather = weather.with_wind(*wind)
    tasks = [(model, weather, pe, pi, config) for pe in exterior for pi in interior]
    return _map(_sweep_cell, tasks, jobs)


# Wind study ------------------------------------------------------------------

@dataclass(frozen=True)
class WindDay:
    day: int
    wind_speed: float
    wind_direction: float
    mean_ach: float
    zone_ach: dict
    result: SimulationResult


def _wind_day(args) -> WindDay:
    model, base, day, config = args
    speed, direction = WIND_STUDY_DAYS[day]
    result = simulate(model, base.with_wind(speed, direction), config)
    zone_ach = {z: float(np.mean(result.ach[z])) for z in result.zone_ids}
    return WindDay(day + 1, speed, direction, float(np.mean(dwelling_ach(model, result))), zone_ach, result)


def wind_study(model: BuildingModel, base_day: WeatherSequence, config: Optional[SimulationConfig] = None,
               jobs: int = 1) -> list[WindDay]:
    """The seven wind days, each simulated as its own periodic day so they can run independently."""
    base = WeatherSequence(tuple(base_day.records[:24]), base_day.site)
    tasks = [(model, base, d, config) for d in range(len(WIND_STUDY_DAYS))]
    return _map(_wind_day, tasks, jobs)


# Case comparison -----------------------------------------------------------

def _merge_named(first, second):
    out = {x.name: x for x in first}
    for x in second:
        if x.name in out and out[x.name] != x:
            raise ScenarioError(f"{x.name!r} is defined differently in the two cases")
        out.setdefault(x.name, x)
    return tuple(out.values())


def _measure_surfaces(s) -> Optional[str]:
    if s.is_roof:
        return "roof"
    if s.is_exterior and s.is_wall:
        return "walls"
    return None


def apply_measures(bad: BuildingModel, good: BuildingModel, measures: Sequence[str]) -> BuildingModel:
    """The bad case with the named measures taken from the good case."""
    unknown = set(measures) - set(MEASURES)
    if unknown:
        raise ScenarioError(f"unknown measures {sorted(unknown)}; choose from {MEASURES}")
    measures = set(measures)
    surfaces = [s for s in bad.surfaces if _measure_surfaces(s) not in measures]
    surfaces += [s for s in good.surfaces if _measure_surfaces(s) in measures]
    order = {s.id: i for i, s in enumerate(bad.surfaces)}
    surfaces.sort(key=lambda s: order.get(s.id, len(order)))
    glazings = good.glazings if "windows" in measures else bad.glazings
    links, fixed = bad.links, bad.fixed_air_changes
    if "ventilation" in measures:
        links, fixed = good.links, good.fixed_air_changes
    ecodom = bad.ecodom
    if "roof" in measures:
        ecodom = replace(ecodom, loft=good.ecodom.loft)
    tag = "+".join(m for m in MEASURES if m in measures) or "none"
    model = replace(bad, name=f"{bad.name}+{tag}", materials=_merge_named(bad.materials, good.materials),
                    constructions=_merge_named(bad.constructions, good.constructions), surfaces=tuple(surfaces),
                    glazings=glazings, links=links, fixed_air_changes=fixed, ecodom=ecodom)
    return _checked(model)


@dataclass(frozen=True)
class Comparison:
    bad: DwellingFigures
    good: DwellingFigures
    bad_zones: dict  # zone -> CriteriaSummary
    good_zones: dict
    criterion: str  # what the attribution measures
    gains: dict  # measure -> improvement of the criterion when applied alone
    shares: dict  # measure -> percent of the summed gains (None when gains do not sum to > 0)
    method: str = ATTRIBUTION_METHOD


def _run_figures(args):
    model, weather, config, season_days = args
    result = simulate(model, weather, config)
    return DwellingFigures.from_run(model, result, season_days), zone_summaries(model, result, season_days)


def case_compare(bad: BuildingModel, good: BuildingModel, weather: WeatherSequence,
                 config: Optional[SimulationConfig] = None, season_days: int = SEASON_DAYS,
                 measures: Sequence[str] = MEASURES, jobs: int = 1) -> Comparison:
    """Bad versus good dwelling plus a per-measure attribution of the improvement.

    Conditioned cases are attributed on daily cooling energy, free-floating ones
    on the day resultant temperature.
    """
    conditioned = any(z.conditioning is not None for z in bad.zones)
    variants = [apply_measures(bad, good, [m]) for m in measures]
    tasks = [(m, weather, config, season_days) for m in [bad, good] + variants]
    runs = _map(_run_figures, tasks, jobs)
    (bad_fig, bad_zones), (good_fig, good_zones) = runs[0], runs[1]
    attr = "cooling_kwh" if conditioned else "day_resultant"
    base = getattr(bad_fig, attr)
    gains = {m: base - getattr(fig, attr) for m, (fig, _) in zip(measures, runs[2:])}
    total = sum(gains.values())
    shares = {m: (100.0 * g / total if total > 0 else None) for m, g in gains.items()}
    return Comparison(bad_fig, good_fig, bad_zones, good_zones, attr, gains, shares)


def nightly_cooling_kwh(result: SimulationResult, zone: str) -> float:
    """Cooling energy of one zone over the first day, trapezoidal (the schedule confines it to the night)."""
    return periodic_trapezoid_kwh(result.cooling[zone][:24])


def criteria_dict(s: CriteriaSummary) -> dict:
    return {"day_resultant_C": s.day_resultant, "night_resultant_C": s.night_resultant,
            "max_resultant_C": s.max_resultant, "max_power_W": s.max_power, "max_power_W_m2": s.max_power_per_m2,
            "daily_energy_kWh": s.daily_energy, "seasonal_energy_kWh": s.seasonal_energy}
