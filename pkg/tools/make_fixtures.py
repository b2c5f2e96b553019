"""Regenerate the bundled building and weather fixtures.

Run from the repository root:  python3 tools/make_fixtures.py
"""

from __future__ import annotations

import math
from datetime import datetime, timedelta

from tropisim.building_io import DATA_DIR, dump_building
from tropisim.model import (EXTERIOR, GROUND, ACOption, Adjacent, AirflowLink, BuildingModel, Construction, Crack,
                            EcodomInfo, InfinitePower, LargeOpening, Layer, LoftInfo, Material, Outside,
                            OverhangGeometry, Site, SitingInfo, Surface, Glazing, WaterHeater, Zone,
                            default_gain_schedule, hour_flags, interval_hours, validate)
from tropisim.solar import solar_position
from tropisim.weather import WeatherRecord, write_weather

MATERIALS = (
    Material("steel", 50.0, 7800.0, 450.0),
    Material("loft_air", 0.8, 1.2, 1006.0),  # ventilated roof space as an equivalent layer
    Material("plasterboard", 0.25, 850.0, 1000.0),
    Material("timber", 0.13, 500.0, 1600.0),
    Material("air_gap", 0.28, 1.2, 1006.0),
    Material("concrete", 1.75, 2300.0, 920.0),
    Material("render", 1.0, 1800.0, 1000.0),
    Material("tile", 1.3, 2300.0, 840.0),
    Material("mineral_wool", 0.041, 30.0, 1030.0),
)

LIGHT_HEIGHT = 30.0 / 11.0  # bedroom 11 m2 floor, 30 m3
FLAT_HEIGHT = 2.5
ROOF_TILT_LIGHT = 15.0


def _roof_layers(structure, insulation_cm):
    ins = [Layer("mineral_wool", insulation_cm / 100.0)] if insulation_cm > 0 else []
    if structure == "light":
        return [Layer("steel", 0.0006), Layer("loft_air", 0.2)] + ins + [Layer("plasterboard", 0.012)]
    return [Layer("concrete", 0.15)] + ins + [Layer("render", 0.01)]


def _wall_layers(structure, insulation_cm):
    ins = [Layer("mineral_wool", insulation_cm / 100.0)] if insulation_cm > 0 else []
    if structure == "light":
        return [Layer("timber", 0.018), Layer("air_gap", 0.05)] + ins + [Layer("plasterboard", 0.012)]
    return [Layer("render", 0.015), Layer("concrete", 0.15)] + ins + [Layer("render", 0.01)]


def constructions(structure, tag, roof_abs, roof_ins, wall_abs, wall_ins):
    if structure == "light":
        partition = [Layer("plasterboard", 0.012), Layer("air_gap", 0.05), Layer("plasterboard", 0.012)]
    else:
        partition = [Layer("render", 0.01), Layer("concrete", 0.1), Layer("render", 0.01)]
    return (
        Construction(f"roof_{tag}", tuple(_roof_layers(structure, roof_ins)), roof_abs, 0.9),
        Construction(f"wall_{tag}", tuple(_wall_layers(structure, wall_ins)), wall_abs, 0.9),
        Construction(f"partition_{structure}", tuple(partition), 0.5, 0.9),
        Construction("slab", (Layer("concrete", 0.10), Layer("tile", 0.01)), 0.5, 0.9),
    )


def _opening(lid, src, dst, area, height, mid, openable=True):
    return AirflowLink(lid, LargeOpening(area / height, height, 0.78, openable), src, dst, mid)


def _crack(lid, src, dst, mid=1.4, c=0.01):
    return AirflowLink(lid, Crack(c, 0.65), src, dst, mid)


def individual(name, structure, roof_abs=0.7, roof_ins=0.0, wall_abs=0.5, wall_ins=0.0, wall_overhang=0.0,
               window_overhang=None, window_shading=1.0, p_ext=0.2, p_int=0.2, tag=None, loft=None,
               conditioned=None, fixed_ach=None, ac_option=None):
    """Three-room house: two 11 m2 bedrooms on the north facade, 22 m2 living room on the south."""
    tag = tag or structure
    h = LIGHT_HEIGHT
    tilt = ROOF_TILT_LIGHT if structure == "light" else 0.0
    cons = constructions(structure, tag, roof_abs, roof_ins, wall_abs, wall_ins)
    roof, wall, part = cons[0].name, cons[1].name, cons[2].name
    wo = OverhangGeometry(wall_overhang * h, h) if wall_overhang > 0 else None

    def ext_wall(sid, zone, area, az):
        return Surface(sid, zone, area, az, 90.0, wall, EXTERIOR, wo)

    surfaces = [
        ext_wall("bed1_wall_n", "bed1", 4.4 * h, 0.0),
        ext_wall("bed1_wall_w", "bed1", 2.5 * h, 270.0),
        Surface("bed1_roof", "bed1", 11.0 / math.cos(math.radians(tilt)), 0.0, tilt, roof),
        Surface("bed1_floor", "bed1", 11.0, 0.0, 180.0, "slab", GROUND),
        Surface("bed1_bed2", "bed1", 2.5 * h, 90.0, 90.0, part, Adjacent("bed2")),
        Surface("bed1_living", "bed1", 4.4 * h, 180.0, 90.0, part, Adjacent("living")),
        ext_wall("bed2_wall_n", "bed2", 4.4 * h, 0.0),
        ext_wall("bed2_wall_e", "bed2", 2.5 * h, 90.0),
        Surface("bed2_roof", "bed2", 11.0 / math.cos(math.radians(tilt)), 0.0, tilt, roof),
        Surface("bed2_floor", "bed2", 11.0, 0.0, 180.0, "slab", GROUND),
        Surface("bed2_living", "bed2", 4.4 * h, 180.0, 90.0, part, Adjacent("living")),
        ext_wall("living_wall_s", "living", 8.8 * h, 180.0),
        ext_wall("living_wall_e", "living", 2.5 * h, 90.0),
        ext_wall("living_wall_w", "living", 2.5 * h, 270.0),
        Surface("living_roof", "living", 22.0 / math.cos(math.radians(tilt)), 180.0, tilt, roof),
        Surface("living_floor", "living", 22.0, 0.0, 180.0, "slab", GROUND),
    ]
    glazings = [
        Glazing("bed1_window", "bed1_wall_n", 1.21, 0.8, 5.8, window_overhang, window_shading),
        Glazing("bed2_window", "bed2_wall_n", 1.21, 0.8, 5.8, window_overhang, window_shading),
        Glazing("living_window", "living_wall_s", 4.84, 0.8, 5.8, window_overhang, window_shading),
    ]
    n, s, e, w = Outside(0.0), Outside(180.0), Outside(90.0), Outside(270.0)
    links = [
        _opening("bed1_window", n, "bed1", p_ext * 11.0, 1.2, 1.6),
        _opening("bed2_window", n, "bed2", p_ext * 11.0, 1.2, 1.6),
        _opening("living_door", s, "living", p_ext * 22.0, 2.0, 1.0),
        _opening("bed1_door", "bed1", "living", p_int * 11.0, 2.0, 1.0),
        _opening("bed2_door", "bed2", "living", p_int * 11.0, 2.0, 1.0),
        _crack("bed1_crack_n", n, "bed1"), _crack("bed1_crack_w", w, "bed1"),
        _crack("bed2_crack_n", n, "bed2"), _crack("bed2_crack_e", e, "bed2"),
        _crack("living_crack_s", s, "living"), _crack("living_crack_e", e, "living"),
        _crack("living_crack_w", w, "living"),
    ]
    night, day = (20, 6), (6, 20)
    cond = {}
    if conditioned:
        zone, setpoint = conditioned
        cond[zone] = InfinitePower(setpoint, hour_flags(interval_hours(*night)))
    zones = (
        Zone("bed1", 30.0, 11.0, default_gain_schedule(adults=2, occupied=night), cond.get("bed1"),
             fan_wiring=True),
        Zone("bed2", 30.0, 11.0, default_gain_schedule(children=2, occupied=night), cond.get("bed2"),
             fan_wiring=True),
        Zone("living", 60.0, 22.0, default_gain_schedule(adults=2, children=2, occupied=day), cond.get("living"),
             fan_wiring=True),
    )
    if loft is None:
        loft = LoftInfo("ventilated", 0.2 * 44.0) if structure == "light" else LoftInfo("none", 0.0)
    ecodom = EcodomInfo(
        siting=SitingInfo(0.8, 3.0),
        loft=loft,
        water_heater=WaterHeater("solar", certified=True, annual_production_kwh_per_m2=750.0, storage_l=270.0,
                                 collector_area_m2=3.0),
        ac_option=ac_option,
    )
    return BuildingModel(name, MATERIALS, cons, zones, tuple(surfaces), tuple(glazings), tuple(links), Site(),
                         structure, None, fixed_ach, ecodom)


def flat(name, position, p_ext=0.2, p_int=0.2):
    """Two-zone concrete flat (living room south, bedrooms north) in a block.

    position: under-roof (exposed roof), intermediate (floors above and below),
    side (end of block, exposed east gable). Boundaries facing neighbouring
    flats are adiabatic.
    """
    h = FLAT_HEIGHT
    cons = constructions("heavy", "heavy", 0.7, 0.0, 0.5, 0.0)
    roof, wall, part = cons[0].name, cons[1].name, cons[2].name
    roof_boundary = EXTERIOR if position == "under-roof" else GROUND
    gable = EXTERIOR if position == "side" else GROUND
    surfaces = [
        Surface("bedrooms_wall_n", "bedrooms", 8.0 * h, 0.0, 90.0, wall),
        Surface("bedrooms_wall_e", "bedrooms", 2.75 * h, 90.0, 90.0, wall, gable),
        Surface("bedrooms_wall_w", "bedrooms", 2.75 * h, 270.0, 90.0, wall, GROUND),
        Surface("bedrooms_ceiling", "bedrooms", 22.0, 0.0, 0.0, roof, roof_boundary),
        Surface("bedrooms_floor", "bedrooms", 22.0, 0.0, 180.0, "slab", GROUND),
        Surface("bedrooms_living", "bedrooms", 8.0 * h, 180.0, 90.0, part, Adjacent("living")),
        Surface("living_wall_s", "living", 8.0 * h, 180.0, 90.0, wall),
        Surface("living_wall_e", "living", 3.125 * h, 90.0, 90.0, wall, gable),
        Surface("living_wall_w", "living", 3.125 * h, 270.0, 90.0, wall, GROUND),
        Surface("living_ceiling", "living", 25.0, 0.0, 0.0, roof, roof_boundary),
        Surface("living_floor", "living", 25.0, 0.0, 180.0, "slab", GROUND),
    ]
    glazings = [Glazing("bedrooms_window", "bedrooms_wall_n", 2.4), Glazing("living_window", "living_wall_s", 5.5)]
    n, s, e = Outside(0.0), Outside(180.0), Outside(90.0)
    links = [
        _opening("bedrooms_window", n, "bedrooms", p_ext * 22.0, 1.2, 1.6),
        _opening("living_door", s, "living", p_ext * 25.0, 2.0, 1.0),
        _opening("bedrooms_door", "bedrooms", "living", p_int * 22.0, 2.0, 1.0),
        _crack("bedrooms_crack_n", n, "bedrooms"), _crack("living_crack_s", s, "living"),
    ]
    if position == "side":
        links += [_crack("bedrooms_crack_e", e, "bedrooms"), _crack("living_crack_e", e, "living")]
    zones = (
        Zone("bedrooms", 55.0, 22.0, default_gain_schedule(adults=2, children=2, occupied=(20, 6)),
             fan_wiring=True),
        Zone("living", 62.5, 25.0, default_gain_schedule(adults=2, children=2, occupied=(6, 20)), fan_wiring=True),
    )
    ecodom = EcodomInfo(
        siting=SitingInfo(0.8, 3.0),
        loft=LoftInfo("none", 0.0),
        water_heater=WaterHeater("electric", certified=True, off_peak_switch=True, capacity_l=150.0),
    )
    return BuildingModel(name, MATERIALS, cons, zones, tuple(surfaces), tuple(glazings), tuple(links), Site(),
                         "heavy", None, None, ecodom)


# Badly designed and prescription-compliant variants of the individual house.
BAD = dict(roof_abs=0.9, roof_ins=0.0, wall_abs=0.8, wall_ins=0.0, wall_overhang=0.0, window_overhang=None,
           window_shading=1.0, p_ext=0.10, p_int=0.10)
GOOD = dict(roof_abs=0.3, roof_ins=5.0, wall_abs=0.3, wall_ins=0.0, wall_overhang=0.5,
            window_overhang=OverhangGeometry(0.75, 1.1, 0.2), window_shading=0.3, p_ext=0.25, p_int=0.25)


def variants():
    out = [
        individual("individual-light", "light"),
        individual("individual-heavy", "heavy"),
        flat("flat-under-roof", "under-roof"),
        flat("flat-intermediate", "intermediate"),
        flat("flat-side", "side"),
    ]
    for structure in ("light", "heavy"):
        out.append(individual(f"case-{structure}-bad", structure, tag=f"{structure}_bad", **BAD))
        out.append(individual(f"case-{structure}-good", structure, tag=f"{structure}_good", **GOOD))
        cond = ("bed1", 26.0)
        out.append(individual(f"ac-{structure}-bad", structure, tag=f"{structure}_bad", conditioned=cond,
                              fixed_ach={"bed1": 5.0, "bed2": 5.0, "living": 5.0},
                              ac_option=ACOption("window", 2.5, 0.0, False), **BAD))
        out.append(individual(f"ac-{structure}-good", structure, tag=f"{structure}_good", conditioned=cond,
                              fixed_ach={"bed1": 1.0, "bed2": 1.0, "living": 1.0},
                              ac_option=ACOption("split", 3.2, 25.0, True), **GOOD))
    return out


def typical_day():
    """Synthesized wet-season day for Gillot (north coast): sea breeze by day, 1 m/s land breeze at night."""
    site = Site()
    start = datetime(2001, 1, 15) - timedelta(hours=site.utc_offset_hours)
    records = []
    for hour in range(24):
        sun = solar_position(start + timedelta(hours=hour), site.latitude, site.longitude)
        s = math.sin(math.radians(max(sun.altitude, 0.0)))
        if s > 0.02:
            dni = 1000.0 * math.exp(-0.25 / s)
            dhi = 90.0 + 60.0 * s
        else:
            dni = dhi = 0.0
        t = 27.5 + 3.5 * math.cos(2.0 * math.pi * (hour - 14) / 24.0)
        rh = 75.0 - 12.0 * math.cos(2.0 * math.pi * (hour - 14) / 24.0)
        if 9 <= hour <= 18:
            wind, direction = 2.5, 45.0
        else:
            wind, direction = 1.0, 225.0
        records.append(WeatherRecord(hour, round(t, 2), round(rh, 1), round(dni, 1), round(dhi, 1), wind,
                                     direction))
    return records


def main():
    buildings = DATA_DIR / "buildings"
    buildings.mkdir(parents=True, exist_ok=True)
    for model in variants():
        problems = validate(model)
        if problems:
            raise SystemExit(f"{model.name}: " + "; ".join(map(str, problems)))
        dump_building(model, buildings / f"{model.name}.json")
    weather = DATA_DIR / "weather"
    weather.mkdir(parents=True, exist_ok=True)
    write_weather(typical_day(), weather / "gillot_typical_day.csv")
    print(f"wrote {len(variants())} buildings and 1 weather day under {DATA_DIR}")


if __name__ == "__main__":
    main()
