"""Small hand-built models shared by the unit tests."""

from __future__ import annotations

import math
import sys

from tropisim.constants import GRAVITY, air_density
from tropisim.model import (GROUND, AirflowLink, BuildingModel, Construction, Crack, GainSchedule,
                            LargeOpening, Layer, Material, Outside, Surface, Zone)
from tropisim.weather import WeatherRecord, WeatherSequence

CONCRETE = Material("concrete", 1.75, 2300.0, 920.0)
PLASTER = Material("plasterboard", 0.25, 850.0, 1000.0)
WOOL = Material("mineral_wool", 0.041, 30.0, 1030.0)
MATERIALS = (CONCRETE, PLASTER, WOOL)

THIN = Construction("thin", (Layer("plasterboard", 0.012),), 0.5, 0.9)
SLAB = Construction("slab", (Layer("concrete", 0.2),), 0.5, 0.9)


def box(zone="z", volume=30.0, floor_area=10.0, construction=THIN, walls=True, floor=True, gains=None,
        links=(), materials=MATERIALS, extra_constructions=(), **kw) -> BuildingModel:
    """One zone with four exterior walls, a roof and a ground floor."""
    surfaces = []
    if walls:
        for az in (0.0, 90.0, 180.0, 270.0):
            surfaces.append(Surface(f"{zone}_w{int(az)}", zone, 8.0, az, 90.0, construction.name))
        surfaces.append(Surface(f"{zone}_roof", zone, floor_area, 0.0, 0.0, construction.name))
    if floor:
        surfaces.append(Surface(f"{zone}_floor", zone, floor_area, 0.0, 180.0, SLAB.name, GROUND))
    z = Zone(zone, volume, floor_area, gains or GainSchedule())
    cons = (construction, SLAB) + tuple(extra_constructions)
    return BuildingModel(f"box-{zone}", materials, cons, (z,), tuple(surfaces), (), tuple(links), **kw)


def bare_zones(*zone_ids, volume=30.0, floor_area=10.0, links=(), **kw) -> BuildingModel:
    """Zones without any surfaces, for airflow-only tests."""
    zones = tuple(Zone(z, volume, floor_area) for z in zone_ids)
    return BuildingModel("bare", MATERIALS, (THIN,), zones, (), (), tuple(links), **kw)


def crack(lid, src, dst, c=0.001, n=0.65, mid=1.0) -> AirflowLink:
    return AirflowLink(lid, Crack(c, n), src, dst, mid)


def opening(lid, src, dst, width=0.9, height=2.0, cd=0.78, mid=1.0) -> AirflowLink:
    return AirflowLink(lid, LargeOpening(width, height, cd), src, dst, mid)


def record(hour=12, t=28.0, rh=70.0, dni=0.0, dhi=0.0, wind=0.0, direction=0.0) -> WeatherRecord:
    return WeatherRecord(hour, t, rh, dni, dhi, wind, direction)


def constant_day(**kw) -> WeatherSequence:
    return WeatherSequence(tuple(record(hour=h, **kw) for h in range(24)))


# Independent oracles -----------------------------------------------------------

def strip_oracle(opening, p_from, p_to, t_from, t_to, strips=1000):
    """Midpoint-rule integration of orifice flow over horizontal strips (mid-height datum)."""
    rf, rt = air_density(t_from), air_density(t_to)
    h = opening.height
    dz = h / strips
    fwd = rev = 0.0
    for k in range(strips):
        z = (k + 0.5) * dz - h / 2.0
        dp = (p_from - rf * GRAVITY * z) - (p_to - rt * GRAVITY * z)
        if dp > 0:
            fwd += opening.discharge_coefficient * opening.width * dz * math.sqrt(2.0 * rf * dp)
        else:
            rev += opening.discharge_coefficient * opening.width * dz * math.sqrt(2.0 * rt * -dp)
    return fwd, rev


def random_network(rng):
    n = int(rng.integers(1, 6))
    zones = [f"z{i}" for i in range(n)]
    links = []
    for i, z in enumerate(zones):
        az = float(rng.choice([0.0, 90.0, 180.0, 270.0]))
        if rng.random() < 0.5:
            links.append(crack(f"c{i}", Outside(az), z, c=float(rng.uniform(0.002, 0.05)),
                               n=float(rng.uniform(0.5, 1.0)), mid=float(rng.uniform(0.2, 2.5))))
        else:
            links.append(opening(f"o{i}", Outside(az), z, width=float(rng.uniform(0.2, 1.0)),
                                 height=float(rng.uniform(0.5, 2.0)), mid=float(rng.uniform(1.0, 2.0))))
        if i:
            other = zones[int(rng.integers(0, i))]
            if rng.random() < 0.5:
                links.append(opening(f"d{i}", other, z, width=float(rng.uniform(0.3, 1.0))))
            else:
                links.append(crack(f"k{i}", other, z, c=float(rng.uniform(0.002, 0.05))))
    m = bare_zones(*zones, links=links)
    temps = rng.uniform(18.0, 38.0, n)
    return m, temps


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.summary_lines():
        terminalreporter.write_line(line)
