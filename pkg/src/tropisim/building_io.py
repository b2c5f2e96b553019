"""Read and write building description files (JSON, see data/building.schema.json)."""

from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path

import jsonschema

from .model import (EXTERIOR, ACOption, Adjacent, AirflowLink, BuildingModel, Construction, Crack, EcodomInfo,
                    GainSchedule, Glazing, InfinitePower, LargeOpening, Layer, LoftInfo, Material, Outside,
                    OverhangGeometry, Site, SitingInfo, Surface, VentilationLayout, WaterHeater, Zone)

DATA_DIR = Path(__file__).parent / "data"
FIXTURES = ("individual-light", "individual-heavy", "flat-under-roof", "flat-intermediate", "flat-side")


class BuildingFileError(ValueError):
    pass


@lru_cache(maxsize=1)
def schema() -> dict:
    return json.loads((DATA_DIR / "building.schema.json").read_text())


def fixture_path(name: str) -> Path:
    return DATA_DIR / "buildings" / f"{name}.json"


def load_building(path) -> BuildingModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise BuildingFileError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    return building_from_dict(doc, str(path))


def load_fixture(name: str) -> BuildingModel:
    return load_building(fixture_path(name))


def _overhang(d):
    if d is None:
        return None
    return OverhangGeometry(d["depth"], d["height"], d.get("gap", 0.0))


def _cp(t):
    return None if t is None else tuple((float(a), float(c)) for a, c in t)


def _endpoint(e):
    if isinstance(e, str):
        return e
    return Outside(float(e["exterior"]), _cp(e.get("cp")))


def building_from_dict(doc: dict, origin: str = "<building>") -> BuildingModel:
    try:
        jsonschema.validate(doc, schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "(root)"
        raise BuildingFileError(f"{origin}: {where}: {exc.message}") from None

    materials = tuple(Material(m["name"], m["conductivity"], m["density"], m["specific_heat"])
                      for m in doc["materials"])
    constructions = tuple(
        Construction(c["name"], tuple(Layer(l["material"], l["thickness"]) for l in c["layers"]),
                     c.get("exterior_absorptivity", 0.6), c.get("exterior_emissivity", 0.9))
        for c in doc["constructions"])

    zones = []
    for z in doc["zones"]:
        g = z.get("gains", {})
        gains = GainSchedule(tuple(g.get("sensible_w", (0.0,) * 24)), tuple(g.get("moisture_kg_s", (0.0,) * 24)),
                             tuple(g.get("occupants", (0.0,) * 24)))
        cond = z.get("conditioning")
        if cond is not None:
            cond = InfinitePower(cond["setpoint"], tuple(cond.get("schedule", (True,) * 24)))
        zones.append(Zone(z["id"], z["volume"], z["floor_area"], gains, cond, z.get("sealed", False),
                          z.get("principal", True), z.get("fan_wiring", False)))

    surfaces = []
    for s in doc.get("surfaces", []):
        b = s.get("boundary", EXTERIOR)
        if isinstance(b, dict):
            b = Adjacent(b["adjacent"])
        surfaces.append(Surface(s["id"], s["zone"], s["area"], s["azimuth"], s["tilt"], s["construction"], b,
                                _overhang(s.get("overhang"))))

    glazings = tuple(Glazing(g["id"], g["surface"], g["area"], g.get("solar_transmittance", 0.8),
                             g.get("u_value", 5.8), _overhang(g.get("overhang")), g.get("shading_multiplier", 1.0))
                     for g in doc.get("glazings", []))

    links = []
    for l in doc.get("links", []):
        if l["kind"] == "crack":
            if "flow_coefficient" not in l:
                raise BuildingFileError(f"{origin}: link {l['id']}: crack needs flow_coefficient")
            kind = Crack(l["flow_coefficient"], l.get("exponent", 0.65))
        else:
            if "width" not in l or "height" not in l:
                raise BuildingFileError(f"{origin}: link {l['id']}: large opening needs width and height")
            kind = LargeOpening(l["width"], l["height"], l.get("discharge_coefficient", 0.78), l.get("openable", True))
        links.append(AirflowLink(l["id"], kind, _endpoint(l["from"]), _endpoint(l["to"]), l["mid_height"]))

    site = Site(**doc.get("site", {}))
    e = doc.get("ecodom", {})
    ecodom = EcodomInfo(
        siting=SitingInfo(**e["siting"]) if "siting" in e else None,
        loft=LoftInfo(**e.get("loft", {})),
        water_heater=WaterHeater(**e["water_heater"]) if "water_heater" in e else None,
        ac_option=ACOption(**e["ac_option"]) if e.get("ac_option") else None,
        ventilation_layout=VentilationLayout(**e["ventilation_layout"]) if "ventilation_layout" in e else None,
    )
    fixed = doc.get("fixed_air_changes")
    return BuildingModel(doc["name"], materials, constructions, tuple(zones), tuple(surfaces), glazings,
                         tuple(links), site, doc.get("structure_class", "light"), _cp(doc.get("cp_table")),
                         dict(fixed) if fixed is not None else None, ecodom)


def _overhang_dict(o):
    return {"depth": o.depth, "height": o.height, "gap": o.gap}


def _endpoint_dict(e):
    if isinstance(e, str):
        return e
    d = {"exterior": e.azimuth}
    if e.cp is not None:
        d["cp"] = [list(p) for p in e.cp]
    return d



def building_to_dict(model: BuildingModel) -> dict:
    doc = {
        "name": model.name,
        "structure_class": model.structure_class,
        "site": {"latitude": model.site.latitude, "longitude": model.site.longitude,
                 "ground_albedo": model.site.ground_albedo, "utc_offset_hours": model.site.utc_offset_hours,
                 "date": model.site.date},
        "materials": [{"name": m.name, "conductivity": m.conductivity, "density": m.density,
                       "specific_heat": m.specific_heat} for m in model.materials],
        "constructions": [{"name": c.name,
                           "layers": [{"material": l.material, "thickness": l.thickness} for l in c.layers],
                           "exterior_absorptivity": c.exterior_absorptivity,
                           "exterior_emissivity": c.exterior_emissivity} for c in model.constructions],
        "zones": [],
        "surfaces": [],
        "glazings": [],
        "links": [],
    }
    if model.cp_table is not None:
        doc["cp_table"] = [list(p) for p in model.cp_table]
    for z in model.zones:
        zd = {"id": z.id, "volume": z.volume, "floor_area": z.floor_area,
              "gains": {"sensible_w": list(z.gains.sensible), "moisture_kg_s": list(z.gains.moisture),
                        "occupants": list(z.gains.occupants)},
              "sealed": z.sealed, "principal": z.principal, "fan_wiring": z.fan_wiring}
        if z.conditioning is not None:
            zd["conditioning"] = {"setpoint": z.conditioning.setpoint, "schedule": list(z.conditioning.schedule)}
        doc["zones"].append(zd)
    for s in model.surfaces:
        sd = {"id": s.id, "zone": s.zone, "area": s.area, "azimuth": s.azimuth, "tilt": s.tilt,
              "construction": s.construction,
              "boundary": {"adjacent": s.boundary.zone} if isinstance(s.boundary, Adjacent) else s.boundary}
        if s.overhang is not None:
            sd["overhang"] = _overhang_dict(s.overhang)
        doc["surfaces"].append(sd)
    for g in model.glazings:
        gd = {"id": g.id, "surface": g.surface, "area": g.area, "solar_transmittance": g.solar_transmittance,
              "u_value": g.u_value, "shading_multiplier": g.shading_multiplier}
        if g.overhang is not None:
            gd["overhang"] = _overhang_dict(g.overhang)
        doc["glazings"].append(gd)
    for l in model.links:
        ld = {"id": l.id, "from": _endpoint_dict(l.source), "to": _endpoint_dict(l.target),
              "mid_height": l.mid_height}
        if isinstance(l.kind, Crack):
            ld.update(kind="crack", flow_coefficient=l.kind.flow_coefficient, exponent=l.kind.exponent)
        else:
            ld.update(kind="large_opening", width=l.kind.width, height=l.kind.height,
                      discharge_coefficient=l.kind.discharge_coefficient, openable=l.kind.openable)
        doc["links"].append(ld)
    if model.fixed_air_changes is not None:
        doc["fixed_air_changes"] = dict(model.fixed_air_changes)
    e = model.ecodom
    ed = {"loft": {"kind": e.loft.kind, "vent_area": e.loft.vent_area}}
    if e.siting is not None:
        ed["siting"] = vars(e.siting).copy()
    if e.water_heater is not None:
        ed["water_heater"] = vars(e.water_heater).copy()
    if e.ac_option is not None:
        ed["ac_option"] = vars(e.ac_option).copy()
    if e.ventilation_layout is not None:
        ed["ventilation_layout"] = vars(e.ventilation_layout).copy()
    doc["ecodom"] = ed
    return doc


def dump_building(model: BuildingModel, path) -> None:
    Path(path).write_text(json.dumps(building_to_dict(model), indent=1) + "\n")
