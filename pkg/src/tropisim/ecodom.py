"""Prescription checker: siting, roof, walls, windows, ventilation, water heating and AC option.

Thresholds live in the JSON files under ``data/rules``; nothing numeric about a
prescription is hard-coded here. Comparisons are inclusive (measured >= required)
except the protected-perimeter fraction, which must strictly exceed its limit.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .model import ACOption, BuildingModel, LargeOpening, Outside, SitingInfo, VentilationLayout, WaterHeater

RULES_DIR = Path(__file__).parent / "data" / "rules"

PASS = "Pass"
FAIL = "Fail"
NOT_APPLICABLE = "NotApplicable"

FAMILIES = ("Siting", "Roof", "Walls", "Windows", "Ventilation", "WaterHeater", "AirConditioning")

# Absorptivity limits of the light / medium colour classes; anything above is dark.
COLOUR_LIMITS = (("light", 0.4), ("medium", 0.7))

# Guards ">=" against round-off in ratios such as 2.75/11.
_TOL = 1e-9

INTERIOR_RULE_NOTE = ("interior openings are checked as Si >= min(So1, So2); the prescription's 'Si >= So1 or So2' "
                      "can also be read as the larger of the two")


class RuleTableError(ValueError):
    pass


@dataclass(frozen=True)
class RuleTables:
    """All prescription tables, keyed by table id."""

    tables: dict
    source: str = ""

    def __getitem__(self, key: str) -> dict:
        try:
            return self.tables[key]
        except KeyError:
            raise RuleTableError(f"rule table {key!r} not loaded from {self.source}") from None

    def citation(self, key: str) -> str:
        return self[key].get("citation", key)


def load_rule_tables(directory=None) -> RuleTables:
    directory = Path(directory) if directory is not None else RULES_DIR
    if not directory.is_dir():
        raise RuleTableError(f"{directory}: not a directory")
    tables = {}
    for path in sorted(directory.glob("*.json")):
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise RuleTableError(f"{path}: line {exc.lineno}: {exc.msg}") from None
        if "id" not in doc or "family" not in doc or "citation" not in doc:
            raise RuleTableError(f"{path}: needs id, family and citation")
        if doc["family"] not in FAMILIES:
            raise RuleTableError(f"{path}: unknown family {doc['family']!r}")
        _check_thresholds(path, doc)
        tables[doc["id"]] = doc
    return RuleTables(tables, str(directory))


def _check_thresholds(path, node) -> None:
    if isinstance(node, dict):
        for v in node.values():
            _check_thresholds(path, v)
    elif isinstance(node, list):
        for v in node:
            _check_thresholds(path, v)
    elif isinstance(node, (int, float)) and not isinstance(node, bool) and node < 0:
        raise RuleTableError(f"{path}: thresholds must be >= 0")


@dataclass(frozen=True)
class RuleResult:
    rule: str
    family: str
    subject: str
    verdict: str
    measured: Optional[float]
    required: Optional[float]
    citation: str
    note: str = ""


@dataclass(frozen=True)
class ComplianceReport:
    building: str
    results: tuple
    metadata: dict = field(default_factory=dict)

    def family_verdicts(self) -> dict:
        """Fail if any rule of the family fails, NotApplicable if none applies, else Pass."""
        out = {}
        for fam in FAMILIES:
            verdicts = [r.verdict for r in self.results if r.family == fam]
            if FAIL in verdicts:
                out[fam] = FAIL
            elif PASS in verdicts:
                out[fam] = PASS
            else:
                out[fam] = NOT_APPLICABLE
        return out

    @property
    def compliant(self) -> bool:
        return all(r.verdict != FAIL for r in self.results)

    def find(self, rule: str, subject: Optional[str] = None) -> list:
        return [r for r in self.results if r.rule == rule and (subject is None or r.subject == subject)]

    def to_dict(self) -> dict:
        return {"building": self.building, "compliant": self.compliant, "families": self.family_verdicts(),
                "metadata": dict(sorted(self.metadata.items())), "rules": [asdict(r) for r in self.results]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=False) + "\n"

    def summary(self) -> str:
        lines = [f"Compliance report for {self.building}: {'COMPLIANT' if self.compliant else 'NOT COMPLIANT'}"]
        for fam, verdict in self.family_verdicts().items():
            lines.append(f"  {fam:<16} {verdict}")
        for r in self.results:
            if r.verdict == FAIL:
                lines.append(f"  - FAIL {r.rule} [{r.subject}]: measured {_fmt(r.measured)}, "
                             f"required {_fmt(r.required)}. {r.note}".rstrip())
        return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    return "-" if x is None else f"{x:.4g}"


def _at_least(measured: float, required: float) -> bool:
    return measured >= required - _TOL * max(1.0, abs(required))


def _verdict(ok: bool) -> str:
    return PASS if ok else FAIL


def colour_class(absorptivity: float) -> str:
    for name, limit in COLOUR_LIMITS:
        if absorptivity <= limit:
            return name
    return "dark"


def orientation_class(azimuth: float) -> str:
    a = azimuth % 360.0
    if a >= 315.0 or a < 45.0:
        return "N"
    if a < 135.0:
        return "E"
    if a < 225.0:
        return "S"
    return "W"


# Siting -------------------------------------------------------------------

def check_siting(siting: Optional[SitingInfo], tables: RuleTables) -> list[RuleResult]:
    t = tables["siting"]
    cite = t["citation"]
    if siting is None:
        return [RuleResult("siting.protected_perimeter", "Siting", "site", NOT_APPLICABLE, None, None, cite,
                           "no siting descriptor"),
                RuleResult("siting.strip_width", "Siting", "site", NOT_APPLICABLE, None, None, cite,
                           "no siting descriptor")]
    limit = t["min_protected_fraction_exclusive"]
    return [
        RuleResult("siting.protected_perimeter", "Siting", "site", _verdict(siting.protected_fraction > limit),
                   siting.protected_fraction, limit, cite, "must be strictly greater"),
        RuleResult("siting.strip_width", "Siting", "site",
                   _verdict(_at_least(siting.strip_width, t["min_strip_width_m"])), siting.strip_width,
                   t["min_strip_width_m"], cite),
    ]


# Roof ---------------------------------------------------------------------

def check_roof_vent(vent_area: float, roof_area: float, tables: RuleTables) -> RuleResult:
    t = tables["roof"]
    ratio = vent_area / roof_area if roof_area > 0 else 0.0
    req = t["loft_vent_ratio_min"]
    ok = vent_area > 0 and _at_least(ratio, req)
    note = "" if ok else "loft treated as closed for the roof protection rule"
    return RuleResult("roof.loft_ventilation", "Roof", "loft", _verdict(ok), ratio, req, t["loft_vent_citation"], note)


def check_roof(model: BuildingModel, tables: RuleTables) -> list[RuleResult]:
    t = tables["roof"]
    roofs = [s for s in model.surfaces if s.is_roof]
    loft = model.ecodom.loft
    out = []
    loft_kind = "closed"
    if loft.kind == "ventilated":
        vent = check_roof_vent(loft.vent_area, sum(s.area for s in roofs), tables)
        out.append(vent)
        if vent.verdict == PASS:
            loft_kind = "ventilated"
    else:
        out.append(RuleResult("roof.loft_ventilation", "Roof", "loft", NOT_APPLICABLE, None, None,
                              t["loft_vent_citation"], f"loft type {loft.kind}"))
    if not roofs:
        out.append(RuleResult("roof.protection", "Roof", "roof", NOT_APPLICABLE, None, None, t["citation"],
                              "no exterior roof surface"))
        return out
    for s in roofs:
        con = model.construction_map[s.construction]
        colour = colour_class(con.exterior_absorptivity)
        required = t["insulation_cm"][loft_kind].get(colour)
        if required is None:
            out.append(RuleResult("roof.protection", "Roof", s.id, NOT_APPLICABLE, None, None, t["citation"],
                                  f"no table row for {loft_kind}/{colour}; review"))
            continue
        measured = model.insulation_thickness_cm(s.construction)
        out.append(RuleResult("roof.protection", "Roof", s.id, _verdict(_at_least(measured, required)), measured,
                              required, t["citation"], f"{loft_kind} loft, {colour} colour"))
    return out


# Walls and windows ----------------------------------------------------------

def check_walls(model: BuildingModel, tables: RuleTables) -> list[RuleResult]:
    """Each exterior wall passes through its overhang ratio or its insulation (either suffices)."""
    over, ins = tables["wall_overhang"], tables["wall_insulation"]
    cite = f"{over['citation']}; {ins['citation']}"
    out = []
    for s in model.surfaces:
        if not (s.is_exterior and s.is_wall):
            continue
        orient = orientation_class(s.azimuth)
        con = model.construction_map[s.construction]
        colour = colour_class(con.exterior_absorptivity)
        inertia = model.inertia_class(s.construction)
        need_ratio = over["min_ratio"].get(inertia, {}).get(orient)
        need_cm = ins["insulation_cm"].get(colour, {}).get(orient)
        if need_ratio is None and need_cm is None:
            out.append(RuleResult("walls.protection", "Walls", s.id, NOT_APPLICABLE, None, None, cite,
                                  f"no table row for {inertia}/{colour}/{orient}; review"))
            continue
        ratio = s.overhang.ratio if s.overhang is not None else 0.0
        cm = model.insulation_thickness_cm(s.construction)
        by_overhang = need_ratio is not None and _at_least(ratio, need_ratio)
        by_insulation = need_cm is not None and _at_least(cm, need_cm)
        if by_overhang:
            measured, required, how = ratio, need_ratio, "overhang d/h"
        elif by_insulation:
            measured, required, how = cm, need_cm, "insulation cm"
        else:
            measured, required, how = ratio, need_ratio, f"overhang d/h (insulation {cm:.3g} cm < {need_cm} cm)"
        out.append(RuleResult("walls.protection", "Walls", s.id, _verdict(by_overhang or by_insulation), measured,
                              required, cite, f"{orient}, {colour}, {inertia} inertia; {how}"))
    return out


def check_windows(model: BuildingModel, tables: RuleTables) -> list[RuleResult]:
    """Canopy ratio d/(2a+h) when the canopy sits above the window head, d/h when on it; a blind with
    a low enough shading multiplier is accepted instead."""
    t = tables["windows"]
    out = []
    for g in model.glazings:
        host = model.glazing_surface(g)
        if not (host.is_exterior and host.is_wall):
            continue
        orient = orientation_class(host.azimuth)
        geom = g.overhang
        case = "case1" if geom is not None and geom.gap > 0 else "case2"
        required = t[f"{case}_min_ratio"].get(orient)
        ratio = geom.ratio if geom is not None else 0.0
        by_device = _at_least(t["max_shading_multiplier"], g.shading_multiplier)
        if required is None and not by_device:
            out.append(RuleResult("windows.protection", "Windows", g.id, NOT_APPLICABLE, None, None, t["citation"],
                                  f"no table row for {orient}; review"))
            continue
        by_canopy = required is not None and _at_least(ratio, required)
        note = f"{orient}, {case}" + ("; shading device" if by_device and not by_canopy else "")
        out.append(RuleResult("windows.protection", "Windows", g.id, _verdict(by_canopy or by_device), ratio,
                              required, t["citation"], note))
    return out


def check_solar_protection(model: BuildingModel, tables: RuleTables) -> list[RuleResult]:
    return check_roof(model, tables) + check_walls(model, tables) + check_windows(model, tables)


# Ventilation --------------------------------------------------------------

_OPPOSITE = (("N", "S"), ("E", "W"))


def derive_ventilation_layout(model: BuildingModel) -> tuple[Optional[VentilationLayout], str]:
    """Cross-ventilation areas from the principal rooms' large openings.

    Exterior openings are grouped by facade orientation; the opposing pair with
    the larger smaller-side area is used. Returns (None, reason) when the
    building has no openings on two opposing facades.
    """
    principal = {z.id for z in model.zones if z.principal}
    facade_area: dict = {}
    facade_rooms: dict = {}
    interior: list = []
    for link in model.links:
        if not isinstance(link.kind, LargeOpening) or not link.kind.openable:
            continue
        ends = (link.source, link.target)
        outside = [e for e in ends if isinstance(e, Outside)]
        zones = [e for e in ends if isinstance(e, str)]
        if outside and zones[0] in principal:
            f = orientation_class(outside[0].azimuth)
            facade_area[f] = facade_area.get(f, 0.0) + link.kind.area
            facade_rooms.setdefault(f, set()).add(zones[0])
        elif len(zones) == 2:
            interior.append(link)
    pairs = [(a, b) for a, b in _OPPOSITE if facade_area.get(a, 0.0) > 0 and facade_area.get(b, 0.0) > 0]
    if not pairs:
        return None, "no openings on two opposing facades of the principal rooms"
    a, b = max(pairs, key=lambda p: min(facade_area[p[0]], facade_area[p[1]]))

    def interior_area(rooms):
        return sum(l.kind.area for l in interior if any(z in rooms for z in l.zones()))

    zmap = model.zone_map
    rooms_a, rooms_b = facade_rooms[a], facade_rooms[b]
    layout = VentilationLayout(
        so1=facade_area[a], so2=facade_area[b],
        si1=interior_area(rooms_a), si2=interior_area(rooms_b),
        sp1=sum(zmap[z].floor_area for z in sorted(rooms_a)), sp2=sum(zmap[z].floor_area for z in sorted(rooms_b)),
    )
    return layout, f"facades {a}/{b}"


def check_cross_ventilation(model: BuildingModel, tables: RuleTables) -> list[RuleResult]:
    t = tables["ventilation"]
    cite = t["citation"]
    rules = ("ventilation.P1", "ventilation.P2", "ventilation.Si1", "ventilation.Si2")
    layout = model.ecodom.ventilation_layout
    if layout is not None:
        source = "declared layout"
        opposing = RuleResult("ventilation.opposing_facades", "Ventilation", "dwelling",
                              _verdict(layout.so1 > 0 and layout.so2 > 0), None, None, cite, source)
    else:
        layout, source = derive_ventilation_layout(model)
        opposing = RuleResult("ventilation.opposing_facades", "Ventilation", "dwelling",
                              _verdict(layout is not None), None, None, cite, source)
    out = [opposing]
    if layout is None or layout.sp1 + layout.sp2 <= 0:
        out += [RuleResult(r, "Ventilation", "dwelling", NOT_APPLICABLE, None, None, cite,
                           "facade layout unavailable") for r in rules]
    else:
        sp = 0.5 * (layout.sp1 + layout.sp2)
        need = t["min_permeability"]
        p1, p2 = layout.so1 / sp, layout.so2 / sp
        so_min = min(layout.so1, layout.so2)
        out += [
            RuleResult("ventilation.P1", "Ventilation", "dwelling", _verdict(_at_least(p1, need)), p1, need, cite,
                       f"So1/Sp, Sp = (Sp1+Sp2)/2 = {sp:.4g} m2"),
            RuleResult("ventilation.P2", "Ventilation", "dwelling", _verdict(_at_least(p2, need)), p2, need, cite,
                       f"So2/Sp, Sp = (Sp1+Sp2)/2 = {sp:.4g} m2"),
            RuleResult("ventilation.Si1", "Ventilation", "dwelling", _verdict(_at_least(layout.si1, so_min)),
                       layout.si1, so_min, cite, "Si1 >= min(So1, So2)"),
            RuleResult("ventilation.Si2", "Ventilation", "dwelling", _verdict(_at_least(layout.si2, so_min)),
                       layout.si2, so_min, cite, "Si2 >= min(So1, So2)"),
        ]
    for z in model.zones:
        if z.principal:
            out.append(RuleResult("ventilation.fan_wiring", "Ventilation", z.id, _verdict(z.fan_wiring),
                                  float(z.fan_wiring), 1.0, cite, "ceiling wiring reserved for a fan"))
    return out


# Water heating and AC ----------------------------------------------------------

def _by_rooms(rows, rooms: int) -> float:
    """Row lookup in [[min_rooms, value], ...]: the last row whose min_rooms <= rooms."""
    value = rows[0][1]
    for min_rooms, v in rows:
        if rooms >= min_rooms:
            value = v
    return value


def check_water_heating(heater: Optional[WaterHeater], principal_rooms: int, tables: RuleTables) -> list[RuleResult]:
    fam = "WaterHeater"
    if heater is None:
        return [RuleResult("water.kind", fam, "water_heater", NOT_APPLICABLE, None, None, "ECODOM water heating",
                           "no water heater described")]
    if heater.kind == "solar":
        t = tables["solar_water_heater"]
        cite = t["citation"]
        area = heater.collector_area_m2
        per_m2 = heater.storage_l / area if area > 0 else 0.0
        lo, hi = t["storage_l_per_m2"]
        need_area = _by_rooms(t["collector_area_m2"], principal_rooms)
        return [
            RuleResult("water.solar.certified", fam, "water_heater", _verdict(heater.certified),
                       float(heater.certified), 1.0, cite),
            RuleResult("water.solar.production", fam, "water_heater",
                       _verdict(_at_least(heater.annual_production_kwh_per_m2, t["min_production_kwh_m2"])),
                       heater.annual_production_kwh_per_m2, t["min_production_kwh_m2"], cite),
            RuleResult("water.solar.storage", fam, "water_heater",
                       _verdict(_at_least(per_m2, lo) and _at_least(hi, per_m2)), per_m2, lo, cite,
                       f"storage per m2 of collector must lie in [{lo:g}, {hi:g}] L"),
            RuleResult("water.solar.collector_area", fam, "water_heater", _verdict(_at_least(area, need_area)), area,
                       need_area, cite, f"{principal_rooms} principal rooms"),
        ]
    if heater.kind == "electric":
        t = tables["electric_water_heater"]
        cite = t["citation"]
        need = _by_rooms(t["capacity_l"], principal_rooms)
        return [
            RuleResult("water.electric.certified", fam, "water_heater", _verdict(heater.certified),
                       float(heater.certified), 1.0, cite),
            RuleResult("water.electric.not_instant", fam, "water_heater", _verdict(not heater.instant),
                       float(heater.instant), 0.0, cite, "instantaneous heaters are excluded"),
            RuleResult("water.electric.off_peak_switch", fam, "water_heater", _verdict(heater.off_peak_switch),
                       float(heater.off_peak_switch), 1.0, cite),
            RuleResult("water.electric.capacity", fam, "water_heater", _verdict(_at_least(heater.capacity_l, need)),
                       heater.capacity_l, need, cite, f"{principal_rooms} principal rooms"),
        ]
    if heater.kind == "gas":
        cite = tables["gas_water_heater"]["citation"]
        return [
            RuleResult("water.gas.certified", fam, "water_heater", _verdict(heater.certified),
                       float(heater.certified), 1.0, cite),
            RuleResult("water.gas.flue_outlet", fam, "water_heater", _verdict(heater.flue_outlet),
                       float(heater.flue_outlet), 1.0, cite),
        ]
    return [RuleResult("water.kind", fam, "water_heater", FAIL, None, None, "ECODOM water heating",
                       f"unknown water heater kind {heater.kind!r}")]


def check_ac_option(ac: Optional[ACOption], tables: RuleTables) -> list[RuleResult]:
    t = tables["air_conditioning"]
    cite = t["citation"]
    fam = "AirConditioning"
    if ac is None:
        return [RuleResult("ac.efficiency", fam, "ac", NOT_APPLICABLE, None, None, cite, "no AC option")]
    need_cop = t["min_cop"].get(ac.unit_type)
    if need_cop is None:
        cop = RuleResult("ac.efficiency", fam, "ac", FAIL, ac.cop, None, cite, f"unknown unit type {ac.unit_type!r}")
    else:
        cop = RuleResult("ac.efficiency", fam, "ac", _verdict(_at_least(ac.cop, need_cop)), ac.cop, need_cop, cite,
                         f"{ac.unit_type} unit")
    return [
        cop,
        RuleResult("ac.air_renewal", fam, "ac",
                   _verdict(_at_least(ac.mechanical_renewal_m3h, t["min_renewal_m3h"])), ac.mechanical_renewal_m3h,
                   t["min_renewal_m3h"], cite),
        RuleResult("ac.maintenance", fam, "ac", _verdict(ac.maintenance_contract), float(ac.maintenance_contract),
                   1.0, cite),
    ]


def check_building(model: BuildingModel, tables: Optional[RuleTables] = None) -> ComplianceReport:
    tables = tables or load_rule_tables()
    e = model.ecodom
    principal = sum(1 for z in model.zones if z.principal)
    results = (check_siting(e.siting, tables) + check_solar_protection(model, tables)
               + check_cross_ventilation(model, tables) + check_water_heating(e.water_heater, principal, tables)
               + check_ac_option(e.ac_option, tables))
    for r in results:
        for v in (r.measured, r.required):
            if v is not None and not math.isfinite(v):
                raise ValueError(f"non-finite value in rule {r.rule} for {r.subject}")
    metadata = {
        "interior_opening_rule": INTERIOR_RULE_NOTE,
        "colour_classes": "absorptivity <= 0.4 light, <= 0.7 medium, otherwise dark",
        "orientation_classes": "N [315,45), E [45,135), S [135,225), W [225,315) degrees",
        "rule_tables": tables.source,
    }
    placeholders = sorted(k for k, t in tables.tables.items() if "placeholder" in t.get("values_status", ""))
    if placeholders:
        metadata["placeholder_tables"] = ", ".join(placeholders)
    return ComplianceReport(model.name, tuple(results), metadata)
