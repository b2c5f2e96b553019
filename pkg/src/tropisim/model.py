"""Building description: materials, constructions, zones, surfaces, glazing and airflow links.

All types are frozen dataclasses. Cross references (surface -> construction,
glazing -> surface, link -> zone) are by name so that a model read from a file
can be checked with :func:`validate` before any simulation touches it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Union


HOURS = 24

# Equivalent-thickness reference used by the insulation prescriptions (W/m.K).
INSULATION_REFERENCE_CONDUCTIVITY = 0.041
# Layers at or below this conductivity count as insulation.
INSULATION_MAX_CONDUCTIVITY = 0.065
# Areal heat capacity separating light from heavy constructions (J/m2.K).
HEAVY_AREAL_CAPACITY = 100e3


@dataclass(frozen=True)
class Material:
    name: str
    conductivity: float  # W/(m.K)
    density: float  # kg/m3
    specific_heat: float  # J/(kg.K)


@dataclass(frozen=True)
class Layer:
    material: str
    thickness: float  # m


@dataclass(frozen=True)
class Construction:
    """Layered construction, listed from the boundary side to the zone side."""

    name: str
    layers: tuple[Layer, ...]
    exterior_absorptivity: float = 0.6
    exterior_emissivity: float = 0.9


@dataclass(frozen=True)
class OverhangGeometry:
    depth: float  # d, horizontal projection (m)
    height: float  # h, height of the protected element (m)
    gap: float = 0.0  # a, overhang to top of protected element (m)

    @property
    def ratio(self) -> float:
        """d/(2a+h); reduces to d/h when the overhang sits on the element head."""
        return self.depth / (2.0 * self.gap + self.height)


@dataclass(frozen=True)
class Adjacent:
    zone: str


EXTERIOR = "exterior"
GROUND = "ground"

Boundary = Union[str, Adjacent]


@dataclass(frozen=True)
class Surface:
    id: str
    zone: str  # zone on the inner (last-layer) side
    area: float  # gross area including hosted glazing (m2)
    azimuth: float  # outward normal, degrees clockwise from North
    tilt: float  # 0 = facing up, 90 = vertical, 180 = facing down
    construction: str
    boundary: Boundary = EXTERIOR
    overhang: Optional[OverhangGeometry] = None

    @property
    def is_exterior(self) -> bool:
        return self.boundary == EXTERIOR

    @property
    def is_roof(self) -> bool:
        return self.is_exterior and self.tilt < 60.0

    @property
    def is_wall(self) -> bool:
        return 60.0 <= self.tilt <= 120.0

    @property
    def is_floor(self) -> bool:
        return self.tilt > 120.0


@dataclass(frozen=True)
class Glazing:
    id: str
    surface: str
    area: float
    solar_transmittance: float = 0.8
    u_value: float = 5.8
    overhang: Optional[OverhangGeometry] = None
    shading_multiplier: float = 1.0


@dataclass(frozen=True)
class GainSchedule:
    sensible: tuple[float, ...] = (0.0,) * HOURS  # W
    moisture: tuple[float, ...] = (0.0,) * HOURS  # kg/s
    occupants: tuple[float, ...] = (0.0,) * HOURS


@dataclass(frozen=True)
class InfinitePower:
    setpoint: float
    schedule: tuple[bool, ...] = (True,) * HOURS


@dataclass(frozen=True)
class Zone:
    id: str
    volume: float
    floor_area: float
    gains: GainSchedule = field(default_factory=GainSchedule)
    conditioning: Optional[InfinitePower] = None
    sealed: bool = False
    principal: bool = True
    fan_wiring: bool = False


@dataclass(frozen=True)
class Outside:
    """Exterior end of an airflow link on the facade with the given outward azimuth.

    ``cp`` optionally overrides the building pressure-coefficient table for
    this facade, as ``((incidence_deg, cp), ...)``.
    """

    azimuth: float
    cp: Optional[tuple[tuple[float, float], ...]] = None


Endpoint = Union[str, Outside]


@dataclass(frozen=True)
class Crack:
    flow_coefficient: float  # kg/(s.Pa^n) at the reference density
    exponent: float = 0.65


@dataclass(frozen=True)
class LargeOpening:
    width: float
    height: float
    discharge_coefficient: float = 0.78
    openable: bool = True

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class AirflowLink:
    id: str
    kind: Union[Crack, LargeOpening]
    source: Endpoint  # "from"; positive flow runs source -> target
    target: Endpoint
    mid_height: float  # m above ground

    def zones(self) -> tuple[str, ...]:
        return tuple(e for e in (self.source, self.target) if isinstance(e, str))


@dataclass(frozen=True)
class Site:
    latitude: float = -20.9
    longitude: float = 55.5
    ground_albedo: float = 0.2
    utc_offset_hours: float = 4.0
    date: str = "2001-01-15"


# Compliance-only descriptors. None of these feed the simulation.

@dataclass(frozen=True)
class SitingInfo:
    protected_fraction: float
    strip_width: float


@dataclass(frozen=True)
class LoftInfo:
    kind: str = "none"  # none | closed | ventilated
    vent_area: float = 0.0


@dataclass(frozen=True)
class WaterHeater:
    kind: str  # solar | electric | gas
    certified: bool = False
    instant: bool = False
    annual_production_kwh_per_m2: float = 0.0
    storage_l: float = 0.0
    collector_area_m2: float = 0.0
    off_peak_switch: bool = False
    capacity_l: float = 0.0
    flue_outlet: bool = False


@dataclass(frozen=True)
class ACOption:
    unit_type: str  # window | split
    cop: float
    mechanical_renewal_m3h: float = 0.0
    maintenance_contract: bool = False


@dataclass(frozen=True)
class VentilationLayout:
    """Explicit cross-ventilation areas; derived from the links when absent."""

    so1: float
    so2: float
    si1: float
    si2: float
    sp1: float
    sp2: float


@dataclass(frozen=True)
class EcodomInfo:
    siting: Optional[SitingInfo] = None
    loft: LoftInfo = field(default_factory=LoftInfo)
    water_heater: Optional[WaterHeater] = None
    ac_option: Optional[ACOption] = None
    ventilation_layout: Optional[VentilationLayout] = None


@dataclass(frozen=True)
class BuildingModel:
    name: str
    materials: tuple[Material, ...]
    constructions: tuple[Construction, ...]
    zones: tuple[Zone, ...]
    surfaces: tuple[Surface, ...] = ()
    glazings: tuple[Glazing, ...] = ()
    links: tuple[AirflowLink, ...] = ()
    site: Site = field(default_factory=Site)
    structure_class: str = "light"
    cp_table: Optional[tuple[tuple[float, float], ...]] = None
    # Known outdoor air-change rates (vol/h) per zone; bypasses the pressure solve.
    fixed_air_changes: Optional[dict] = None
    ecodom: EcodomInfo = field(default_factory=EcodomInfo)

    @cached_property
    def material_map(self) -> dict[str, Material]:
        return {m.name: m for m in self.materials}

    @cached_property
    def construction_map(self) -> dict[str, Construction]:
        return {c.name: c for c in self.constructions}

    @cached_property
    def zone_map(self) -> dict[str, Zone]:
        return {z.id: z for z in self.zones}

    @cached_property
    def surface_map(self) -> dict[str, Surface]:
        return {s.id: s for s in self.surfaces}

    def zone_index(self, zone_id: str) -> int:
        return [z.id for z in self.zones].index(zone_id)

    def glazings_on(self, surface_id: str) -> list[Glazing]:
        return [g for g in self.glazings if g.surface == surface_id]

    def opaque_area(self, surface: Surface) -> float:
        return surface.area - sum(g.area for g in self.glazings_on(surface.id))

    def glazing_surface(self, glazing: Glazing) -> Surface:
        return self.surface_map[glazing.surface]

    def insulation_thickness_cm(self, construction_name: str) -> float:
        """Insulating layers expressed as an equivalent thickness at 0.041 W/m.K."""
        thickness = 0.0
        for layer in self.construction_map[construction_name].layers:
            k = self.material_map[layer.material].conductivity
            if k <= INSULATION_MAX_CONDUCTIVITY:
                thickness += layer.thickness * INSULATION_REFERENCE_CONDUCTIVITY / k
        return 100.0 * thickness

    def areal_capacity(self, construction_name: str) -> float:
        total = 0.0
        for layer in self.construction_map[construction_name].layers:
            m = self.material_map[layer.material]
            total += m.density * m.specific_heat * layer.thickness
        return total

    def inertia_class(self, construction_name: str) -> str:
        return "heavy" if self.areal_capacity(construction_name) >= HEAVY_AREAL_CAPACITY else "light"


@dataclass(frozen=True)
class Violation:
    entity: str
    rule: str

    def __str__(self) -> str:
        return f"{self.entity}: {self.rule}"


def _in_unit(x: float) -> bool:
    return 0.0 <= x <= 1.0


def _check_overhang(entity: str, geom: Optional[OverhangGeometry], out: list) -> None:
    if geom is None:
        return
    if geom.depth < 0:
        out.append(Violation(entity, "overhang depth must be >= 0"))
    if geom.height <= 0:
        out.append(Violation(entity, "overhang protected height must be > 0"))
    if geom.gap < 0:
        out.append(Violation(entity, "overhang gap must be >= 0"))


def _check_cp(entity: str, table, out: list) -> None:
    if table is None:
        return
    angles = [a for a, _ in table]
    if len(table) < 2 or angles != sorted(angles) or angles[0] > 0 or angles[-1] < 180:
        out.append(Violation(entity, "cp table must be sorted and span incidence 0-180"))


def validate(model: BuildingModel) -> list[Violation]:
    """Return every invariant breach and dangling reference in ``model``.

    An empty list means the model is safe to simulate.
    """
    out: list[Violation] = []
    names = [m.name for m in model.materials]
    for m in model.materials:
        if not (m.conductivity > 0 and m.density > 0 and m.specific_heat > 0):
            out.append(Violation(f"material {m.name}", "conductivity, density and specific heat must be > 0"))
    if len(set(names)) != len(names):
        out.append(Violation("materials", "names must be unique"))

    for c in model.constructions:
        ent = f"construction {c.name}"
        if not c.layers:
            out.append(Violation(ent, "at least one layer"))
        for layer in c.layers:
            if layer.thickness <= 0:
                out.append(Violation(ent, f"layer {layer.material} thickness must be > 0"))
            if layer.material not in model.material_map:
                out.append(Violation(ent, f"unknown material {layer.material!r}"))
        if not _in_unit(c.exterior_absorptivity):
            out.append(Violation(ent, "absorptivity must be in [0,1]"))
        if not _in_unit(c.exterior_emissivity):
            out.append(Violation(ent, "emissivity must be in [0,1]"))

    zone_ids = [z.id for z in model.zones]
    if len(set(zone_ids)) != len(zone_ids):
        out.append(Violation("zones", "ids must be unique"))
    for z in model.zones:
        ent = f"zone {z.id}"
        if z.volume <= 0:
            out.append(Violation(ent, "volume must be > 0"))
        if z.floor_area <= 0:
            out.append(Violation(ent, "floor_area must be > 0"))
        g = z.gains
        for label, series in (("sensible", g.sensible), ("moisture", g.moisture), ("occupants", g.occupants)):
            if len(series) != HOURS:
                out.append(Violation(ent, f"{label} gains need 24 entries"))
            elif any(v < 0 for v in series):
                out.append(Violation(ent, f"{label} gains must be >= 0"))
        if z.conditioning is not None and len(z.conditioning.schedule) != HOURS:
            out.append(Violation(ent, "conditioning schedule needs 24 entries"))

    surface_ids = [s.id for s in model.surfaces]
    if len(set(surface_ids)) != len(surface_ids):
        out.append(Violation("surfaces", "ids must be unique"))
    for s in model.surfaces:
        ent = f"surface {s.id}"
        if s.area <= 0:
            out.append(Violation(ent, "area must be > 0"))
        if not 0.0 <= s.azimuth < 360.0:
            out.append(Violation(ent, "azimuth must be in [0,360)"))
        if not 0.0 <= s.tilt <= 180.0:
            out.append(Violation(ent, "tilt must be in [0,180]"))
        if s.construction not in model.construction_map:
            out.append(Violation(ent, f"unknown construction {s.construction!r}"))
        if s.zone not in model.zone_map:
            out.append(Violation(ent, f"unknown zone {s.zone!r}"))
        if isinstance(s.boundary, Adjacent):
            if s.boundary.zone not in model.zone_map:
                out.append(Violation(ent, f"unknown adjacent zone {s.boundary.zone!r}"))
            elif s.boundary.zone == s.zone:
                out.append(Violation(ent, "adjacent zone must differ from its own zone"))
        elif s.boundary not in (EXTERIOR, GROUND):
            out.append(Violation(ent, f"unknown boundary {s.boundary!r}"))
        _check_overhang(ent, s.overhang, out)

    glazed: dict[str, float] = {}
    for g in model.glazings:
        ent = f"glazing {g.id}"
        if g.area <= 0:
            out.append(Violation(ent, "area must be > 0"))
        if not _in_unit(g.solar_transmittance):
            out.append(Violation(ent, "solar transmittance must be in [0,1]"))
        if not _in_unit(g.shading_multiplier):
            out.append(Violation(ent, "shading multiplier must be in [0,1]"))
        if g.u_value < 0:
            out.append(Violation(ent, "U-value must be >= 0"))
        if g.surface not in model.surface_map:
            out.append(Violation(ent, f"unknown host surface {g.surface!r}"))
        else:
            glazed[g.surface] = glazed.get(g.surface, 0.0) + g.area
        _check_overhang(ent, g.overhang, out)
    for sid, area in glazed.items():
        if area > model.surface_map[sid].area:
            out.append(Violation(f"surface {sid}", "glazing area exceeds surface area"))

    _check_cp("building", model.cp_table, out)
    for link in model.links:
        ent = f"link {link.id}"
        k = link.kind
        if isinstance(k, Crack):
            if k.flow_coefficient <= 0:
                out.append(Violation(ent, "flow coefficient must be > 0"))
            if not 0.5 <= k.exponent <= 1.0:
                out.append(Violation(ent, "exponent must be in [0.5,1]"))
        else:
            if not 0.0 < k.discharge_coefficient <= 1.0:
                out.append(Violation(ent, "discharge coefficient must be in (0,1]"))
            if k.width <= 0 or k.height <= 0:
                out.append(Violation(ent, "opening width and height must be > 0"))
        if link.source == link.target or not link.zones():
            out.append(Violation(ent, "from != to"))
        for end in (link.source, link.target):
            if isinstance(end, str) and end not in model.zone_map:
                out.append(Violation(ent, f"unknown zone {end!r}"))
            if isinstance(end, Outside):
                _check_cp(ent, end.cp, out)

    if model.fixed_air_changes is not None:
        for zid, ach in model.fixed_air_changes.items():
            if zid not in model.zone_map:
                out.append(Violation("fixed_air_changes", f"unknown zone {zid!r}"))
            elif ach < 0:
                out.append(Violation("fixed_air_changes", f"rate for {zid} must be >= 0"))

    out.extend(_reachability(model))
    return out


def _reachability(model: BuildingModel) -> list[Violation]:
    """Zones that cannot exchange air with the outside must be flagged sealed."""
    reached: set[str] = set()
    if model.fixed_air_changes:
        reached.update(z for z, ach in model.fixed_air_changes.items() if ach > 0)
    frontier = set(reached)
    for link in model.links:
        zs = link.zones()
        if len(zs) == 1:
            frontier.add(zs[0])
    reached |= frontier
    while frontier:
        nxt = set()
        for link in model.links:
            zs = link.zones()
            if len(zs) == 2:
                a, b = zs
                if a in reached and b not in reached:
                    nxt.add(b)
                if b in reached and a not in reached:
                    nxt.add(a)
        reached |= nxt
        frontier = nxt
    return [Violation(f"zone {z.id}", "not reachable in the link graph and not flagged sealed")
            for z in model.zones if z.id not in reached and not z.sealed]


def interval_hours(start: int, end: int) -> tuple[int, ...]:
    """Schedule indices for the clock interval [start h, end h).

    Index ``h`` is the step that ends at h:00, so the interval maps to
    start+1 .. end (wrapping at midnight).
    """
    out = []
    h = start
    while h != end % HOURS:
        h = (h + 1) % HOURS
        out.append(h)
    return tuple(out)


def default_gain_schedule(adults: int = 0, children: int = 0, occupied=None, lighting=(19, 22),
                          lighting_w: float = 100.0, adult_w: float = 70.0, child_w: float = 50.0,
                          adult_moisture_g_h: float = 50.0, child_moisture_g_h: float = 35.0) -> GainSchedule:
    """Hourly occupant and lighting gains for one room.

    ``occupied`` and ``lighting`` are clock intervals (start h, end h).
    """
    occ = set(interval_hours(*occupied)) if occupied else set()
    lights = set(interval_hours(*lighting)) if lighting else set()
    sensible, moisture, occupants = [], [], []
    for h in range(HOURS):
        n_ad = adults if h in occ else 0
        n_ch = children if h in occ else 0
        sensible.append(n_ad * adult_w + n_ch * child_w + (lighting_w if h in lights else 0.0))
        moisture.append((n_ad * adult_moisture_g_h + n_ch * child_moisture_g_h) / 1000.0 / 3600.0)
        occupants.append(float(n_ad + n_ch))
    return GainSchedule(tuple(sensible), tuple(moisture), tuple(occupants))


def hour_flags(hours) -> tuple[bool, ...]:
    hs = set(hours)
    return tuple(h in hs for h in range(HOURS))
