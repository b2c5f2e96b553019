"""Nodal thermal model: wall and air nodes, system assembly and implicit stepping.

Each construction layer is split into equal slabs with one node at each slab
centre. Adjacent nodes are joined by the conductance of the two half-slabs
between them; the outermost half-slabs are in series with the surface film.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .constants import CP_AIR, RHO_REF
from .model import EXTERIOR, Adjacent, BuildingModel, Surface
from .solar import SunPosition, irradiance_components, overhang_shading_fraction

log = logging.getLogger(__name__)

SOLVE_RTOL = 1e-9


@dataclass(frozen=True)
class ThermalConfig:
    nodes_per_layer: int = 2
    h_in: float = 8.3  # W/m2.K, combined interior film
    h_out_still: float = 17.0  # W/m2.K
    h_out_wind: float = 4.0  # W/m2.K per m/s


@dataclass(frozen=True)
class WallNode:
    surface: str
    depth: int  # 0 = boundary side


@dataclass(frozen=True)
class AirNode:
    zone: str


@dataclass
class SurfaceNodes:
    surface: Surface
    first: int
    last: int
    area: float  # opaque
    r_half_first: float  # K/W, boundary face to first node
    r_half_last: float  # K/W, last node to zone face


@dataclass
class NodeLayout:
    nodes: list
    capacitance: np.ndarray
    conduction: list  # (i, j, G W/K) inside walls
    surfaces: list  # SurfaceNodes
    air: dict  # zone id -> node index

    @property
    def size(self) -> int:
        return len(self.nodes)

    def surface_nodes(self, surface_id: str) -> SurfaceNodes:
        for sn in self.surfaces:
            if sn.surface.id == surface_id:
                return sn
        raise KeyError(surface_id)


def discretize(model: BuildingModel, nodes_per_layer: int = 2) -> NodeLayout:
    """Lay out wall nodes for every opaque surface and one air node per zone."""
    if nodes_per_layer < 1:
        raise ValueError("nodes_per_layer must be >= 1")
    nodes, caps, conduction, surfaces = [], [], [], []
    for s in model.surfaces:
        area = model.opaque_area(s)
        if area <= 0.0:
            continue
        first = len(nodes)
        halves = []  # half-slab resistance of each node
        for layer in model.construction_map[s.construction].layers:
            mat = model.material_map[layer.material]
            dx = layer.thickness / nodes_per_layer
            for _ in range(nodes_per_layer):
                nodes.append(WallNode(s.id, len(nodes) - first))
                caps.append(mat.density * mat.specific_heat * dx * area)
                halves.append(dx / (2.0 * mat.conductivity * area))
        for k in range(len(halves) - 1):
            conduction.append((first + k, first + k + 1, 1.0 / (halves[k] + halves[k + 1])))
        surfaces.append(SurfaceNodes(s, first, len(nodes) - 1, area, halves[0], halves[-1]))
    air = {}
    for z in model.zones:
        air[z.id] = len(nodes)
        nodes.append(AirNode(z.id))
        caps.append(RHO_REF * CP_AIR * z.volume)
    return NodeLayout(nodes, np.array(caps), conduction, surfaces, air)


@dataclass
class NodalSystem:
    """C dT/dt = A T + B for one time step."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    layout: NodeLayout
    # interior film conductances (node, zone, G) used to recover surface temperatures
    films: list = field(default_factory=list)


def _floor_targets(model: BuildingModel, layout: NodeLayout, zone: str) -> list[tuple[int, float]]:
    """(node, area) of the floor faces seen from ``zone``."""
    out = []
    for sn in layout.surfaces:
        s = sn.surface
        if s.zone == zone and s.is_floor:
            out.append((sn.last, sn.area))
        elif isinstance(s.boundary, Adjacent) and s.boundary.zone == zone and s.tilt < 60.0:
            out.append((sn.first, sn.area))
    return out


def _sunlit_irradiance(model: BuildingModel, surface: Surface, overhang, sun: SunPosition, weather) -> float:
    direct, diffuse, reflected = irradiance_components(surface.azimuth, surface.tilt, sun, weather.direct_normal,
                                                       weather.diffuse_horizontal, model.site.ground_albedo)
    if overhang is not None and direct > 0.0:
        direct *= 1.0 - overhang_shading_fraction(overhang, sun, surface.azimuth)
    return direct + diffuse + reflected


def assemble(model: BuildingModel, layout: NodeLayout, airflow, weather, sun: SunPosition, hour: Optional[int] = None,
             config: ThermalConfig = ThermalConfig()) -> NodalSystem:
    """Build A and B for the current weather, sun, gains and converged airflow."""
    n = layout.size
    A = np.zeros((n, n))
    B = np.zeros(n)
    t_out = weather.dry_bulb
    h = weather.hour_index if hour is None else hour
    h_out = config.h_out_still + config.h_out_wind * weather.wind_speed
    films = []

    def couple(i, j, g):
        A[i, j] += g
        A[j, i] += g
        A[i, i] -= g
        A[j, j] -= g

    def to_fixed(i, g, t):
        A[i, i] -= g
        B[i] += g * t

    for i, j, g in layout.conduction:
        couple(i, j, g)

    for sn in layout.surfaces:
        s = sn.surface
        air_in = layout.air[s.zone]
        g_in = 1.0 / (sn.r_half_last + 1.0 / (config.h_in * sn.area))
        couple(sn.last, air_in, g_in)
        films.append((sn.last, s.zone, g_in, sn.r_half_last, sn.area))
        if s.boundary == EXTERIOR:
            to_fixed(sn.first, 1.0 / (sn.r_half_first + 1.0 / (h_out * sn.area)), t_out)
            alpha = model.construction_map[s.construction].exterior_absorptivity
            B[sn.first] += alpha * _sunlit_irradiance(model, s, s.overhang, sun, weather) * sn.area
        elif isinstance(s.boundary, Adjacent):
            g_b = 1.0 / (sn.r_half_first + 1.0 / (config.h_in * sn.area))
            couple(sn.first, layout.air[s.boundary.zone], g_b)
            films.append((sn.first, s.boundary.zone, g_b, sn.r_half_first, sn.area))
        # ground: adiabatic

    transmitted = {z.id: 0.0 for z in model.zones}
    for g in model.glazings:
        s = model.surface_map[g.surface]
        to_fixed(layout.air[s.zone], g.u_value * g.area, t_out)
        irr = _sunlit_irradiance(model, s, g.overhang, sun, weather)
        transmitted[s.zone] += g.solar_transmittance * g.shading_multiplier * irr * g.area
    for z in model.zones:
        q = transmitted[z.id]
        if q <= 0.0:
            continue
        targets = _floor_targets(model, layout, z.id)
        total = sum(a for _, a in targets)
        if targets:
            for node, area in targets:
                B[node] += q * area / total
        else:
            B[layout.air[z.id]] += q

    for z in model.zones:
        i = layout.air[z.id]
        B[i] += z.gains.sensible[h]
        if airflow is None:
            continue
        for src, m in airflow.inflows(z.id):
            g = m * CP_AIR
            A[i, i] -= g
            if isinstance(src, str):
                A[i, layout.air[src]] += g
            else:
                B[i] += g * t_out
    return NodalSystem(A, B, layout.capacitance.copy(), layout, films)


@dataclass
class ThermalState:
    temperatures: np.ndarray
    time: float = 0.0  # s


@dataclass
class StepOutcome:
    temperatures: np.ndarray
    cooling: dict  # zone id -> W removed (>= 0)
    residual: float  # max |(C/dt - A) T - rhs| / max |rhs|


def _solve(system: NodalSystem, t_old: np.ndarray, dt: float, fixed: dict) -> tuple[np.ndarray, float]:
    M = np.diag(system.C / dt) - system.A
    rhs = system.C / dt * t_old + system.B
    n = len(rhs)
    if not fixed:
        t_new = np.linalg.solve(M, rhs)
        scale = max(float(np.max(np.abs(rhs))), 1e-300)
        return t_new, float(np.max(np.abs(M @ t_new - rhs))) / scale
    free = np.array([i for i in range(n) if i not in fixed], dtype=int)
    fix = np.array(sorted(fixed), dtype=int)
    t_fix = np.array([fixed[i] for i in fix])
    t_new = np.empty(n)
    t_new[fix] = t_fix
    if not len(free):
        return t_new, 0.0
    r = rhs[free] - M[np.ix_(free, fix)] @ t_fix
    Mf = M[np.ix_(free, free)]
    t_new[free] = np.linalg.solve(Mf, r)
    scale = max(float(np.max(np.abs(r))), 1e-300)
    return t_new, float(np.max(np.abs(Mf @ t_new[free] - r))) / scale


def step_implicit(system: NodalSystem, state, dt: float, setpoints: Optional[dict] = None) -> StepOutcome:
    """Advance one fully implicit step: (C/dt - A) T_new = C/dt T_old + B.

    ``setpoints`` maps zone id -> clamp temperature for conditioned zones. A
    clamped zone stays at its setpoint only while that needs heat removal;
    zones that would float below the setpoint are released and report 0 W.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    t_old = state.temperatures if isinstance(state, ThermalState) else np.asarray(state, dtype=float)
    air = system.layout.air
    active = dict(setpoints or {})
    while True:
        fixed = {air[z]: sp for z, sp in active.items()}
        t_new, res = _solve(system, t_old, dt, fixed)
        cooling = {}
        released = []
        for z in active:
            i = air[z]
            # heat that must be added to hold the clamp
            q = system.C[i] / dt * (t_new[i] - t_old[i]) - (system.A[i] @ t_new + system.B[i])
            if q > 0.0:
                released.append(z)
            cooling[z] = -q
        if not released:
            break
        for z in released:
            del active[z]
    if not np.all(np.isfinite(t_new)):
        raise FloatingPointError("non-finite temperature in implicit step")
    if res > SOLVE_RTOL:
        log.warning("implicit solve residual %.3e exceeds %.0e", res, SOLVE_RTOL)
    for z in setpoints or {}:
        cooling.setdefault(z, 0.0)
    return StepOutcome(t_new, {z: max(0.0, cooling[z]) for z in cooling}, res)


def conditioning_power(zone: str, system: NodalSystem, state, setpoint: float, dt: float) -> float:
    """Sensible cooling (W) needed to hold ``zone`` at ``setpoint`` over one step."""
    return step_implicit(system, state, dt, {zone: setpoint}).cooling[zone]


def node_residuals(system: NodalSystem, t_old: np.ndarray, t_new: np.ndarray, dt: float,
                   cooling: Optional[dict] = None) -> np.ndarray:
    """Per-node energy balance C dT/dt - (A T + B) + cooling, in W."""
    r = system.C * (t_new - t_old) / dt - (system.A @ t_new + system.B)
    for z, q in (cooling or {}).items():
        r[system.layout.air[z]] += q
    return r


def surface_temperatures(system: NodalSystem, temps: np.ndarray) -> dict:
    """zone id -> list of (area, inside surface temperature) for its opaque faces."""
    out = {z: [] for z in system.layout.air}
    for node, zone, g, r_half, area in system.films:
        t_node = temps[node]
        t_air = temps[system.layout.air[zone]]
        out[zone].append((area, t_node - g * r_half * (t_node - t_air)))
    return out
