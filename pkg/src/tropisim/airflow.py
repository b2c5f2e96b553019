"""Zone pressure network driven by wind and buoyancy.

Zone pressures are referenced at ground level relative to the outdoor static
pressure there. A link at mid-height ``h`` sees ``P_zone - rho_zone*g*h`` on a
zone side and ``P_wind - rho_out*g*h`` on an exterior side.

Large openings follow Walton's treatment: the pressure difference varies
linearly over the opening height, and where it changes sign the opening
carries two counter-flows separated by a neutral plane. The orifice integral
over each part is evaluated in closed form.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .constants import CP_AIR, GRAVITY, RHO_REF, SECONDS_PER_HOUR, air_density
from .model import AirflowLink, BuildingModel, Crack, LargeOpening, Outside

log = logging.getLogger(__name__)

# Pressure coefficient vs wind incidence on the facade normal (deg, Cp).
DEFAULT_CP_TABLE = ((0.0, 0.70), (90.0, -0.50), (180.0, -0.30))

# Below this |dP| (Pa) flow laws switch to their linear secant.
REGULARIZATION_DP = 1e-5

RESIDUAL_TOL = 1e-6  # kg/s, convergence contract
NEWTON_TOL = 1e-10  # kg/s, what Newton actually aims for
MAX_ITERATIONS = 100


class AirflowConvergenceError(RuntimeError):
    def __init__(self, worst_residual: float, iterations: int):
        super().__init__(f"airflow network did not converge after {iterations} iterations "
                         f"(worst zone residual {worst_residual:.3e} kg/s)")
        self.worst_residual = worst_residual
        self.iterations = iterations


def incidence_angle(facade_azimuth: float, wind_direction: float) -> float:
    """Angle (0-180 deg) between the facade outward normal and the wind origin."""
    d = (wind_direction - facade_azimuth) % 360.0
    return 360.0 - d if d > 180.0 else d


def pressure_coefficient(incidence: float, cp_table=DEFAULT_CP_TABLE) -> float:
    angles, values = zip(*cp_table)
    return float(np.interp(incidence, angles, values))


def wind_pressure(facade_azimuth: float, speed: float, direction: float, cp_table=DEFAULT_CP_TABLE,
                  rho: float = RHO_REF) -> float:
    """Facade surface pressure (Pa) from the wind dynamic pressure."""
    if speed == 0.0:
        return 0.0
    cp = pressure_coefficient(incidence_angle(facade_azimuth, direction), cp_table)
    return 0.5 * rho * cp * speed * speed


def crack_flow(crack: Crack, dp: float, rho_upstream: float = RHO_REF) -> float:
    """Signed power-law mass flow (kg/s), positive in the direction of ``dp``."""
    if dp == 0.0:
        return 0.0
    c = crack.flow_coefficient * rho_upstream / RHO_REF
    return math.copysign(c * abs(dp) ** crack.exponent, dp)


def _crack_regularized(crack: Crack, dp: float, rho_from: float, rho_to: float) -> tuple[float, float]:
    rho = rho_from if dp >= 0.0 else rho_to
    c = crack.flow_coefficient * rho / RHO_REF
    n = crack.exponent
    a = abs(dp)
    if a < REGULARIZATION_DP:
        slope = c * REGULARIZATION_DP ** (n - 1.0)
        return slope * dp, slope
    m = c * a ** n
    return math.copysign(m, dp), n * m / a


def _piece(u0: float, u1: float, length: float, eps: float) -> tuple[float, float]:
    """Integral of g(u) and g'(u) over a piece where u varies linearly and keeps one branch.

    g(u) = sign(u) sqrt|u| outside the |u| < eps band and u/sqrt(eps) inside it.
    Written without dividing by the pressure gradient so it stays exact when
    the two densities coincide.
    """
    if length <= 0.0:
        return 0.0, 0.0
    um = 0.5 * (u0 + u1)
    if abs(um) < eps:
        se = math.sqrt(eps)
        return length * um / se, length / se
    U0, U1 = abs(u0), abs(u1)
    S0, S1 = math.sqrt(U0), math.sqrt(U1)
    s = S0 + S1
    if s == 0.0:
        return 0.0, math.inf
    g = (2.0 / 3.0) * length * (U1 + S1 * S0 + U0) / s
    return math.copysign(g, um), length / s


def _opening_integrals(a: float, b: float, half: float, eps: float):
    """Split [-half, half] where u = a + b*y crosses -eps, 0, eps and integrate.

    Returns (positive-part integral, negative-part |integral|, d(pos)/da, d(neg)/da
    as positive magnitudes of the g' integrals on each side).
    """
    cuts = [-half, half]
    if b != 0.0:
        for level in ((-eps, 0.0, eps) if eps > 0.0 else (0.0,)):
            y = (level - a) / b
            if -half < y < half:
                cuts.append(y)
    cuts.sort()
    pos = neg = dpos = dneg = 0.0
    for y0, y1 in zip(cuts[:-1], cuts[1:]):
        g, gp = _piece(a + b * y0, a + b * y1, y1 - y0, eps)
        um = a + b * 0.5 * (y0 + y1)
        if um > 0.0:
            pos += g
            dpos += gp
        elif um < 0.0:
            neg -= g
            dneg += gp
        else:
            dpos += 0.5 * gp
            dneg += 0.5 * gp
    return pos, neg, dpos, dneg


@dataclass(frozen=True)
class OpeningFlow:
    forward: float  # kg/s, source -> target
    reverse: float  # kg/s, target -> source
    neutral_height: Optional[float]  # m above the sill, None if no neutral plane inside

    @property
    def net(self) -> float:
        return self.forward - self.reverse


def _opening(opening: LargeOpening, dp_mid: float, rho_from: float, rho_to: float, eps: float):
    """Counter-flows and d(net)/d(dp_mid) for a pressure difference taken at mid-height."""
    half = 0.5 * opening.height
    b = -(rho_from - rho_to) * GRAVITY
    pos, neg, dpos, dneg = _opening_integrals(dp_mid, b, half, eps)
    k = opening.discharge_coefficient * opening.width
    qf = k * math.sqrt(2.0 * rho_from)
    qr = k * math.sqrt(2.0 * rho_to)
    neutral = None
    if b != 0.0:
        y = -dp_mid / b
        if -half < y < half:
            neutral = half + y
    return OpeningFlow(qf * pos, qr * neg, neutral), qf * dpos + qr * dneg


def large_opening_flow(opening: LargeOpening, p_from: float, p_to: float, t_from: float,
                       t_to: float) -> OpeningFlow:
    """Bidirectional flow through a door-sized opening.

    ``p_from``/``p_to`` are the static pressures on each side at the opening's
    mid-height datum; ``t_from``/``t_to`` the air temperatures (C) that set the
    density on each side. Exact orifice integrals, no regularization.
    """
    flow, _ = _opening(opening, p_from - p_to, air_density(t_from), air_density(t_to), 0.0)
    return flow


@dataclass(frozen=True)
class LinkFlow:
    link_id: str
    source: object  # zone id or Outside
    target: object
    forward: float
    reverse: float
    neutral_height: Optional[float] = None

    @property
    def net(self) -> float:
        return self.forward - self.reverse


@dataclass(frozen=True)
class AirflowSolution:
    pressures: dict  # zone id -> Pa at ground datum
    flows: tuple[LinkFlow, ...]
    residuals: dict  # zone id -> net inflow kg/s
    densities: dict  # zone id -> kg/m3
    outdoor_density: float
    iterations: int = 0
    trace: tuple[float, ...] = field(default=(), compare=False)

    def flow(self, link_id: str) -> LinkFlow:
        for f in self.flows:
            if f.link_id == link_id:
                return f
        raise KeyError(link_id)

    def inflows(self, zone: str) -> list[tuple[object, float]]:
        """(upstream endpoint, kg/s) for every stream entering ``zone``."""
        out = []
        for f in self.flows:
            if f.target == zone and f.forward > 0.0:
                out.append((f.source, f.forward))
            if f.source == zone and f.reverse > 0.0:
                out.append((f.target, f.reverse))
        return out

    def max_residual(self) -> float:
        return max((abs(r) for r in self.residuals.values()), default=0.0)


def zone_residuals(zone_ids: Sequence[str], flows: Sequence[LinkFlow]) -> dict:
    res = {z: 0.0 for z in zone_ids}
    for f in flows:
        if isinstance(f.target, str):
            res[f.target] += f.net
        if isinstance(f.source, str):
            res[f.source] -= f.net
    return res


def air_changes(volume: float, zone: str, solution: AirflowSolution) -> float:
    """Air changes per hour from the total mass inflow into ``zone``."""
    inflow = sum(m for _, m in solution.inflows(zone))
    return inflow / solution.densities[zone] * SECONDS_PER_HOUR / volume


def sealed_solution(model: BuildingModel, zone_temps: Sequence[float], t_out: float) -> AirflowSolution:
    dens = {z.id: air_density(t) for z, t in zip(model.zones, zone_temps)}
    return AirflowSolution({z.id: 0.0 for z in model.zones}, (), {z.id: 0.0 for z in model.zones}, dens,
                           air_density(t_out))


def fixed_flow_solution(model: BuildingModel, air_changes_per_hour: dict, zone_temps: Sequence[float],
                        t_out: float) -> AirflowSolution:
    """Known outdoor air renewal per zone, exchanged as balanced in/out streams."""
    dens = {z.id: air_density(t) for z, t in zip(model.zones, zone_temps)}
    flows = []
    for z in model.zones:
        ach = air_changes_per_hour.get(z.id, 0.0)
        if ach > 0.0:
            m = ach * z.volume * dens[z.id] / SECONDS_PER_HOUR
            flows.append(LinkFlow(f"fixed:{z.id}", Outside(0.0), z.id, m, m))
    flows = tuple(flows)
    return AirflowSolution({z.id: 0.0 for z in model.zones}, flows,
                           zone_residuals([z.id for z in model.zones], flows), dens, air_density(t_out))


class PressureNetwork:
    """Nonlinear mass-balance system for one set of temperatures and wind."""

    def __init__(self, model: BuildingModel, zone_temps: Sequence[float], t_out: float, wind_speed: float,
                 wind_direction: float, cp_table=None, links: Optional[Sequence[AirflowLink]] = None):
        self.model = model
        self.zone_ids = [z.id for z in model.zones]
        self.links = tuple(model.links if links is None else links)
        self.rho = {z: air_density(t) for z, t in zip(self.zone_ids, zone_temps)}
        self.rho_out = air_density(t_out)
        table = cp_table or model.cp_table or DEFAULT_CP_TABLE
        self._wind = {}
        for link in self.links:
            for end in (link.source, link.target):
                if isinstance(end, Outside) and end not in self._wind:
                    self._wind[end] = wind_pressure(end.azimuth, wind_speed, wind_direction, end.cp or table,
                                                    self.rho_out)
        self._setup_unknowns()

    def _setup_unknowns(self):
        linked = set()
        adj = {z: set() for z in self.zone_ids}
        outside = set()
        for link in self.links:
            zs = link.zones()
            linked.update(zs)
            if len(zs) == 2:
                adj[zs[0]].add(zs[1])
                adj[zs[1]].add(zs[0])
            else:
                outside.add(zs[0])
        self.pinned = set()
        seen = set()
        for z in sorted(linked):
            if z in seen:
                continue
            comp, stack = set(), [z]
            while stack:
                n = stack.pop()
                if n in comp:
                    continue
                comp.add(n)
                stack.extend(adj[n] - comp)
            seen |= comp
            if not comp & outside:
                # closed cluster: the pressure level is arbitrary, hold its smallest id at 0
                self.pinned.add(min(comp))
        self.unknowns = [z for z in self.zone_ids if z in linked and z not in self.pinned]
        self.index = {z: i for i, z in enumerate(self.unknowns)}

    def _side_pressure(self, end, p: dict, h: float) -> tuple[float, float]:
        if isinstance(end, Outside):
            return self._wind[end] - self.rho_out * GRAVITY * h, self.rho_out
        rho = self.rho[end]
        return p[end] - rho * GRAVITY * h, rho

    def _pressures(self, x) -> dict:
        p = {z: 0.0 for z in self.zone_ids}
        for z, i in self.index.items():
            p[z] = float(x[i])
        return p

    def link_flows(self, x, eps: float = REGULARIZATION_DP):
        """Per-link (LinkFlow, d net / d dp) at unknown-pressure vector ``x``."""
        p = self._pressures(x)
        out = []
        for link in self.links:
            pa, ra = self._side_pressure(link.source, p, link.mid_height)
            pb, rb = self._side_pressure(link.target, p, link.mid_height)
            dp = pa - pb
            if isinstance(link.kind, Crack):
                m, k = _crack_regularized(link.kind, dp, ra, rb)
                lf = LinkFlow(link.id, link.source, link.target, max(m, 0.0), max(-m, 0.0))
            else:
                of, k = _opening(link.kind, dp, ra, rb, eps)
                lf = LinkFlow(link.id, link.source, link.target, of.forward, of.reverse, of.neutral_height)
            out.append((lf, k))
        return out

    def residual(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Net inflow per unknown zone and its analytic Jacobian wrt the unknown pressures."""
        n = len(self.unknowns)
        r = np.zeros(n)
        jac = np.zeros((n, n))
        for lf, k in self.link_flows(x):
            i = self.index.get(lf.source) if isinstance(lf.source, str) else None
            j = self.index.get(lf.target) if isinstance(lf.target, str) else None
            m = lf.net
            if i is not None:
                r[i] -= m
                jac[i, i] -= k
            if j is not None:
                r[j] += m
                jac[j, j] -= k
            if i is not None and j is not None:
                jac[i, j] += k
                jac[j, i] += k
        return r, jac

    def _line_search(self, x, direction, merit):
        """Halve the step until the 2-norm of the residual drops; None if it never does."""
        lam = 1.0
        for _ in range(40):
            xt = x + lam * direction
            rt, jt = self.residual(xt)
            if float(rt @ rt) < merit:
                return xt, rt, jt, lam
            lam *= 0.5
        return None

    def solve(self, max_iterations: int = MAX_ITERATIONS) -> AirflowSolution:
        n = len(self.unknowns)
        x = np.zeros(n)
        trace = []
        it = 0
        if n:
            r, jac = self.residual(x)
            norm = float(np.max(np.abs(r)))
            trace.append(norm)
            prev = None
            while norm > NEWTON_TOL and it < max_iterations:
                it += 1
                try:
                    newton = np.linalg.solve(jac, -r)
                except np.linalg.LinAlgError:
                    newton = np.linalg.lstsq(jac, -r, rcond=None)[0]
                candidates = [newton, -jac.T @ r]
                if prev is not None:
                    # square-root flow laws make plain Newton bounce between mirror points;
                    # damp every component whose step reverses (Walton's relaxation)
                    with np.errstate(divide="ignore", invalid="ignore"):
                        ratio = np.where(prev != 0.0, newton / prev, 0.0)
                    if np.any(ratio < -0.5):
                        candidates.insert(0, np.where(ratio < -0.5, newton / (1.0 - ratio), newton))
                merit = float(r @ r)
                found = None
                for direction in candidates:
                    found = self._line_search(x, direction, merit)
                    if found is not None:
                        break
                if found is None:
                    break
                xt, r, jac, lam = found
                prev = xt - x
                x = xt
                norm = float(np.max(np.abs(r)))
                trace.append(norm)
        flows = tuple(lf for lf, _ in self.link_flows(x))
        residuals = zone_residuals(self.zone_ids, flows)
        worst = max((abs(v) for v in residuals.values()), default=0.0)
        if worst > RESIDUAL_TOL:
            raise AirflowConvergenceError(worst, it)
        return AirflowSolution(self._pressures(x), flows, residuals, dict(self.rho), self.rho_out, it,
                               tuple(trace))


def solve_network(model: BuildingModel, zone_temps: Sequence[float], weather, cp_table=None,
                  links: Optional[Sequence[AirflowLink]] = None) -> AirflowSolution:
    """Zone pressures and link flows for the given zone temperatures and weather record.

    Uses the model's fixed air-change rates instead when it declares them.
    """
    if model.fixed_air_changes is not None:
        return fixed_flow_solution(model, model.fixed_air_changes, zone_temps, weather.dry_bulb)
    links = model.links if links is None else links
    if not links:
        return sealed_solution(model, zone_temps, weather.dry_bulb)
    net = PressureNetwork(model, zone_temps, weather.dry_bulb, weather.wind_speed, weather.wind_direction,
                          cp_table, links)
    return net.solve()


def advection_gain(m_dot: float, t_source: float, t_zone: float) -> float:
    """Sensible heat (W) brought into a zone by ``m_dot`` kg/s of air at ``t_source``."""
    return m_dot * CP_AIR * (t_source - t_zone)


def format_debug(solution: AirflowSolution) -> str:
    lines = ["# zone pressures (Pa at ground datum)"]
    for z, p in solution.pressures.items():
        lines.append(f"{z} {p:.6g} residual={solution.residuals[z]:.3e}")
    lines.append("# link flows (kg/s)")
    for f in solution.flows:
        nh = "" if f.neutral_height is None else f" neutral={f.neutral_height:.4g}"
        lines.append(f"{f.link_id} fwd={f.forward:.6g} rev={f.reverse:.6g}{nh}")
    lines.append("# iteration trace (max |residual|)")
    lines.extend(f"{i} {v:.3e}" for i, v in enumerate(solution.trace))
    return "\n".join(lines) + "\n"
