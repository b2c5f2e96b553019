"""Time stepping: airflow/thermal coupling iterations, moisture and periodic warm-up."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Callable, Optional

import numpy as np

from .airflow import AirflowSolution, air_changes, solve_network
from .constants import SECONDS_PER_HOUR, air_density
from .metrics import mean_radiant, resultant_temperature
from .model import BuildingModel
from .moisture import outdoor_specific_humidity, step_moisture
from .solar import SunPosition, solar_position
from .thermal import (NodalSystem, NodeLayout, StepOutcome, ThermalConfig, ThermalState, assemble, discretize,
                      node_residuals, step_implicit, surface_temperatures)

log = logging.getLogger(__name__)

COUPLING_TOL = 0.01  # K
COUPLING_MAX_ITER = 50
WARMUP_TOL = 0.05  # K
WARMUP_MAX_CYCLES = 10


@dataclass
class CoupledStep:
    outcome: StepOutcome
    system: NodalSystem
    airflow: AirflowSolution
    iterations: int
    converged: bool


def _depends_on_temperature(model: BuildingModel) -> bool:
    return bool(model.links) and model.fixed_air_changes is None


def couple_zones(model: BuildingModel, layout: NodeLayout, state: ThermalState, weather, sun: SunPosition,
                 airflow_solver: Callable, dt: float, setpoints: Optional[dict] = None,
                 config: ThermalConfig = ThermalConfig(), hour: Optional[int] = None) -> CoupledStep:
    """Alternate airflow solves and implicit thermal steps until zone air temperatures settle.

    Stops when the largest air-temperature change between iterations is below
    0.01 K, or after 50 iterations (reported through ``converged``).
    """
    air_idx = [layout.air[z.id] for z in model.zones]
    t_air = state.temperatures[air_idx].copy()
    coupled = _depends_on_temperature(model)
    it = 0
    converged = False
    relax = 1.0
    while it < COUPLING_MAX_ITER:
        it += 1
        airflow = airflow_solver(t_air)
        system = assemble(model, layout, airflow, weather, sun, hour, config)
        outcome = step_implicit(system, state, dt, setpoints)
        new_air = outcome.temperatures[air_idx]
        change = float(np.max(np.abs(new_air - t_air))) if len(air_idx) else 0.0
        if not coupled or change < COUPLING_TOL:
            converged = True
            break
        if it >= 10:
            # stack-dominated cases can oscillate; damp the temperatures fed back to the airflow
            relax = 0.5
        t_air = t_air + relax * (new_air - t_air)
    if not converged:
        log.warning("zone coupling did not converge in %d iterations", it)
    return CoupledStep(outcome, system, airflow, it, converged)


@dataclass
class SimulationConfig:
    thermal: ThermalConfig = field(default_factory=ThermalConfig)
    dt: float = SECONDS_PER_HOUR
    cp_table: Optional[tuple] = None
    warmup: bool = True


@dataclass
class SimulationResult:
    zone_ids: list
    hours: list  # hour index of each recorded sample
    t_air: dict
    t_mr: dict
    t_res: dict
    humidity: dict
    ach: dict
    cooling: dict
    t_out: list
    airflows: list  # AirflowSolution per recorded sample
    log: list  # run-log lines
    max_thermal_residual: float = 0.0  # W
    max_airflow_residual: float = 0.0  # kg/s
    max_moisture_residual: float = 0.0  # kg/s
    warmup_cycles: int = 0
    nonconverged_steps: int = 0

    def zone_series(self, zone: str) -> dict:
        return {"t_air": self.t_air[zone], "t_mr": self.t_mr[zone], "t_res": self.t_res[zone],
                "w": self.humidity[zone], "ach": self.ach[zone], "cooling": self.cooling[zone]}


def _start(model: BuildingModel) -> datetime:
    y, m, d = (int(p) for p in model.site.date.split("-"))
    return datetime(y, m, d) - timedelta(hours=model.site.utc_offset_hours)


class Simulator:
    """Steps one building through a weather sequence."""

    def __init__(self, model: BuildingModel, config: Optional[SimulationConfig] = None):
        self.model = model
        self.config = config or SimulationConfig()
        self.layout = discretize(model, self.config.thermal.nodes_per_layer)
        self.start = _start(model)
        self.masses_volume = {z.id: z.volume for z in model.zones}

    def sun(self, day: int, hour: float) -> SunPosition:
        site = self.model.site
        return solar_position(self.start + timedelta(days=day, hours=hour), site.latitude, site.longitude)

    def initial_state(self, t0: float) -> tuple[ThermalState, dict]:
        temps = np.full(self.layout.size, float(t0))
        return ThermalState(temps), {}

    def _airflow_solver(self, rec):
        model = self.model
        cp = self.config.cp_table
        return lambda t_air: solve_network(model, t_air, rec, cp)

    def _setpoints(self, h: int) -> dict:
        out = {}
        for z in self.model.zones:
            c = z.conditioning
            if c is not None and c.schedule[h]:
                out[z.id] = c.setpoint
        return out

    def run_records(self, records, state: ThermalState, humidity: dict, first_day: int = 0, record=None):
        """Step through ``records`` (hourly). Returns the final state and humidity."""
        model = self.model
        dt = self.config.dt
        substeps = max(1, int(round(SECONDS_PER_HOUR / dt)))
        for k, rec in enumerate(records):
            day = first_day + k // 24
            h = rec.hour_index
            w_out = outdoor_specific_humidity(rec.dry_bulb, rec.relative_humidity)
            if not humidity:
                humidity.update({z.id: w_out for z in model.zones})
            setpoints = self._setpoints(h)
            for sub in range(substeps):
                sun = self.sun(day, h - (substeps - 1 - sub) * dt / SECONDS_PER_HOUR)
                t_old = state.temperatures
                step = couple_zones(model, self.layout, state, rec, sun, self._airflow_solver(rec), dt, setpoints,
                                    self.config.thermal, h)
                state = ThermalState(step.outcome.temperatures, state.time + dt)
                masses = {z.id: air_density(state.temperatures[self.layout.air[z.id]]) * z.volume
                          for z in model.zones}
                gains = {z.id: z.gains.moisture[h] for z in model.zones}
                ms = step_moisture([z.id for z in model.zones], masses, humidity, step.airflow, gains, w_out, dt)
                humidity = ms.humidity
                if record is not None:
                    record(k, sub, substeps, rec, step, t_old, ms)
        return state, humidity

    def warm_up(self, day_records) -> tuple[ThermalState, dict, int]:
        """Repeat one day until the midnight state repeats within 0.05 K (at most 10 cycles)."""
        t0 = sum(r.dry_bulb for r in day_records) / len(day_records)
        state, humidity = self.initial_state(t0)
        cycles = 0
        for cycles in range(1, WARMUP_MAX_CYCLES + 1):
            before = state.temperatures.copy()
            state, humidity = self.run_records(day_records, state, humidity)
            change = float(np.max(np.abs(state.temperatures - before)))
            if change < WARMUP_TOL:
                break
        return state, humidity, cycles

    def run(self, weather) -> SimulationResult:
        model = self.model
        records = list(weather.records)
        zone_ids = [z.id for z in model.zones]
        res = SimulationResult(zone_ids, [], *({z: [] for z in zone_ids} for _ in range(6)), [], [], [])
        if self.config.warmup:
            state, humidity, cycles = self.warm_up(records[:24])
            res.warmup_cycles = cycles
            res.log.append(f"warmup cycles={cycles}")
        else:
            state, humidity = self.initial_state(records[0].dry_bulb)

        def record(k, sub, substeps, rec, step, t_old, ms):
            r = node_residuals(step.system, t_old, step.outcome.temperatures, self.config.dt, step.outcome.cooling)
            res.max_thermal_residual = max(res.max_thermal_residual, float(np.max(np.abs(r))))
            res.max_airflow_residual = max(res.max_airflow_residual, step.airflow.max_residual())
            res.max_moisture_residual = max(res.max_moisture_residual,
                                            max((abs(v) for v in ms.residuals.values()), default=0.0))
            if not step.converged:
                res.nonconverged_steps += 1
            res.log.append(f"step {k} sub {sub} hour {rec.hour_index} iterations={step.iterations} "
                           f"converged={'yes' if step.converged else 'NO'}")
            if sub != substeps - 1:
                return
            temps = step.outcome.temperatures
            surf = surface_temperatures(step.system, temps)
            res.hours.append(rec.hour_index)
            res.t_out.append(rec.dry_bulb)
            res.airflows.append(step.airflow)
            for z in model.zones:
                ta = float(temps[self.layout.air[z.id]])
                tr = mean_radiant(surf[z.id]) if surf[z.id] else ta
                res.t_air[z.id].append(ta)
                res.t_mr[z.id].append(tr)
                res.t_res[z.id].append(resultant_temperature(ta, tr))
                res.humidity[z.id].append(ms.humidity[z.id])
                res.ach[z.id].append(air_changes(z.volume, z.id, step.airflow))
                res.cooling[z.id].append(step.outcome.cooling.get(z.id, 0.0))

        self.run_records(records, state, humidity, 0, record)
        return res


def simulate(model: BuildingModel, weather, config: Optional[SimulationConfig] = None) -> SimulationResult:
    return Simulator(model, config).run(weather)
