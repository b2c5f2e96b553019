"""Zone specific-humidity balance coupled to the airflow solution.

No moisture buffering by walls or furniture: each zone is a single well-mixed
volume exchanging water vapour only through the air streams entering it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .constants import P_ATM

log = logging.getLogger(__name__)

W_MAX = 0.05


def saturation_pressure(t: float) -> float:
    """Saturation vapour pressure over water (Pa), Magnus form."""
    return 610.94 * math.exp(17.625 * t / (t + 243.04))


def outdoor_specific_humidity(dry_bulb: float, rh: float) -> float:
    """Humidity ratio (kg water / kg dry air) from dry bulb (C) and relative humidity (%)."""
    pv = rh / 100.0 * saturation_pressure(dry_bulb)
    return 0.622 * pv / (P_ATM - pv)


@dataclass
class MoistureStep:
    humidity: dict  # zone id -> kg/kg
    residuals: dict  # zone id -> water balance error, kg/s


def step_moisture(zone_ids, masses: dict, w_old: dict, airflow, gains: dict, w_out: float, dt: float) -> MoistureStep:
    """One implicit step of  M dw/dt = sum_in m (w_src - w) + G  for every zone.

    ``masses`` holds the dry-air mass of each zone (kg), ``gains`` the moisture
    production (kg/s).
    """
    ids = list(zone_ids)
    idx = {z: i for i, z in enumerate(ids)}
    n = len(ids)
    M = np.zeros((n, n))
    rhs = np.zeros(n)
    for z, i in idx.items():
        M[i, i] = masses[z] / dt
        rhs[i] = masses[z] / dt * w_old[z] + gains.get(z, 0.0)
        if airflow is None:
            continue
        for src, m in airflow.inflows(z):
            M[i, i] += m
            if isinstance(src, str):
                M[i, idx[src]] -= m
            else:
                rhs[i] += m * w_out
    w = np.linalg.solve(M, rhs)
    out = {}
    for z, i in idx.items():
        v = float(w[i])
        if not 0.0 <= v <= W_MAX:
            log.warning("humidity ratio %.4g in zone %s clamped to [0, %g]", v, z, W_MAX)
            v = min(max(v, 0.0), W_MAX)
        out[z] = v
    return MoistureStep(out, water_balance(ids, masses, w_old, out, airflow, gains, w_out, dt))


def water_balance(zone_ids, masses, w_old, w_new, airflow, gains, w_out, dt) -> dict:
    """Storage change minus advected-in, advected-out and generated water, per zone (kg/s)."""
    res = {}
    for z in zone_ids:
        store = masses[z] * (w_new[z] - w_old[z]) / dt
        net = gains.get(z, 0.0)
        if airflow is not None:
            for f in airflow.flows:
                if f.target == z:
                    net += f.forward * _w(f.source, w_new, w_out) - f.reverse * w_new[z]
                if f.source == z:
                    net += f.reverse * _w(f.target, w_new, w_out) - f.forward * w_new[z]
        res[z] = store - net
    return res


def _w(end, w_new, w_out):
    return w_new[end] if isinstance(end, str) else w_out
