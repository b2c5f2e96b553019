"""Comfort and energy criteria computed from hourly series."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

# Sample h is the state at h:00. Day covers [7h, 19h), night [20h, 6h).
DAY_HOURS = tuple(range(7, 19))
NIGHT_HOURS = (20, 21, 22, 23, 0, 1, 2, 3, 4, 5)
WINDOW_SEMANTICS = "day = samples 7..18 (half-open [7h,19h)); night = samples 20..23,0..5 (half-open [20h,6h))"
SEASON_DAYS = 181  # November to April

AIR_WEIGHT = 0.55
RADIANT_WEIGHT = 0.45


def mean_radiant(surfaces: Sequence[tuple[float, float]]) -> float:
    """Area-weighted mean of (area, inside surface temperature) pairs."""
    if not surfaces:
        raise ValueError("mean radiant temperature needs at least one surface")
    total = sum(a for a, _ in surfaces)
    return sum(a * t for a, t in surfaces) / total


def resultant_temperature(t_air: float, t_radiant: float) -> float:
    return AIR_WEIGHT * t_air + RADIANT_WEIGHT * t_radiant


@dataclass(frozen=True)
class CriteriaSummary:
    day_resultant: float
    night_resultant: float
    max_resultant: float
    max_power: float  # W
    max_power_per_m2: float  # W/m2
    daily_energy: float  # kWh thermal
    seasonal_energy: float  # kWh thermal


def periodic_trapezoid_kwh(power: Sequence[float], dt_hours: float = 1.0) -> float:
    """Trapezoidal integral of an hourly power profile over one periodic day."""
    n = len(power)
    wh = sum(0.5 * (power[k] + power[(k + 1) % n]) for k in range(n)) * dt_hours
    return wh / 1000.0


def summarize(resultant: Sequence[float], power: Sequence[float], floor_area: float,
              season_days: int = SEASON_DAYS) -> CriteriaSummary:
    """Day/night/max resultant temperature and cooling-power criteria for one 24 h day."""
    if len(resultant) != 24 or len(power) != 24:
        raise ValueError(f"expected 24 hourly values, got {len(resultant)} and {len(power)}")
    day = sum(resultant[h] for h in DAY_HOURS) / len(DAY_HOURS)
    night = sum(resultant[h] for h in NIGHT_HOURS) / len(NIGHT_HOURS)
    pmax = max(power)
    daily = periodic_trapezoid_kwh(power)
    return CriteriaSummary(day, night, max(resultant), pmax, pmax / floor_area, daily, daily * season_days)
