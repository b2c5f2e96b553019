"""Hourly weather records, CSV ingestion and the seven-day wind study."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional

COLUMNS = ("hour", "dry_bulb_C", "rh_pct", "dni_wm2", "dhi_wm2", "wind_ms", "wind_dir_deg")

NORTH = 0.0
EAST = 90.0
SOUTH_EAST = 135.0

# (speed m/s, direction deg) per day of the artificial wind file.
WIND_STUDY_DAYS = (
    (0.0, 0.0),
    (1.0, SOUTH_EAST),
    (5.0, SOUTH_EAST),
    (1.0, EAST),
    (5.0, EAST),
    (1.0, NORTH),
    (5.0, NORTH),
)


class WeatherError(ValueError):
    pass


@dataclass(frozen=True)
class WeatherRecord:
    hour_index: int
    dry_bulb: float
    relative_humidity: float
    direct_normal: float
    diffuse_horizontal: float
    wind_speed: float
    wind_direction: float

    def problems(self) -> list[str]:
        out = []
        if not 0 <= self.hour_index <= 23:
            out.append("hour")
        if not 0.0 <= self.relative_humidity <= 100.0:
            out.append("relative_humidity")
        if self.direct_normal < 0:
            out.append("direct_normal")
        if self.diffuse_horizontal < 0:
            out.append("diffuse_horizontal")
        if self.wind_speed < 0:
            out.append("wind_speed")
        if not 0.0 <= self.wind_direction < 360.0:
            out.append("wind_direction")
        return out


@dataclass(frozen=True)
class WeatherSequence:
    records: tuple[WeatherRecord, ...]
    site: str = ""

    def __post_init__(self):
        n = len(self.records)
        if n < 24 or n % 24:
            raise WeatherError(f"length must be multiple of 24 (got {n} records)")

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def days(self) -> int:
        return len(self.records) // 24

    def day(self, d: int) -> tuple[WeatherRecord, ...]:
        return self.records[24 * d:24 * (d + 1)]

    def with_wind(self, speed: float, direction: float) -> "WeatherSequence":
        return WeatherSequence(tuple(replace(r, wind_speed=speed, wind_direction=direction)
                                     for r in self.records), self.site)


def load_weather(path, site: Optional[str] = None) -> WeatherSequence:
    """Read the hourly CSV weather file.

    Raises WeatherError naming the line for parse failures and the field for
    out-of-range values.
    """
    path = Path(path)
    records = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != COLUMNS:
            raise WeatherError(f"{path}:1: header must be {','.join(COLUMNS)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(COLUMNS):
                raise WeatherError(f"{path}:{lineno}: expected {len(COLUMNS)} columns, got {len(row)}")
            try:
                hour = int(row[0])
                values = [float(c) for c in row[1:]]
            except ValueError as exc:
                raise WeatherError(f"{path}:{lineno}: {exc}") from None
            rec = WeatherRecord(hour, *values)
            bad = rec.problems()
            if bad:
                raise WeatherError(f"{path}:{lineno}: {bad[0]} out of range")
            expected = len(records) % 24
            if hour != expected:
                raise WeatherError(f"{path}:{lineno}: hour must be {expected}, got {hour}")
            records.append(rec)
    return WeatherSequence(tuple(records), site or path.stem)


def write_weather(seq: Iterable[WeatherRecord], path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in seq:
            w.writerow([r.hour_index, f"{r.dry_bulb:g}", f"{r.relative_humidity:g}", f"{r.direct_normal:g}",
                        f"{r.diffuse_horizontal:g}", f"{r.wind_speed:g}", f"{r.wind_direction:g}"])


def build_wind_study(base_day) -> WeatherSequence:
    """Seven copies of ``base_day`` that differ only in wind speed and direction."""
    base = tuple(base_day)
    if len(base) != 24:
        raise WeatherError(f"base day must have 24 records, got {len(base)}")
    records = []
    for speed, direction in WIND_STUDY_DAYS:
        records.extend(replace(r, wind_speed=speed, wind_direction=direction) for r in base)
    return WeatherSequence(tuple(records), "wind-study")


def typical_day_path() -> Path:
    return Path(__file__).parent / "data" / "weather" / "gillot_typical_day.csv"
