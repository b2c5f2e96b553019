"""Sun position, plane-of-surface irradiance and horizontal overhang shading."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

from .model import OverhangGeometry


@dataclass(frozen=True)
class SunPosition:
    altitude: float  # degrees above the horizon
    azimuth: float  # degrees clockwise from North


_J2000 = datetime(2000, 1, 1, 12)


def declination_and_eot(instant: datetime) -> tuple[float, float]:
    """Solar declination (rad) and equation of time (minutes).

    Low-precision almanac series (about 0.01 deg over 1950-2050); ``instant``
    is naive UTC.
    """
    n = (instant - _J2000).total_seconds() / 86400.0
    mean_long = (280.460 + 0.9856474 * n) % 360.0
    g = math.radians((357.528 + 0.9856003 * n) % 360.0)
    ecl_long = math.radians(mean_long + 1.915 * math.sin(g) + 0.020 * math.sin(2 * g))
    obliquity = math.radians(23.439 - 4e-7 * n)
    decl = math.asin(math.sin(obliquity) * math.sin(ecl_long))
    right_asc = math.degrees(math.atan2(math.cos(obliquity) * math.sin(ecl_long), math.cos(ecl_long)))
    eot = (mean_long - right_asc + 180.0) % 360.0 - 180.0
    return decl, 4.0 * eot


def _as_utc(instant: datetime) -> datetime:
    if instant.tzinfo is None:
        return instant
    return instant.astimezone(timezone.utc).replace(tzinfo=None)


def solar_position(instant: datetime, latitude: float, longitude: float) -> SunPosition:
    """Sun altitude and azimuth at ``instant`` (naive datetimes are taken as UTC).

    The hour angle is built from true solar time. Altitude is negative at night.
    """
    t = _as_utc(instant)
    decl, eot = declination_and_eot(t)
    minutes = t.hour * 60.0 + t.minute + t.second / 60.0 + t.microsecond / 6e7
    true_solar = minutes + eot + 4.0 * longitude
    ha = math.radians(true_solar / 4.0 - 180.0)
    lat = math.radians(latitude)

    sin_alt = math.sin(lat) * math.sin(decl) + math.cos(lat) * math.cos(decl) * math.cos(ha)
    altitude = math.degrees(math.asin(max(-1.0, min(1.0, sin_alt))))
    # azimuth from South, positive westward, then shifted to clockwise from North
    az_south = math.atan2(math.sin(ha), math.cos(ha) * math.sin(lat) - math.tan(decl) * math.cos(lat))
    azimuth = (math.degrees(az_south) + 180.0) % 360.0
    return SunPosition(altitude, azimuth)


def solar_noon_utc(day: datetime, longitude: float) -> datetime:
    """UTC instant of local solar noon on the calendar day of ``day``."""
    base = datetime(day.year, day.month, day.day, 12)
    _, eot = declination_and_eot(base)
    return base + timedelta(minutes=-4.0 * longitude - eot)


def cos_incidence(surface_azimuth: float, tilt: float, sun: SunPosition) -> float:
    alt = math.radians(sun.altitude)
    beta = math.radians(tilt)
    gamma = math.radians(sun.azimuth - surface_azimuth)
    return math.sin(alt) * math.cos(beta) + math.cos(alt) * math.sin(beta) * math.cos(gamma)


def irradiance_components(surface_azimuth: float, tilt: float, sun: SunPosition, direct_normal: float,
                          diffuse_horizontal: float, ground_albedo: float) -> tuple[float, float, float]:
    """(direct, sky diffuse, ground reflected) irradiance on a plane, W/m2.

    Isotropic sky; the ground reflects the global horizontal with a
    (1 - cos tilt)/2 view factor.
    """
    if sun.altitude > 0.0:
        direct = direct_normal * max(0.0, cos_incidence(surface_azimuth, tilt, sun))
        beam_horizontal = direct_normal * math.sin(math.radians(sun.altitude))
    else:
        direct = 0.0
        beam_horizontal = 0.0
    cb = math.cos(math.radians(tilt))
    diffuse = diffuse_horizontal * (1.0 + cb) / 2.0
    reflected = ground_albedo * (beam_horizontal + diffuse_horizontal) * (1.0 - cb) / 2.0
    return direct, diffuse, reflected


def incident_irradiance(surface_azimuth: float, tilt: float, sun: SunPosition, direct_normal: float,
                        diffuse_horizontal: float, ground_albedo: float) -> float:
    return sum(irradiance_components(surface_azimuth, tilt, sun, direct_normal, diffuse_horizontal,
                                     ground_albedo))


def profile_angle(sun: SunPosition, element_azimuth: float) -> float:
    """Vertical shadow angle (deg) in the plane normal to a vertical element."""
    cos_g = math.cos(math.radians(sun.azimuth - element_azimuth))
    if sun.altitude <= 0.0 or cos_g <= 0.0:
        return 0.0
    return math.degrees(math.atan2(math.tan(math.radians(sun.altitude)), cos_g))


def shading_fraction_at_profile(geom: OverhangGeometry, profile_deg: float) -> float:
    if profile_deg <= 0.0 or geom.depth <= 0.0:
        return 0.0
    if profile_deg >= 90.0:
        return 1.0
    drop = geom.depth * math.tan(math.radians(profile_deg))
    band = min(max(drop - geom.gap, 0.0), geom.height)
    return band / geom.height


def overhang_shading_fraction(geom: OverhangGeometry, sun: SunPosition, element_azimuth: float) -> float:
    """Fraction of a vertical element's height in the shadow of a horizontal overhang.

    A sun behind the facade casts no beam on it, so the fraction is 0 there.
    """
    return shading_fraction_at_profile(geom, profile_angle(sun, element_azimuth))
