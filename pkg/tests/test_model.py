import math
from dataclasses import replace
from datetime import datetime, timedelta

import pytest
from hypothesis import given, strategies as st

from conftest import bare_zones, box, constant_day, crack
from tropisim import load_fixture, load_weather, typical_day_path, validate
from tropisim.building_io import FIXTURES
from tropisim.model import (OverhangGeometry, Outside, Zone, default_gain_schedule, hour_flags,
                            interval_hours)
from tropisim.solar import (SunPosition, cos_incidence, incident_irradiance, overhang_shading_fraction,
                            shading_fraction_at_profile, solar_noon_utc, solar_position)
from tropisim.simulation import Simulator

LAT, LON = -21.0, 55.0


def vented(model):
    return replace(model, links=(crack("c", Outside(0.0), model.zones[0].id),))


# validate --------------------------------------------------------------------

@pytest.mark.parametrize("name", FIXTURES)
def test_bundled_fixtures_are_valid(name):
    assert validate(load_fixture(name)) == []


def test_zero_volume_names_the_zone():
    m = vented(box())
    bad = replace(m, zones=(replace(m.zones[0], volume=0.0),))
    problems = validate(bad)
    assert len(problems) == 1
    assert problems[0].entity == "zone z" and "volume" in problems[0].rule


def test_self_link_is_one_violation():
    m = bare_zones("a", links=(crack("out", Outside(0.0), "a"), crack("loop", "a", "a")))
    problems = validate(m)
    assert [(p.entity, p.rule) for p in problems] == [("link loop", "from != to")]


def test_unreachable_zone_must_be_flagged_sealed():
    m = bare_zones("a", "b", links=(crack("out", Outside(0.0), "a"),))
    assert [p.entity for p in validate(m)] == ["zone b"]
    sealed = replace(m, zones=(m.zones[0], replace(m.zones[1], sealed=True)))
    assert validate(sealed) == []


def test_glazing_larger_than_wall_is_rejected():
    from tropisim.model import Glazing
    m = vented(box())
    m = replace(m, glazings=(Glazing("g", "z_w0", 9.0),))
    assert any("glazing area exceeds" in p.rule for p in validate(m))


# schedules -------------------------------------------------------------------

def test_interval_hours_maps_clock_interval_to_step_indices():
    # index h is the step ending at h:00
    assert interval_hours(19, 22) == (20, 21, 22)
    assert interval_hours(20, 6) == (21, 22, 23, 0, 1, 2, 3, 4, 5, 6)


def test_default_gains():
    g = default_gain_schedule(adults=2, children=1, occupied=(20, 6))
    assert g.sensible[0] == 2 * 70 + 50
    assert g.sensible[21] == 2 * 70 + 50 + 100  # lighting 19h-22h
    assert g.sensible[12] == 0.0
    assert g.moisture[0] == pytest.approx((2 * 50 + 35) / 3.6e6)
    assert sum(hour_flags(interval_hours(20, 6))) == 10


# solar position --------------------------------------------------------------

def _noon(year, month, day):
    return solar_position(solar_noon_utc(datetime(year, month, day), LON), LAT, LON)


def test_equinox_noon_altitude():
    assert _noon(2001, 3, 20).altitude == pytest.approx(90.0 - abs(LAT), abs=0.5)


def test_midnight_is_below_horizon():
    midnight = solar_noon_utc(datetime(2001, 3, 20), LON) + timedelta(hours=12)
    assert solar_position(midnight, LAT, LON).altitude < 0


def test_solstice_noon_altitude():
    # December solstice declination -23.44 deg: 90 - |lat - decl| = 87.56 deg
    assert _noon(2001, 12, 21).altitude == pytest.approx(87.56, abs=0.3)


def test_sun_rises_east_and_sets_west():
    noon = solar_noon_utc(datetime(2001, 1, 15), LON)
    morning = solar_position(noon - timedelta(hours=4), LAT, LON)
    evening = solar_position(noon + timedelta(hours=4), LAT, LON)
    assert 45 < morning.azimuth < 135
    assert 225 < evening.azimuth < 315


# irradiance ------------------------------------------------------------------

def test_normal_incidence_on_horizontal():
    assert incident_irradiance(0.0, 0.0, SunPosition(90.0, 0.0), 800.0, 0.0, 0.0) == pytest.approx(800.0)


def test_sun_below_horizon_keeps_only_diffuse_and_reflected():
    sun = SunPosition(-5.0, 90.0)
    assert incident_irradiance(90.0, 90.0, sun, 800.0, 0.0, 0.2) == 0.0
    assert incident_irradiance(90.0, 90.0, sun, 800.0, 100.0, 0.2) == pytest.approx(50.0 + 0.2 * 100.0 * 0.5)


def _vector_cos(surface_azimuth, tilt, sun):
    """Independent check: dot product of unit vectors in (east, north, up)."""
    a, b = math.radians(sun.azimuth), math.radians(sun.altitude)
    s = (math.sin(a) * math.cos(b), math.cos(a) * math.cos(b), math.sin(b))
    p, t = math.radians(surface_azimuth), math.radians(tilt)
    n = (math.sin(p) * math.sin(t), math.cos(p) * math.sin(t), math.cos(t))
    return sum(x * y for x, y in zip(s, n))


def test_east_wall_with_sun_due_north():
    sun = SunPosition(69.0, 0.0)
    direct = 800.0 * max(0.0, _vector_cos(90.0, 90.0, sun))
    assert incident_irradiance(90.0, 90.0, sun, 800.0, 0.0, 0.0) == pytest.approx(direct, abs=1e-9)
    # north wall sees the beam at cos(69 deg)
    assert incident_irradiance(0.0, 90.0, sun, 800.0, 0.0, 0.0) == pytest.approx(800 * math.cos(math.radians(69)))


@given(st.floats(0, 359.9), st.floats(0, 180), st.floats(0.1, 90), st.floats(0, 359.9))
def test_cos_incidence_matches_vector_form(surf_az, tilt, alt, sun_az):
    sun = SunPosition(alt, sun_az)
    assert cos_incidence(surf_az, tilt, sun) == pytest.approx(_vector_cos(surf_az, tilt, sun), abs=1e-12)


@given(st.floats(0, 359.9), st.floats(0, 180), st.floats(-90, 90), st.floats(0, 359.9),
       st.floats(0, 1200), st.floats(0, 500), st.floats(0, 1))
def test_irradiance_is_never_negative(surf_az, tilt, alt, sun_az, dni, dhi, albedo):
    assert incident_irradiance(surf_az, tilt, SunPosition(alt, sun_az), dni, dhi, albedo) >= 0.0


@given(st.floats(0, 359.9), st.floats(0, 180), st.floats(-90, 90), st.floats(0, 359.9))
def test_no_input_no_irradiance(surf_az, tilt, alt, sun_az):
    assert incident_irradiance(surf_az, tilt, SunPosition(alt, sun_az), 0.0, 0.0, 0.0) == 0.0


def test_horizontal_daily_sum_equals_global_horizontal():
    weather = load_weather(typical_day_path())
    sim = Simulator(load_fixture("individual-light"))
    total_in = total_plane = 0.0
    for rec in weather.records:
        sun = sim.sun(0, rec.hour_index)
        beam = rec.direct_normal * max(0.0, math.sin(math.radians(sun.altitude)))
        total_in += beam + rec.diffuse_horizontal
        total_plane += incident_irradiance(0.0, 0.0, sun, rec.direct_normal, rec.diffuse_horizontal, 0.2)
    assert total_in > 0
    assert total_plane == pytest.approx(total_in, rel=0.01)


# overhangs -------------------------------------------------------------------

def test_overhang_examples():
    assert shading_fraction_at_profile(OverhangGeometry(1.0, 1.0), 45.0) == pytest.approx(1.0)
    assert shading_fraction_at_profile(OverhangGeometry(1.0, 1.0), 0.0) == 0.0
    assert shading_fraction_at_profile(OverhangGeometry(0.5, 1.0), 45.0) == pytest.approx(0.5)
    # sun straight in front of the element: profile angle equals altitude
    assert overhang_shading_fraction(OverhangGeometry(0.5, 1.0), SunPosition(45.0, 0.0), 0.0) == pytest.approx(0.5)
    # a gap above the element delays the shadow
    assert shading_fraction_at_profile(OverhangGeometry(1.0, 1.0, 0.5), 45.0) == pytest.approx(0.5)


@given(st.floats(0, 3), st.floats(0, 3), st.floats(0.1, 3), st.floats(0, 2), st.floats(0, 89.9))
def test_overhang_monotone_in_depth(d1, d2, h, a, prof):
    lo, hi = sorted((d1, d2))
    assert (shading_fraction_at_profile(OverhangGeometry(lo, h, a), prof)
            <= shading_fraction_at_profile(OverhangGeometry(hi, h, a), prof) + 1e-12)


@given(st.floats(0, 3), st.floats(0.1, 3), st.floats(0, 2), st.floats(0, 89.9), st.floats(0, 89.9))
def test_overhang_monotone_in_profile_angle(d, h, a, p1, p2):
    lo, hi = sorted((p1, p2))
    g = OverhangGeometry(d, h, a)
    assert shading_fraction_at_profile(g, lo) <= shading_fraction_at_profile(g, hi) + 1e-12


@given(st.floats(0.1, 3), st.floats(0, 2), st.floats(0.1, 90), st.floats(0, 359.9), st.floats(0, 359.9))
def test_no_depth_no_shade(h, a, alt, az, element):
    assert overhang_shading_fraction(OverhangGeometry(0.0, h, a), SunPosition(alt, az), element) == 0.0


def test_overhang_ratio():
    assert OverhangGeometry(0.6, 1.0, 0.1).ratio == pytest.approx(0.5)


def test_constant_day_helper_is_valid():
    assert len(constant_day()) == 24
    assert Zone("a", 1.0, 1.0).principal
