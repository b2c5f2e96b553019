import pytest
from hypothesis import given, strategies as st

from tropisim.metrics import (DAY_HOURS, NIGHT_HOURS, WINDOW_SEMANTICS, mean_radiant, periodic_trapezoid_kwh,
                              resultant_temperature, summarize)

temps = st.floats(-20, 60)


def test_resultant_examples():
    assert resultant_temperature(25.0, 25.0) == 25.0
    assert resultant_temperature(26.0, 30.0) == pytest.approx(27.8, abs=1e-12)
    assert resultant_temperature(30.0, 26.0) == pytest.approx(28.2, abs=1e-12)


def test_mean_radiant_examples():
    assert mean_radiant([(1.0, 20.0), (1.0, 30.0)]) == pytest.approx(25.0)
    assert mean_radiant([(3.0, 27.0)]) == 27.0
    assert mean_radiant([(10.0, 30.0), (5.0, 24.0)]) == pytest.approx(28.0, abs=1e-12)


def test_mean_radiant_needs_a_surface():
    with pytest.raises(ValueError):
        mean_radiant([])


@given(temps, temps, st.floats(-10, 10))
def test_resultant_is_translation_equivariant(ta, tr, c):
    assert resultant_temperature(ta + c, tr + c) == pytest.approx(resultant_temperature(ta, tr) + c, abs=1e-9)


@given(temps, temps)
def test_resultant_lies_between_inputs(ta, tr):
    r = resultant_temperature(ta, tr)
    assert min(ta, tr) - 1e-9 <= r <= max(ta, tr) + 1e-9


@given(st.lists(st.tuples(st.floats(0.01, 100), temps), min_size=1, max_size=12))
def test_mean_radiant_is_convex(surfaces):
    t = mean_radiant(surfaces)
    ts = [x for _, x in surfaces]
    assert min(ts) - 1e-9 <= t <= max(ts) + 1e-9


def test_windows():
    assert DAY_HOURS == tuple(range(7, 19)) and len(DAY_HOURS) == 12
    assert sorted(NIGHT_HOURS) == [0, 1, 2, 3, 4, 5, 20, 21, 22, 23]
    assert "half-open" in WINDOW_SEMANTICS


def test_constant_series():
    s = summarize([25.0] * 24, [0.0] * 24, 11.0)
    assert s.day_resultant == s.night_resultant == s.max_resultant == 25.0
    assert s.daily_energy == 0.0 and s.seasonal_energy == 0.0


def test_constant_power_integrates_to_24_kwh():
    s = summarize([25.0] * 24, [1000.0] * 24, 11.0, season_days=181)
    assert s.daily_energy == pytest.approx(24.0)
    assert s.seasonal_energy == pytest.approx(24.0 * 181)


def test_power_per_square_metre():
    power = [0.0] * 24
    power[22] = 880.0
    assert summarize([25.0] * 24, power, 11.0).max_power_per_m2 == pytest.approx(80.0)


def test_trapezoid_of_single_pulse():
    power = [0.0] * 24
    power[3] = 1000.0
    assert periodic_trapezoid_kwh(power) == pytest.approx(1.0)


def test_day_and_night_use_their_windows():
    res = [20.0] * 24
    for h in DAY_HOURS:
        res[h] = 30.0
    s = summarize(res, [0.0] * 24, 10.0)
    assert (s.day_resultant, s.night_resultant, s.max_resultant) == (30.0, 20.0, 30.0)


@given(st.lists(temps, min_size=24, max_size=24), st.lists(st.floats(0, 5000), min_size=24, max_size=24))
def test_summary_invariants(res, power):
    s = summarize(res, power, 10.0)
    assert s.max_resultant >= s.day_resultant - 1e-9 and s.max_resultant >= s.night_resultant - 1e-9
    assert s.daily_energy >= 0 and s.seasonal_energy >= 0


@given(st.lists(temps, min_size=24, max_size=24), st.randoms())
def test_summary_only_sees_the_windows(res, rnd):
    # shuffling values within the day window (or within the night window) changes nothing
    shuffled = list(res)
    day = [shuffled[h] for h in DAY_HOURS]
    rnd.shuffle(day)
    for h, v in zip(DAY_HOURS, day):
        shuffled[h] = v
    a, b = summarize(res, [0.0] * 24, 1.0), summarize(shuffled, [0.0] * 24, 1.0)
    assert a.day_resultant == pytest.approx(b.day_resultant)
    assert a.night_resultant == b.night_resultant and a.max_resultant == b.max_resultant


def test_wrong_length():
    with pytest.raises(ValueError):
        summarize([25.0] * 23, [0.0] * 23, 10.0)
