import pytest

from tropisim.weather import (EAST, NORTH, SOUTH_EAST, WIND_STUDY_DAYS, WeatherError, build_wind_study,
                              load_weather, typical_day_path, write_weather)

HEADER = "hour,dry_bulb_C,rh_pct,dni_wm2,dhi_wm2,wind_ms,wind_dir_deg\n"


def _write(tmp_path, rows, header=HEADER):
    p = tmp_path / "w.csv"
    p.write_text(header + "".join(rows))
    return p


def _row(h, rh=70):
    return f"{h},28,{rh},0,0,1,90\n"


def test_compass_constants():
    assert (NORTH, EAST, SOUTH_EAST) == (0.0, 90.0, 135.0)


def test_typical_day_loads():
    w = load_weather(typical_day_path())
    assert len(w) == 24 and w.days == 1
    peak = max(r.dry_bulb for r in w.records)
    assert 30.0 <= peak <= 32.0
    assert all(r.direct_normal == 0 for r in w.records if r.hour_index in (0, 1, 2, 3, 22, 23))


def test_round_trip(tmp_path):
    w = load_weather(typical_day_path())
    write_weather(w.records, tmp_path / "copy.csv")
    assert load_weather(tmp_path / "copy.csv").records == w.records


def test_rh_out_of_range_names_field_and_line(tmp_path):
    rows = [_row(h) for h in range(24)]
    rows[5] = _row(5, rh=130)
    with pytest.raises(WeatherError, match=r":7: relative_humidity"):
        load_weather(_write(tmp_path, rows))


def test_length_must_be_whole_days(tmp_path):
    with pytest.raises(WeatherError, match="length must be multiple of 24"):
        load_weather(_write(tmp_path, [_row(h) for h in range(23)]))


def test_parse_error_names_line(tmp_path):
    rows = [_row(h) for h in range(24)]
    rows[2] = "2,hot,70,0,0,1,90\n"
    with pytest.raises(WeatherError, match=r":4:"):
        load_weather(_write(tmp_path, rows))


def test_bad_header(tmp_path):
    with pytest.raises(WeatherError, match=":1: header"):
        load_weather(_write(tmp_path, [_row(h) for h in range(24)], header="a,b\n"))


def test_hours_must_run_in_order(tmp_path):
    rows = [_row(h) for h in range(24)]
    rows[3] = _row(7)
    with pytest.raises(WeatherError, match="hour must be 3"):
        load_weather(_write(tmp_path, rows))


def test_wind_study_days():
    base = load_weather(typical_day_path())
    study = build_wind_study(base.records)
    assert len(study) == 7 * 24
    for d, (speed, direction) in enumerate(WIND_STUDY_DAYS):
        day = study.day(d)
        assert {(r.wind_speed, r.wind_direction) for r in day} == {(speed, direction)}
        # only the wind differs from the base day
        assert [r.dry_bulb for r in day] == [r.dry_bulb for r in base.records]
    assert WIND_STUDY_DAYS[0][0] == 0.0
    assert {s for s, _ in WIND_STUDY_DAYS[1:]} == {1.0, 5.0}
    assert {d for _, d in WIND_STUDY_DAYS[1:]} == {NORTH, EAST, SOUTH_EAST}


def test_wind_study_needs_one_day():
    with pytest.raises(WeatherError):
        build_wind_study(load_weather(typical_day_path()).records[:23])
