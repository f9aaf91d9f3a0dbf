from datetime import timedelta

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wsvol.timeseries import (
    CSV_HEADER,
    ChannelSpec,
    Dataset,
    GridError,
    ParseError,
    SyntheticSpec,
    ValidationError,
    dataset_to_csv,
    export_dataset,
    parse_dataset,
    parse_dataset_text,
    synthesize,
    total_volatile,
)

from conftest import T0, series

FOUR_ROWS = CSV_HEADER + """
2019-01-01T00:00:00Z,50000.5,0,12000,3000
2019-01-01T00:15:00Z,50100,0,12100.25,2950
2019-01-01T00:30:00Z,50200,0,11900,2900
2019-01-01T00:45:00Z,50300,0,11800,2800
"""


def make_dataset(load, solar, on, off, step=15):
    return Dataset(
        series(load, step, "load"),
        series(solar, step, "solar"),
        series(on, step, "wind_onshore"),
        series(off, step, "wind_offshore"),
    )


def test_parse_four_rows(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text(FOUR_ROWS)
    d = parse_dataset(p)
    assert len(d) == 4
    assert d.step_minutes == 15
    assert d.load.values[0] == 50000.5
    assert d.wind_onshore.values[1] == 12100.25
    assert d.metadata["rows"] == 4


def test_missing_slot_names_gap():
    lines = FOUR_ROWS.strip().split("\n")
    del lines[2]
    with pytest.raises(GridError, match="2019-01-01T00:15:00Z"):
        parse_dataset_text("\n".join(lines))


def test_strict_fifteen_minutes_by_default():
    hourly = FOUR_ROWS.replace("00:15", "01:00").replace("00:30", "02:00").replace("00:45", "03:00")
    with pytest.raises(GridError):
        parse_dataset_text(hourly)
    assert parse_dataset_text(hourly, step_minutes=None).step_minutes == 60
    assert parse_dataset_text(hourly, step_minutes=60).step_minutes == 60


def test_first_slot_gap_detected_when_inferring():
    lines = FOUR_ROWS.strip().split("\n")
    del lines[2]
    with pytest.raises(GridError, match="00:15:00Z"):
        parse_dataset_text("\n".join(lines), step_minutes=None)


def test_non_uniform_spacing():
    text = FOUR_ROWS.replace("00:45:00Z", "00:50:00Z")
    with pytest.raises(GridError, match="non-uniform"):
        parse_dataset_text(text)


def test_malformed_row_reports_line():
    text = FOUR_ROWS.replace("50200,0,11900,2900", "50200,zero,11900,2900")
    with pytest.raises(ParseError) as err:
        parse_dataset_text(text)
    assert err.value.line == 4


def test_wrong_field_count():
    text = FOUR_ROWS.replace("50200,0,11900,2900", "50200,0,11900")
    with pytest.raises(ParseError, match="line 4"):
        parse_dataset_text(text)


def test_negative_generation_lists_rows():
    text = FOUR_ROWS.replace("50100,0,12100.25", "50100,-1,12100.25").replace(
        "50300,0,11800", "50300,0,-11800"
    )
    with pytest.raises(ValidationError, match=r"\[2, 4\]"):
        parse_dataset_text(text)


def test_bad_header():
    with pytest.raises(ParseError, match="header"):
        parse_dataset_text(FOUR_ROWS.replace("load_mw", "load"))


def test_empty_file():
    with pytest.raises(ParseError):
        parse_dataset_text("")
    with pytest.raises(ValidationError):
        parse_dataset_text(CSV_HEADER + "\n")


def test_naive_timestamp_rejected():
    with pytest.raises(ParseError, match="UTC"):
        parse_dataset_text(FOUR_ROWS.replace("2019-01-01T00:00:00Z", "2019-01-01T00:00:00"))


def test_offset_timestamps_normalised_to_utc():
    text = FOUR_ROWS.replace("2019-01-01T00:00:00Z", "2019-01-01T01:00:00+01:00")
    assert parse_dataset_text(text).load.start_time == T0


def test_full_year_row_count(tmp_path):
    n = 365 * 24 * 4
    assert n == 35040
    d = synthesize(SyntheticSpec(n, load=ChannelSpec("constant", 1.0)))
    export_dataset(d, tmp_path / "y.csv")
    back = parse_dataset(tmp_path / "y.csv")
    assert len(back) == 35040
    assert back.load.timestamps()[-1] == T0 + timedelta(days=365) - timedelta(minutes=15)


def test_leap_year_length_not_hardcoded():
    d = synthesize(SyntheticSpec(366 * 96, load=ChannelSpec("constant", 1.0), start_time="2020-01-01T00:00:00Z"))
    assert len(parse_dataset_text(dataset_to_csv(d))) == 35136


def test_total_volatile_constant_channels():
    d = make_dataset([5] * 3, [1] * 3, [2] * 3, [3] * 3)
    v = total_volatile(d)
    assert v.channel == "derived"
    np.testing.assert_array_equal(v.values, [6, 6, 6])


def test_total_volatile_zero():
    d = make_dataset([5] * 3, [0] * 3, [0] * 3, [0] * 3)
    assert not total_volatile(d).values.any()


def test_total_volatile_mean_is_sum_of_means():
    spec = SyntheticSpec(
        960,
        load=ChannelSpec("constant", 50.0),
        solar=ChannelSpec("sinusoid", 4.0, 4.0, 96),
        wind_onshore=ChannelSpec("noise", 10.0, 3.0),
        wind_offshore=ChannelSpec("square", 2.0, 1.0, 48),
        seed=7,
    )
    d = synthesize(spec)
    means = d.channel_means()
    expected = means["solar"] + means["wind_onshore"] + means["wind_offshore"]
    assert total_volatile(d).mean() == pytest.approx(expected, rel=1e-12)


def test_series_invariants():
    with pytest.raises(ValidationError):
        series([1.0])
    with pytest.raises(ValidationError):
        series([1.0, np.nan])
    with pytest.raises(ValidationError):
        series([1.0, -1.0], channel="solar")
    series([1.0, -1.0], channel="derived")
    with pytest.raises(ValidationError):
        series([1.0, 2.0], step=0)


def test_dataset_grid_mismatch():
    with pytest.raises(GridError):
        Dataset(series([1, 1], 15, "load"), series([1, 1], 60, "solar"),
                series([1, 1], 15, "wind_onshore"), series([1, 1], 15, "wind_offshore"))


def test_series_is_read_only():
    s = series([1.0, 2.0])
    with pytest.raises(ValueError):
        s.values[0] = 3.0


def test_synth_constant():
    d = synthesize(SyntheticSpec(8, load=ChannelSpec("constant", 10.0)))
    np.testing.assert_array_equal(d.load.values, [10.0] * 8)


def test_synth_sinusoid_trough_is_zero():
    # phase chosen so that sample 0 sits at the trough
    d = synthesize(SyntheticSpec(4, solar=ChannelSpec("sinusoid", 10.0, 10.0, 4, 1.5 * np.pi)))
    assert d.solar.values[0] == 0.0
    assert d.solar.values.min() >= 0.0


def test_synth_amplitude_exceeding_offset():
    with pytest.raises(ValidationError):
        ChannelSpec("sinusoid", 5.0, 6.0)
    with pytest.raises(ValidationError):
        ChannelSpec("noise", 1.0, 1.5)


def test_synth_seeded_noise_bit_identical():
    spec = SyntheticSpec(200, wind_onshore=ChannelSpec("noise", 10.0, 9.0), seed=42)
    assert dataset_to_csv(synthesize(spec)) == dataset_to_csv(synthesize(spec))
    other = SyntheticSpec(200, wind_onshore=ChannelSpec("noise", 10.0, 9.0), seed=43)
    assert dataset_to_csv(synthesize(spec)) != dataset_to_csv(synthesize(other))


def test_comment_lines_skipped(tmp_path):
    d = parse_dataset_text(FOUR_ROWS)
    export_dataset(d, tmp_path / "c.csv", comments=["wsvol test", "config: none"])
    assert parse_dataset(tmp_path / "c.csv") == d


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_round_trip_is_lossless(data):
    n = data.draw(st.integers(2, 40))
    vals = [data.draw(st.lists(st.floats(0, 1e6), min_size=n, max_size=n)) for _ in range(4)]
    step = data.draw(st.sampled_from([1, 15, 60]))
    d = make_dataset(*vals, step=step)
    assert parse_dataset_text(dataset_to_csv(d), step_minutes=None) == d


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_total_volatile_linear(data):
    n = data.draw(st.integers(2, 30))
    draw = lambda: data.draw(st.lists(st.floats(0, 1e4), min_size=n, max_size=n))
    a = make_dataset(draw(), draw(), draw(), draw())
    b = make_dataset(draw(), draw(), draw(), draw())
    summed = make_dataset(*(getattr(a, c).values + getattr(b, c).values
                            for c in ("load", "solar", "wind_onshore", "wind_offshore")))
    np.testing.assert_allclose(
        total_volatile(summed).values,
        total_volatile(a).values + total_volatile(b).values,
        rtol=1e-12, atol=1e-9,
    )


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["constant", "sinusoid", "square", "noise"]))
def test_synthesize_pure(seed, kind):
    spec = SyntheticSpec(50, wind_onshore=ChannelSpec(kind, 5.0, 2.0, 12.0), seed=seed)
    assert synthesize(spec) == synthesize(spec)
