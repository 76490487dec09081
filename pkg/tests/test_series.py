import math
from datetime import date, timedelta

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrdlab.series import (
    Frequency,
    IngestError,
    PriceSeries,
    ReturnSeries,
    downsample,
    load_prices,
    log_returns,
)


def write_csv(tmp_path, rows, header="date,close", name="prices.csv"):
    path = tmp_path / name
    lines = ([header] if header else []) + rows
    path.write_text("\n".join(lines) + "\n")
    return path


class TestLoadPrices:
    def test_two_row_file(self, tmp_path):
        p = load_prices(write_csv(tmp_path, ["2020-01-02,1.0", "2020-01-03,1.0"]))
        assert len(p) == 2
        assert p.frequency is Frequency.DAILY

    def test_non_positive_close(self, tmp_path):
        path = write_csv(tmp_path, ["2020-01-02,-3"])
        with pytest.raises(IngestError, match="non-positive price"):
            load_prices(path)

    def test_unparsable_row_reports_line(self, tmp_path):
        path = write_csv(tmp_path, ["2020-01-02,1.0", "not-a-date,2.0"])
        with pytest.raises(IngestError, match="line 3"):
            load_prices(path)

    def test_duplicate_date(self, tmp_path):
        path = write_csv(tmp_path, ["2020-01-02,1.0", "2020-01-02,2.0"])
        with pytest.raises(IngestError, match="duplicate date"):
            load_prices(path)

    def test_unsorted_rows_are_sorted(self, tmp_path):
        path = write_csv(tmp_path, ["2020-01-03,2.0", "2020-01-02,1.0"])
        p = load_prices(path)
        assert p.dates[0] == date(2020, 1, 2)
        assert p.closes[0] == 1.0

    def test_headerless_accepted_with_warning(self, tmp_path):
        path = write_csv(tmp_path, ["2020-01-02,1.0", "2020-01-03,2.0"], header=None)
        with pytest.warns(UserWarning, match="header"):
            p = load_prices(path)
        assert len(p) == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_prices(tmp_path / "nope.csv")


class TestPriceSeriesInvariants:
    def test_dates_strictly_increasing(self):
        with pytest.raises(IngestError, match="strictly increasing"):
            PriceSeries(dates=(date(2020, 1, 2), date(2020, 1, 2)), closes=[1.0, 2.0])

    def test_weekly_gap_validation(self):
        # 14-day interior gap between week-end observations is rejected
        with pytest.raises(IngestError, match="gap"):
            PriceSeries(
                dates=(date(2020, 1, 3), date(2020, 1, 17), date(2020, 1, 24)),
                closes=[1.0, 2.0, 3.0],
                frequency=Frequency.WEEKLY,
            )

    def test_weekly_short_final_gap_allowed(self):
        # sample can end on the Monday of a new ISO week
        p = PriceSeries(
            dates=(date(2024, 12, 20), date(2024, 12, 27), date(2024, 12, 30)),
            closes=[1.0, 2.0, 3.0],
            frequency=Frequency.WEEKLY,
        )
        assert len(p) == 3

    def test_monthly_distinct_months(self):
        with pytest.raises(IngestError, match="calendar month"):
            PriceSeries(
                dates=(date(2020, 1, 15), date(2020, 1, 31)),
                closes=[1.0, 2.0],
                frequency=Frequency.MONTHLY,
            )


def daily_series(start, closes):
    dates, d = [], start
    while len(dates) < len(closes):
        if d.weekday() < 5:
            dates.append(d)
        d += timedelta(days=1)
    return PriceSeries(dates=tuple(dates), closes=closes, label="test")


class TestDownsample:
    def test_single_week_takes_friday_close(self):
        # 2023-01-02 is a Monday; five weekdays in one ISO week
        p = daily_series(date(2023, 1, 2), [1.0, 2.0, 3.0, 4.0, 5.0])
        w = downsample(p, Frequency.WEEKLY)
        assert len(w) == 1
        assert w.closes[0] == 5.0
        assert w.dates[0] == date(2023, 1, 6)

    def test_monthly_takes_last_trading_day(self):
        p = daily_series(date(2023, 1, 25), [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0])
        m = downsample(p, Frequency.MONTHLY)
        assert len(m) == 2
        assert m.dates[0] == date(2023, 1, 31)
        assert m.closes[0] == 5.0

    def test_identity_request_rejected(self):
        p = daily_series(date(2023, 1, 2), [1.0, 2.0, 3.0, 4.0, 5.0])
        with pytest.raises(ValueError, match="identity"):
            downsample(p, Frequency.DAILY)

    def test_double_downsample_rejected(self):
        p = daily_series(date(2023, 1, 2), [1.0] * 10)
        w = downsample(p, Frequency.WEEKLY)
        with pytest.raises(ValueError, match="daily"):
            downsample(w, Frequency.MONTHLY)

    def test_never_invents_dates(self):
        p = daily_series(date(2023, 1, 2), list(np.arange(1.0, 24.0)))
        for target in (Frequency.WEEKLY, Frequency.MONTHLY):
            out = downsample(p, target)
            assert set(out.dates) <= set(p.dates)


class TestLogReturns:
    def test_analytic_logs(self):
        p = daily_series(date(2023, 1, 2), [1.0, math.e, math.e**2])
        r = log_returns(p)
        np.testing.assert_allclose(r.values, [1.0, 1.0], rtol=1e-14)

    def test_constant_series_zero_returns(self):
        p = daily_series(date(2023, 1, 2), [5.0, 5.0, 5.0])
        r = log_returns(p)
        np.testing.assert_array_equal(r.values, [0.0, 0.0])

    def test_length_and_frequency(self):
        p = daily_series(date(2023, 1, 2), [1.0, 2.0, 3.0, 4.0])
        r = log_returns(p)
        assert len(r) == len(p) - 1
        assert r.frequency is p.frequency
        assert r.source_label == p.label

    def test_too_short(self):
        p = daily_series(date(2023, 1, 2), [1.0])
        with pytest.raises(ValueError, match="at least 2"):
            log_returns(p)

    @given(st.lists(st.floats(min_value=0.01, max_value=1e4), min_size=2, max_size=60))
    @settings(max_examples=50, deadline=None)
    def test_telescoping_sum(self, closes):
        p = daily_series(date(2023, 1, 2), closes)
        total = log_returns(p).values.sum()
        expected = math.log(closes[-1] / closes[0])
        assert abs(total - expected) <= 1e-10 * max(1.0, abs(expected))

    def test_pipeline_deterministic(self, tmp_path):
        rows = [f"2023-01-{2+i:02d},{1.0+i}" for i in range(5)]
        path = write_csv(tmp_path, rows)
        a = log_returns(load_prices(path)).values
        b = log_returns(load_prices(path)).values
        np.testing.assert_array_equal(a, b)
