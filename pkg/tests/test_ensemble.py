import json
from datetime import date, timedelta

import numpy as np
import pytest

from lrdlab.ensemble import (
    EnsembleFormatError,
    PathEnsemble,
    canonical_json,
    evaluate,
    load_ensemble,
    save_ensemble,
    select_nearest,
)
from lrdlab.series import Frequency, PriceSeries


def price_series(closes, start=date(2020, 1, 1), label="emp"):
    dates, d = [], start
    while len(dates) < len(closes):
        if d.weekday() < 5:
            dates.append(d)
        d += timedelta(days=1)
    return PriceSeries(dates=tuple(dates), closes=closes, label=label)


def random_walk_paths(n_paths, length, seed=0, scale=0.01):
    rng = np.random.default_rng(seed)
    steps = rng.normal(0, scale, size=(n_paths, length))
    steps[:, 0] = 0.0
    return np.cumsum(steps, axis=1)


class TestFormats:
    def test_csv_round_trip(self, tmp_path):
        ens = PathEnsemble(paths=random_walk_paths(5, 32),
                           frequency=Frequency.WEEKLY, generator_label="toy")
        path = save_ensemble(ens, tmp_path / "e.csv")
        back = load_ensemble(path)
        np.testing.assert_array_equal(back.paths, ens.paths)
        assert back.generator_label == "toy"
        assert back.frequency is Frequency.WEEKLY

    def test_binary_round_trip(self, tmp_path):
        ens = PathEnsemble(paths=random_walk_paths(7, 64, seed=1))
        path = save_ensemble(ens, tmp_path / "e.bin")
        back = load_ensemble(path)
        np.testing.assert_array_equal(back.paths, ens.paths)

    def test_ragged_csv_rejected(self, tmp_path):
        f = tmp_path / "r.csv"
        f.write_text("0,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15\n0,1,2\n")
        with pytest.raises(EnsembleFormatError, match="line 2"):
            load_ensemble(f)

    def test_nan_rejected_with_coordinates(self, tmp_path):
        row = ",".join(["0.0"] * 16)
        bad = ",".join(["0.0"] * 5 + ["NaN"] + ["0.0"] * 10)
        f = tmp_path / "n.csv"
        f.write_text(row + "\n" + bad + "\n")
        with pytest.raises(EnsembleFormatError, match="line 2.*column 5"):
            load_ensemble(f)

    def test_bad_magic(self, tmp_path):
        f = tmp_path / "b.bin"
        f.write_bytes(b"XXXX" + b"\x00" * 32)
        with pytest.raises(EnsembleFormatError, match="magic"):
            load_ensemble(f)

    def test_minimum_length_enforced(self):
        with pytest.raises(EnsembleFormatError, match="at least 16"):
            PathEnsemble(paths=np.zeros((1, 8)))

    def test_singleton_minimal(self):
        ens = PathEnsemble(paths=np.arange(16.0).reshape(1, 16))
        assert ens.n_paths == 1 and ens.length == 16


class TestSelectNearest:
    def test_self_match(self):
        closes = 100.0 * np.exp(np.cumsum(np.r_[0.0, np.random.default_rng(2).normal(0, 0.01, 31)]))
        emp = price_series(closes)
        paths = random_walk_paths(4, 32, seed=3)
        paths[2] = np.log(closes)  # anchored copy of the empirical series
        idx, dist = select_nearest(PathEnsemble(paths=paths), emp)
        assert idx == 2
        assert dist == pytest.approx(0.0, abs=1e-9)

    def test_hand_computed_argmin(self):
        emp = price_series(np.full(16, 100.0))
        base = np.zeros(16)
        offsets = [0.3, 0.1, 0.2]  # constant log-offsets after anchoring: all zero
        # instead vary the shape: path i deviates on the last half
        paths = np.stack([base.copy() for _ in offsets])
        for i, off in enumerate(offsets):
            paths[i, 8:] = off
        dists = [np.sqrt(np.sum((100.0 - 100.0 * np.exp(p - p[0])) ** 2)) for p in paths]
        idx, dist = select_nearest(PathEnsemble(paths=paths), emp)
        assert idx == int(np.argmin(dists))
        assert dist == pytest.approx(min(dists), rel=1e-12)

    def test_tie_breaks_to_lower_index(self):
        emp = price_series(np.full(16, 50.0))
        winner = np.zeros(16)
        loser = np.zeros(16)
        loser[8:] = 0.5
        paths = np.stack([loser, winner, winner])
        idx, _ = select_nearest(PathEnsemble(paths=paths), emp)
        assert idx == 1

    def test_length_mismatch(self):
        emp = price_series(np.full(20, 50.0))
        with pytest.raises(ValueError, match="length"):
            select_nearest(PathEnsemble(paths=np.zeros((2, 16))), emp)

    def test_matches_brute_force_scan(self):
        rng = np.random.default_rng(7)
        for trial in range(20):
            n_paths = int(rng.integers(1, 400))
            length = int(rng.integers(16, 64))
            closes = 100.0 * np.exp(np.cumsum(rng.normal(0, 0.02, length)))
            emp = price_series(closes)
            paths = rng.normal(0, 0.5, size=(n_paths, length)).cumsum(axis=1)
            ens = PathEnsemble(paths=paths)
            idx, dist = select_nearest(ens, emp)
            fake = closes[0] * np.exp(paths - paths[:, :1])
            d_all = np.sqrt(((closes[None, :] - fake) ** 2).sum(axis=1))
            assert idx == int(np.argmin(d_all))
            assert dist == pytest.approx(float(d_all.min()), rel=1e-12)
            assert idx < ens.n_paths


class TestEvaluate:
    @pytest.fixture(scope="class")
    def small_eval(self):
        rng = np.random.default_rng(11)
        length = 300
        returns = rng.standard_t(5, size=(6, length - 1)) * 0.01
        paths = np.concatenate([np.zeros((6, 1)), np.cumsum(returns, axis=1)], axis=1)
        emp_closes = 100.0 * np.exp(np.r_[0.0, np.cumsum(rng.standard_t(5, length - 1) * 0.01)])
        emp = price_series(emp_closes)
        ens = PathEnsemble(paths=paths)
        return evaluate(ens, emp, truncation=100, aggregate_subsample=6), ens, emp

    def test_sections_present(self, small_eval):
        report, ens, emp = small_eval
        assert report.errors == {}
        assert report.selected_index < ens.n_paths
        for section in (report.rs, report.dfa, report.arfima_figarch,
                        report.distribution):
            assert section is not None

    def test_tail_masses_reference_real_percentiles(self, small_eval):
        report, _, _ = small_eval
        tm = report.distribution["tail_mass"]
        assert tm["real_lower"] == pytest.approx(0.01, abs=0.005)
        assert tm["real_upper"] == pytest.approx(0.01, abs=0.005)

    def test_json_round_trip_byte_identical(self, small_eval):
        report, _, _ = small_eval
        s = report.to_json()
        assert canonical_json(json.loads(s)) == s

    def test_empirical_as_ensemble_reproduces_direct_battery(self):
        from lrdlab.dfa import dfa_analysis
        from lrdlab.rescaled_range import rs_analysis

        rng = np.random.default_rng(13)
        length = 260
        r = rng.standard_t(6, length - 1) * 0.012
        closes = 120.0 * np.exp(np.r_[0.0, np.cumsum(r)])
        emp = price_series(closes)
        paths = np.tile(np.log(closes), (3, 1))
        report = evaluate(PathEnsemble(paths=paths), emp, truncation=80,
                          aggregate_subsample=3)
        assert report.selected_index == 0
        assert report.euclidean_distance == pytest.approx(0.0, abs=1e-9)
        returns = np.diff(np.log(closes))
        est_rs, _ = rs_analysis(returns)
        est_dfa, _ = dfa_analysis(returns)
        assert report.rs["estimate"]["h"] == pytest.approx(est_rs.h, rel=1e-12)
        assert report.dfa["estimate"]["h"] == pytest.approx(est_dfa.h, rel=1e-12)

    def test_error_sections_recorded_not_fatal(self):
        # 17 points: enough for R/S and DFA, far too short for the MLE fit
        rng = np.random.default_rng(17)
        paths = np.cumsum(rng.normal(0, 0.01, size=(2, 17)), axis=1)
        emp = price_series(100.0 * np.exp(paths[0] - paths[0, 0]))
        report = evaluate(PathEnsemble(paths=paths), emp, truncation=50)
        assert "arfima_figarch" in report.errors
        assert report.rs is not None
        assert "distribution" in report.errors  # n < 20 for the moment tests
