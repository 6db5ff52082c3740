import csv
import json
import math

import numpy as np
import pytest

from hdcnav.io import SyntheticProfile, generate
from hdcnav.tracker import (TimingStats, TrajectoryRecord, baseline_integrate,
                            benchmark, track, wrapped_error)


@pytest.mark.parametrize("a,b,expected", [
    (0.0, 0.0, 0.0),
    (math.radians(10), 0.0, 10.0),
    (0.0, math.radians(10), -10.0),
    (math.radians(350), math.radians(10), -20.0),
    (math.radians(10), math.radians(350), 20.0),
    (math.pi, 0.0, 180.0),       # tie maps to +180, not -180
    (0.0, math.pi, 180.0),
    (5 * math.pi, 0.0, 180.0),   # multiple wraps
])
def test_wrapped_error_cases(a, b, expected):
    assert wrapped_error(a, b) == pytest.approx(expected, abs=1e-9)


def test_wrapped_error_rejects_non_finite():
    with pytest.raises(ValueError):
        wrapped_error(float("nan"), 0.0)


def test_record_validation():
    with pytest.raises(ValueError):
        TrajectoryRecord(t=0.0, omega=float("inf"))
    with pytest.raises(ValueError):
        TrajectoryRecord(t=0.0, omega=0.0, truth_heading=float("nan"))


def test_baseline_matches_manual_trapezoid():
    ts = np.array([0.0, 0.1, 0.25, 0.5])
    omegas = np.array([0.0, 0.2, -0.1, 0.4])
    records = [TrajectoryRecord(t=float(t), omega=float(w))
               for t, w in zip(ts, omegas)]
    headings = baseline_integrate(records, initial_heading=1.0)
    expected = 1.0 + np.concatenate(
        [[0.0], np.cumsum(np.diff(ts) * (omegas[1:] + omegas[:-1]) / 2.0)])
    np.testing.assert_allclose(headings, expected % (2 * np.pi), atol=1e-12)


def test_baseline_exact_on_clean_constant_profile():
    records = generate(SyntheticProfile("constant_rotation",
                                        math.radians(20), 18.0))
    headings = baseline_integrate(records)
    truth = np.array([r.truth_heading for r in records])
    err = np.abs(np.remainder(headings - truth + np.pi, 2 * np.pi) - np.pi)
    assert err.max() < 1e-9


def test_baseline_rejects_non_monotonic():
    records = [TrajectoryRecord(t=0.0, omega=0.0),
               TrajectoryRecord(t=0.0, omega=0.0)]
    with pytest.raises(ValueError):
        baseline_integrate(records)


def test_track_zero_omega_holds_heading(kernel, gain):
    records = [TrajectoryRecord(t=0.01 * i, omega=0.0,
                                truth_heading=math.pi / 2)
               for i in range(601)]  # 6 s at 100 Hz
    report = track(records, kernel, gain, initial_heading=math.pi / 2)
    assert report.max_error_deg < 1.0


def test_track_flags_out_of_range_velocity(kernel, gain):
    fast = gain.max_velocity * 1.5
    records = [TrajectoryRecord(t=0.0, omega=0.0),
               TrajectoryRecord(t=0.01, omega=fast),
               TrajectoryRecord(t=0.02, omega=0.1)]
    report = track(records, kernel, gain)
    flags = [s.omega_out_of_range for s in report.per_sample]
    assert flags == [False, True, False]


def test_track_without_truth_leaves_errors_unset(kernel, gain):
    records = [TrajectoryRecord(t=0.01 * i, omega=0.1) for i in range(20)]
    report = track(records, kernel, gain)
    assert report.mean_error_deg is None
    assert all(s.error_deg is None for s in report.per_sample)
    assert all(np.isfinite(s.decoded_heading) for s in report.per_sample)


def test_report_outputs(tmp_path, kernel, gain):
    records = generate(SyntheticProfile("constant_rotation",
                                        math.radians(20), 2.0))
    report = track(records, kernel, gain)
    jpath, cpath = tmp_path / "report.json", tmp_path / "samples.csv"
    report.to_json(jpath)
    report.to_csv(cpath)
    doc = json.loads(jpath.read_text())
    assert doc["samples"] == len(records)
    assert doc["timing"]["frame_count"] == len(records) - 1
    assert doc["mean_error_deg"] == pytest.approx(report.mean_error_deg)
    with open(cpath) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "omega", "decoded", "baseline", "truth",
                       "err_hdc", "err_baseline"]
    assert len(rows) == len(records) + 1


def test_timing_stats_accounting():
    stats = TimingStats.from_samples([0.001, 0.002, 0.015, 0.002])
    assert stats.mean_ms == pytest.approx(5.0)
    assert stats.median_ms == pytest.approx(2.0)
    assert stats.max_ms == pytest.approx(15.0)
    assert stats.pct_over_10ms == pytest.approx(25.0)
    assert stats.frame_count == 4


def test_benchmark_aggregates_repetitions(kernel, gain):
    records = generate(SyntheticProfile("constant_rotation",
                                        math.radians(20), 1.0))
    stats = benchmark(records, kernel, gain, repetitions=2)
    assert stats.frame_count == 2 * (len(records) - 1)
    with pytest.raises(ValueError):
        benchmark(records, kernel, gain, repetitions=0)
