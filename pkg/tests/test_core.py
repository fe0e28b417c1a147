import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gazekit.core import (
    CalibrationDisturbance,
    GazeSample,
    GazeStream,
    NonMonotonicTimestamp,
    OverlappingFixations,
    Fixation,
    apply_disturbance,
    build_scanpath,
    detect_fixations,
    ingest_sample,
)
from gazekit.rng import SplitMix64

from oracles import oracle_fixations


class TestIngest:
    def test_first_sample_accepted(self):
        stream = GazeStream()
        ingest_sample(stream, GazeSample(0, 100, 100))
        assert len(stream) == 1

    def test_equal_timestamp_rejected(self):
        stream = GazeStream()
        ingest_sample(stream, GazeSample(10, 1, 1))
        with pytest.raises(NonMonotonicTimestamp):
            ingest_sample(stream, GazeSample(10, 2, 2))
        assert len(stream) == 1  # state unchanged

    def test_advancing_timestamp_appends(self):
        stream = GazeStream()
        ingest_sample(stream, GazeSample(10, 1, 1))
        ingest_sample(stream, GazeSample(20, 2, 2))
        assert len(stream) == 2
        assert stream.last.t_ms == 20


class TestDetectFixations:
    def test_empty(self):
        assert detect_fixations([], 40, 100) == []

    def test_zero_dispersion_cluster(self):
        samples = [GazeSample(i * 10, 100.0, 100.0) for i in range(20)]
        fixes = detect_fixations(samples, 40, 100)
        assert len(fixes) == 1
        f = fixes[0]
        assert (f.cx, f.cy) == (100.0, 100.0)
        assert f.duration_ms == 190
        assert f.sample_count == 20

    def test_two_clusters(self):
        # 8 samples near (100,100) then 6 near (300,300); jitter inside +-5 px
        rng = SplitMix64(77)
        samples = []
        t = 0
        for _ in range(8):
            samples.append(GazeSample(t, 100 + rng.uniform_in(-5, 5), 100 + rng.uniform_in(-5, 5)))
            t += 10
        for _ in range(6):
            samples.append(GazeSample(t, 300 + rng.uniform_in(-5, 5), 300 + rng.uniform_in(-5, 5)))
            t += 10
        fixes = detect_fixations(samples, 40, 50)
        assert fixes == oracle_fixations(samples, 40, 50)
        assert len(fixes) == 2
        assert math.hypot(fixes[0].cx - 100, fixes[0].cy - 100) < 5
        assert math.hypot(fixes[1].cx - 300, fixes[1].cy - 300) < 5

    def test_invalid_samples_break_windows(self):
        samples = [GazeSample(i * 10, 50.0, 50.0) for i in range(10)]
        samples[5] = GazeSample(50, 50.0, 50.0, valid=False)
        fixes = detect_fixations(samples, 40, 30)
        assert fixes == oracle_fixations(samples, 40, 30)
        # the dropout splits one dwell into two: t=0..40 and t=60..90
        assert [(f.start_ms, f.end_ms) for f in fixes] == [(0, 40), (60, 90)]

    def test_deterministic(self):
        samples = _random_stream(123)
        assert detect_fixations(samples, 40, 100) == detect_fixations(samples, 40, 100)

    def test_no_sample_in_two_fixations_and_thresholds_hold(self):
        samples = _random_stream(5)
        fixes = detect_fixations(samples, 40, 100)
        last_end = -1
        for f in fixes:
            assert f.start_ms > last_end
            assert f.end_ms - f.start_ms >= 100
            window = [s for s in samples if f.start_ms <= s.t_ms <= f.end_ms and s.valid]
            xs = [s.x for s in window]
            ys = [s.y for s in window]
            assert (max(xs) - min(xs)) + (max(ys) - min(ys)) <= 40
            last_end = f.end_ms


def _random_stream(seed: int, max_len: int = 200) -> list[GazeSample]:
    """Dwell/saccade mixture with occasional tracking loss."""
    rng = SplitMix64(seed)
    n = 20 + rng.randint(max_len - 19)
    samples = []
    t = rng.randint(50)
    x = 200.0 + rng.uniform() * 1500.0
    y = 150.0 + rng.uniform() * 750.0
    while len(samples) < n:
        dwell = 2 + rng.randint(24)
        radius = rng.uniform_in(1.0, 35.0)
        for _ in range(dwell):
            if len(samples) >= n:
                break
            valid = rng.uniform() > 0.04
            samples.append(
                GazeSample(
                    t,
                    x + rng.uniform_in(-radius, radius),
                    y + rng.uniform_in(-radius, radius),
                    valid=valid,
                )
            )
            t += 5 + rng.randint(21)
        x = 200.0 + rng.uniform() * 1500.0
        y = 150.0 + rng.uniform() * 750.0
    return samples


@given(st.integers(min_value=0, max_value=2**32))
@settings(max_examples=60, deadline=None)
def test_fixations_match_oracle_on_random_streams(seed):
    samples = _random_stream(seed)
    rng = SplitMix64(seed ^ 0xD15)
    dispersion = rng.uniform_in(15.0, 80.0)
    min_dur = 60 + rng.randint(140)
    assert detect_fixations(samples, dispersion, min_dur) == oracle_fixations(
        samples, dispersion, min_dur
    )


class TestScanPath:
    def test_empty(self):
        sp = build_scanpath([])
        assert sp.fixations == ()
        assert sp.total_saccade_length == 0.0

    def test_single_fixation(self):
        sp = build_scanpath([Fixation(50, 50, 0, 100, 5)])
        assert sp.total_saccade_length == 0.0

    def test_three_four_five(self):
        fixes = [Fixation(0, 0, 0, 100, 5), Fixation(3, 4, 150, 250, 5)]
        assert build_scanpath(fixes).total_saccade_length == 5.0

    def test_overlap_rejected(self):
        fixes = [Fixation(0, 0, 0, 100, 5), Fixation(3, 4, 90, 250, 5)]
        with pytest.raises(OverlappingFixations):
            build_scanpath(fixes)

    def test_touching_boundary_allowed(self):
        fixes = [Fixation(0, 0, 0, 100, 5), Fixation(3, 4, 100, 250, 5)]
        assert build_scanpath(fixes).total_saccade_length == 5.0

    def test_length_recomputable(self):
        fixes = [Fixation(i * 10.0, i * 5.0, i * 200, i * 200 + 100, 3) for i in range(6)]
        sp = build_scanpath(fixes)
        expect = sum(
            math.hypot(b.cx - a.cx, b.cy - a.cy) for a, b in zip(fixes, fixes[1:])
        )
        assert sp.total_saccade_length == pytest.approx(expect, abs=1e-12)


class TestDisturbance:
    def test_identity_is_exact(self):
        samples = _random_stream(9)
        out = apply_disturbance(samples, CalibrationDisturbance())
        assert out == samples

    def test_offset_arithmetic(self):
        out = apply_disturbance([GazeSample(0, 100, 100)], CalibrationDisturbance(dx=10, dy=-5))
        assert (out[0].x, out[0].y) == (110.0, 95.0)

    def test_offset_roundtrip(self):
        samples = [GazeSample(i, 100.0 + i, 200.0 + 2 * i) for i in range(50)]
        there = apply_disturbance(samples, CalibrationDisturbance(dx=13, dy=-7))
        back = apply_disturbance(there, CalibrationDisturbance(dx=-13, dy=7))
        assert back == samples

    def test_scale_about_center(self):
        out = apply_disturbance(
            [GazeSample(0, 960, 540), GazeSample(1, 1060, 540)],
            CalibrationDisturbance(scale=1.1),
        )
        assert (out[0].x, out[0].y) == (960.0, 540.0)  # center is a fixed point
        assert out[1].x == pytest.approx(960 + 100 * 1.1)

    def test_invalid_samples_untouched(self):
        s = GazeSample(0, 5, 5, valid=False)
        out = apply_disturbance([s], CalibrationDisturbance(dx=100))
        assert out[0] == s

    def test_scale_must_be_positive(self):
        with pytest.raises(ValueError):
            CalibrationDisturbance(scale=0)

    @given(st.integers(min_value=0, max_value=2**32))
    @settings(max_examples=30, deadline=None)
    def test_offset_preserves_pairwise_distances(self, seed):
        rng = SplitMix64(seed)
        samples = [
            GazeSample(i, rng.uniform() * 1920, rng.uniform() * 1080) for i in range(12)
        ]
        out = apply_disturbance(samples, CalibrationDisturbance(dx=rng.uniform_in(-50, 50),
                                                                dy=rng.uniform_in(-50, 50)))
        for i in range(len(samples)):
            for j in range(i + 1, len(samples)):
                d0 = math.hypot(samples[i].x - samples[j].x, samples[i].y - samples[j].y)
                d1 = math.hypot(out[i].x - out[j].x, out[i].y - out[j].y)
                assert d1 == pytest.approx(d0, rel=1e-9, abs=1e-9)
