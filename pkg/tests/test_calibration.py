"""Calibration session: CV, confidence, sampling, regression, prediction."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from autotier.calibration import (
    SampleSet,
    collect_samples,
    compute_confidence,
    compute_cv,
    estimate_avg_lat,
    regress_latency_curve,
)
from autotier.model import CalibrationRecord, DEFAULT_INJECTED_LATENCIES_US

PLAN = DEFAULT_INJECTED_LATENCIES_US


def linear_probe(m, b, noise_cv=0.0, rng=None):
    def probe(d):
        value = m * d + b
        if noise_cv:
            value *= 1.0 + noise_cv * rng.standard_normal()
        return value
    return probe


class TestComputeCv:
    def test_constant_samples_have_zero_cv(self):
        assert compute_cv([100.0, 100.0, 100.0]) == 0.0

    def test_hand_computed_population_sigma(self):
        # sigma = 10, mean = 100
        assert compute_cv([90.0, 110.0]) == pytest.approx(0.1, rel=1e-12)

    def test_empty_input_errors(self):
        with pytest.raises(ValueError):
            compute_cv([])

    def test_zero_mean_errors(self):
        with pytest.raises(ValueError):
            compute_cv([0.0, 0.0])


class TestComputeConfidence:
    def test_high_cv_floors(self):
        assert compute_confidence(1.2) == 0.05

    def test_cv_maps_linearly(self):
        assert compute_confidence(0.3) == pytest.approx(0.7, rel=1e-12)

    def test_perfect_samples(self):
        assert compute_confidence(0.0) == 1.0

    @given(st.floats(min_value=0.0, max_value=10.0, allow_nan=False))
    def test_confidence_stays_in_floor_one(self, cv):
        conf = compute_confidence(cv)
        assert 0.05 <= conf <= 1.0


class TestCollectSamples:
    def test_noiseless_linear_truth(self):
        samples = collect_samples("v", linear_probe(1.0, 200.0), [0.0, 1000.0], 3)
        assert samples.per_latency[1000.0] == [1200.0, 1200.0, 1200.0]

    def test_plan_cardinality(self):
        samples = collect_samples("v", linear_probe(1.0, 100.0), PLAN, 10)
        assert len(samples.per_latency) == 5
        assert all(len(v) == 10 for v in samples.per_latency.values())
        assert samples.sample_count == 50

    def test_fixed_seed_reproduces_samples(self):
        def session(seed):
            rng = np.random.default_rng(seed)
            return collect_samples("v", linear_probe(1.0, 100.0, 0.05, rng), PLAN, 10)
        assert session(7).per_latency == session(7).per_latency

    def test_positive_samples_required(self):
        with pytest.raises(ValueError):
            SampleSet("v", {0.0: [0.0]})


class TestRegression:
    def test_noiseless_points_recover_line(self):
        samples = SampleSet("v", {0.0: [200.0], 1000.0: [1200.0], 2000.0: [2200.0]})
        rec = regress_latency_curve(samples)
        assert rec.m == pytest.approx(1.0, rel=1e-9)
        assert rec.b == pytest.approx(200.0, rel=1e-9)
        assert rec.confidence == 1.0

    def test_single_latency_is_singular(self):
        with pytest.raises(ValueError, match="two distinct"):
            regress_latency_curve(SampleSet("v", {500.0: [100.0, 101.0]}))

    def test_mean_cv_averages_per_latency_cvs(self):
        samples = SampleSet("v", {0.0: [90.0, 110.0], 1000.0: [1000.0, 1000.0]})
        rec = regress_latency_curve(samples)
        assert rec.mean_cv == pytest.approx(0.05, rel=1e-12)
        assert rec.confidence == pytest.approx(0.95, rel=1e-12)

    def test_statistical_recovery_of_slope(self):
        # truth m=2, b=150 with 5% multiplicative noise; >=95% of seeds within +-10%
        hits = 0
        seeds = 120
        for seed in range(seeds):
            rng = np.random.default_rng(seed)
            samples = collect_samples("v", linear_probe(2.0, 150.0, 0.05, rng), PLAN, 10)
            rec = regress_latency_curve(samples)
            if abs(rec.m - 2.0) <= 0.2:
                hits += 1
        assert hits >= 0.95 * seeds

    @given(
        st.floats(min_value=0.0, max_value=5.0, allow_nan=False),
        st.floats(min_value=1.0, max_value=5000.0, allow_nan=False),
    )
    def test_noiseless_recovery_property(self, m, b):
        samples = collect_samples("v", linear_probe(m, b), PLAN, 2)
        rec = regress_latency_curve(samples)
        assert rec.m == pytest.approx(m, rel=1e-9, abs=1e-9)
        assert rec.b == pytest.approx(b, rel=1e-9)


class TestEstimateAvgLat:
    def rec(self, m, b):
        return CalibrationRecord("v", m, b, confidence=1.0, sample_count=10, mean_cv=0.0)

    def test_direct_formula(self):
        lat = estimate_avg_lat(self.rec(2.0, 100.0), 1, 2, {1: 20.0, 2: 50.0})
        assert lat == pytest.approx(160.0, rel=1e-12)

    def test_current_tier_returns_intercept_exactly(self):
        assert estimate_avg_lat(self.rec(2.0, 123.456), 1, 1, {1: 20.0}) == 123.456

    def test_faster_target_can_go_negative(self):
        lat = estimate_avg_lat(self.rec(1.0, 500.0), 2, 1, {1: 500.0, 2: 2500.0})
        assert lat == pytest.approx(-1500.0, rel=1e-12)

    def test_negative_raw_slope_is_clamped_for_prediction(self):
        lat = estimate_avg_lat(self.rec(-0.5, 300.0), 1, 2, {1: 100.0, 2: 800.0})
        assert lat == 300.0

    @given(st.floats(min_value=0.0, max_value=3.0, allow_nan=False))
    def test_monotone_in_target_latency(self, m):
        rec = self.rec(m, 50.0)
        lats = {1: 10.0, 2: 100.0, 3: 1000.0}
        estimates = [estimate_avg_lat(rec, 1, t, lats) for t in (1, 2, 3)]
        assert estimates == sorted(estimates)
