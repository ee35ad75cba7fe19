"""Tier speed sensitivity calibration.

A calibration session injects a small set of synthetic latencies into one
VMDK's I/O path, samples the resulting average latency several times per
injected value, and fits a line (mean latency vs injected latency). The fit
predicts the VMDK's latency on any other tier from the difference of tier
base latencies, without migrating anything.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .model import CalibrationRecord, PolicyWeights

# A probe answers: average I/O latency (us) of a VMDK under an extra injected
# latency of d us. The simulator's device model provides one per hosted VMDK.
LatencyProbe = Callable[[float], float]


@dataclass
class SampleSet:
    """Raw samples of one calibration session, keyed by injected latency."""

    vmdk_id: str
    per_latency: dict[float, list[float]]

    def __post_init__(self) -> None:
        if not self.per_latency:
            raise ValueError("sample set must cover at least one injected latency")
        for d, samples in self.per_latency.items():
            if not samples:
                raise ValueError(f"no samples for injected latency {d}")
            if any(s <= 0 for s in samples):
                raise ValueError(f"non-positive sample for injected latency {d}")

    @property
    def sample_count(self) -> int:
        return sum(len(s) for s in self.per_latency.values())


def collect_samples(
    vmdk_id: str,
    probe: LatencyProbe,
    injected_latencies_us: Sequence[float],
    samples_per_latency: int,
) -> SampleSet:
    """Run one calibration session against a latency probe.

    The probe carries its own noise source; for a fixed seed the session is
    deterministic because injected latencies are visited in plan order.
    """
    per_latency: dict[float, list[float]] = {}
    for d in injected_latencies_us:
        per_latency[float(d)] = [float(probe(float(d))) for _ in range(samples_per_latency)]
    return SampleSet(vmdk_id=vmdk_id, per_latency=per_latency)


def compute_cv(samples: Sequence[float]) -> float:
    """Coefficient of variation: population standard deviation over mean."""
    if len(samples) == 0:
        raise ValueError("cannot compute CV of an empty sample list")
    arr = np.asarray(samples, dtype=float)
    mean = float(arr.mean())
    if mean == 0.0:
        raise ValueError("cannot compute CV when the sample mean is 0")
    return float(arr.std()) / mean


def compute_confidence(mean_cv: float, floor: float = 0.05) -> float:
    """Map a session's mean CV to an estimation confidence in [floor, 1]."""
    if mean_cv < 0:
        raise ValueError("meanCv must be non-negative")
    if mean_cv >= 1.0:
        return floor
    return max(floor, 1.0 - mean_cv)


def regress_latency_curve(sample_set: SampleSet, floor: float = 0.05) -> CalibrationRecord:
    """Least-squares fit of per-latency mean sample vs injected latency.

    Samples at each injected latency are averaged before the fit; the mean of
    the per-latency CVs drives the confidence.
    """
    xs = sorted(sample_set.per_latency)
    if len(xs) < 2:
        raise ValueError("regression needs at least two distinct injected latencies")
    means = []
    cv_total = 0.0
    for d in xs:
        samples = sample_set.per_latency[d]
        cv_total += compute_cv(samples)
        means.append(float(np.mean(samples)))
    mean_cv = cv_total / len(xs)
    m, b = np.polyfit(np.asarray(xs, dtype=float), np.asarray(means, dtype=float), 1)
    return CalibrationRecord(
        vmdk_id=sample_set.vmdk_id,
        m=float(m),
        b=float(b),
        confidence=compute_confidence(mean_cv, floor),
        sample_count=sample_set.sample_count,
        mean_cv=mean_cv,
    )


def estimate_avg_lat(
    record: CalibrationRecord,
    current_tier: int,
    target_tier: int,
    tier_latencies: Mapping[int, float],
) -> float:
    """Predicted average latency of the VMDK if hosted on target_tier.

    May return a non-positive value when the target tier is much faster than
    the fit can extrapolate; callers treat that as "prediction out of range".
    """
    if target_tier == current_tier:
        return record.b
    delta = tier_latencies[target_tier] - tier_latencies[current_tier]
    return record.prediction_slope * delta + record.b


def run_session(
    vmdk_id: str,
    probe: LatencyProbe,
    weights: PolicyWeights,
) -> CalibrationRecord:
    """Collect samples per the configured plan and regress them."""
    sample_set = collect_samples(
        vmdk_id, probe, weights.injected_latencies_us, weights.samples_per_latency
    )
    return regress_latency_curve(sample_set, floor=weights.confidence_floor)
