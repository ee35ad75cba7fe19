"""Shared builders and random-instance generators for the test suite."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("autotier", deadline=None)
settings.load_profile("autotier")

from autotier.model import (
    PolicyWeights,
    ResourceVector,
    Scenario,
    SimulationConfig,
    TierSpec,
    TierState,
    VmdkSpec,
    VmdkState,
    WorkloadPhase,
)


def make_tier(
    tier_id: int = 1,
    base_latency_us: float = 100.0,
    capacity: ResourceVector = ResourceVector(100_000, 1000.0, 500.0),
    read_iops: float = 100_000,
    write_iops: float = 50_000,
    read_mbps: float = 1000.0,
    write_mbps: float = 800.0,
    specialty: ResourceVector = ResourceVector(1, 1, 1),
    kind_weights: ResourceVector = ResourceVector(1, 1, 1),
    mig_weight: float = 0.0,
    caps: ResourceVector = ResourceVector(1, 1, 1),
    name: str | None = None,
) -> TierSpec:
    return TierSpec(
        id=tier_id,
        name=name or f"tier{tier_id}",
        base_latency_us=base_latency_us,
        capacity=capacity,
        read_throughput_cap=read_iops,
        write_throughput_cap=write_iops,
        read_bandwidth_cap=read_mbps,
        write_bandwidth_cap=write_mbps,
        specialty=specialty,
        kind_weights=kind_weights,
        mig_weight=mig_weight,
        caps=caps,
    )


def make_vmdk(
    vmdk_id: str = "v1",
    size_gb: float = 50.0,
    sla_weight: float = 1.0,
    initial_tier: int = 1,
    truth_slope: float = 0.1,
    truth_intercept_us: float = 20.0,
    demand_iops: float = 10_000,
    avg_io_size_bytes: float = 4096,
    read_fraction: float = 1.0,
    phases: tuple[WorkloadPhase, ...] | None = None,
) -> VmdkSpec:
    if phases is None:
        phases = (WorkloadPhase(0, demand_iops, avg_io_size_bytes, read_fraction),)
    return VmdkSpec(
        id=vmdk_id,
        vm_id=f"vm-{vmdk_id}",
        size_gb=size_gb,
        sla_weight=sla_weight,
        initial_tier=initial_tier,
        truth_slope=truth_slope,
        truth_intercept_us=truth_intercept_us,
        demand_profile=phases,
    )


def make_state(spec: VmdkSpec, tier: int | None = None, **measured) -> VmdkState:
    state = VmdkState.initial(spec)
    if tier is not None:
        state.current_tier = tier
    for key, value in measured.items():
        setattr(state, key, value)
    return state


def idle_tier_states(tiers) -> dict[int, TierState]:
    return {t.id: TierState(spec=t) for t in tiers}


def random_scenario(rng: np.random.Generator, epochs: int = 6) -> Scenario:
    """A random but internally consistent scenario for property testing.

    Tier budgets leave slack (total VMDK storage under ~60% of total usable
    storage) so plans without overload flags are the norm.
    """
    n_tiers = int(rng.integers(2, 5))
    n_vmdks = int(rng.integers(5, 31))
    latencies = np.sort(rng.uniform(20.0, 900.0, size=n_tiers))
    # keep latencies strictly increasing
    latencies += np.arange(n_tiers) * 1.0

    tiers = []
    for i in range(n_tiers):
        read_iops = float(rng.uniform(20_000, 300_000))
        write_iops = float(read_iops * rng.uniform(0.1, 1.0))
        read_bw = float(rng.uniform(300, 2000))
        write_bw = float(read_bw * rng.uniform(0.4, 1.0))
        tiers.append(
            TierSpec(
                id=i + 1,
                name=f"t{i + 1}",
                base_latency_us=float(latencies[i]),
                capacity=ResourceVector(
                    p=(read_iops + write_iops) * float(rng.uniform(1.0, 1.4)),
                    b=(read_bw + write_bw) * float(rng.uniform(0.8, 1.2)),
                    s=float(rng.uniform(300, 3000)),
                ),
                read_throughput_cap=read_iops,
                write_throughput_cap=write_iops,
                read_bandwidth_cap=read_bw,
                write_bandwidth_cap=write_bw,
                specialty=ResourceVector(*(float(x) for x in rng.integers(0, 2, size=3))),
                kind_weights=ResourceVector(*(float(x) for x in rng.uniform(0.1, 2.0, size=3))),
                mig_weight=float(rng.uniform(0.0, 0.3)),
                caps=ResourceVector(*(float(x) for x in rng.uniform(0.5, 1.0, size=3))),
            )
        )

    total_usable_gb = sum(t.max_usable().s for t in tiers)
    size_budget = 0.6 * total_usable_gb
    vmdks = []
    for j in range(n_vmdks):
        size = float(rng.uniform(5.0, max(6.0, size_budget / n_vmdks)))
        phases = [
            WorkloadPhase(
                0,
                float(rng.uniform(0, 120_000)),
                float(rng.uniform(512, 65_536)),
                float(rng.uniform(0.0, 1.0)),
            )
        ]
        if rng.uniform() < 0.4:
            phases.append(
                WorkloadPhase(
                    int(rng.integers(1, epochs + 2)),
                    float(rng.uniform(0, 120_000)),
                    float(rng.uniform(512, 65_536)),
                    float(rng.uniform(0.0, 1.0)),
                )
            )
        vmdks.append(
            VmdkSpec(
                id=f"v{j:02d}",
                vm_id=f"vm{j:02d}",
                size_gb=size,
                sla_weight=float(rng.uniform(0.2, 3.0)),
                initial_tier=int(rng.integers(1, n_tiers + 1)),
                truth_slope=float(rng.uniform(0.0, 1.5)),
                truth_intercept_us=float(rng.uniform(2.0, 300.0)),
                demand_profile=tuple(phases),
            )
        )

    monitor = 1
    migration = int(rng.integers(1, 4))
    weights = PolicyWeights(
        alpha=ResourceVector(*(float(x) for x in rng.uniform(0.0, 2.0, size=3))),
        beta=float(rng.uniform(0.0, 2.0)),
        aging_factor=float(rng.uniform(0.0, 0.9)),
        monitor_epoch=monitor,
        migration_epoch=migration,
        samples_per_latency=3,
    )
    sim = SimulationConfig(
        epochs=epochs,
        epoch_seconds=300.0,
        noise_cv=float(rng.uniform(0.0, 0.1)),
        seed=int(rng.integers(0, 2**31)),
    )
    return Scenario(tiers=tuple(tiers), vmdks=tuple(vmdks), weights=weights, sim=sim)


def random_oracle_instance(rng: np.random.Generator):
    """A small (<=8 VMDK, 3 tier) instance with matrices, states and scores built.

    Ranges keep every VMDK individually feasible on every tier with aggregate
    slack, so the greedy's stay-put fallback never has to overload.
    """
    from autotier.model import CalibrationRecord
    from autotier.policy import cal_capacity_matrices, normalize_and_gate

    tiers = tuple(
        make_tier(
            i + 1,
            base_latency_us=50.0 * (i + 1) ** 2,
            capacity=ResourceVector(
                float(rng.uniform(70_000, 140_000)),
                float(rng.uniform(700, 1500)),
                float(rng.uniform(250, 800)),
            ),
            specialty=ResourceVector(*(float(x) for x in rng.integers(0, 2, size=3))),
            kind_weights=ResourceVector(*(float(x) for x in rng.uniform(0.2, 2.0, size=3))),
            mig_weight=float(rng.uniform(0.0, 0.3)),
        )
        for i in range(3)
    )
    n = int(rng.integers(2, 9))
    states = []
    records = {}
    for j in range(n):
        vid = f"v{j}"
        spec = make_vmdk(
            vid,
            size_gb=float(rng.uniform(5, 50)),
            sla_weight=float(rng.uniform(0.2, 3.0)),
            initial_tier=int(rng.integers(1, 4)),
            demand_iops=float(rng.uniform(0, 25_000)),
            avg_io_size_bytes=float(rng.uniform(512, 8_192)),
        )
        states.append(make_state(spec, measured_read_mbps=float(rng.uniform(0, 100))))
        records[vid] = CalibrationRecord(
            vid,
            float(rng.uniform(0, 1.5)),
            float(rng.uniform(5, 200)),
            confidence=float(rng.uniform(0.05, 1.0)),
            sample_count=10,
            mean_cv=0.0,
        )
    mat = normalize_and_gate(cal_capacity_matrices(records, states, tiers), tiers)
    tier_states = idle_tier_states(tiers)
    for ts in tier_states.values():
        ts.served_read_mbps = float(rng.uniform(0, 100))
        ts.served_write_mbps = float(rng.uniform(0, 100))
    weights = PolicyWeights(
        alpha=ResourceVector(*(float(x) for x in rng.uniform(0, 2, size=3))),
        beta=float(rng.uniform(0, 2)),
        aging_factor=0.0,
    )
    previous = {s.spec.id: s.current_tier for s in states}
    return tiers, states, records, mat, tier_states, weights, previous


@pytest.fixture
def three_tiers():
    return (
        make_tier(1, 60.0, ResourceVector(250_000, 1500, 480), name="fast"),
        make_tier(2, 150.0, ResourceVector(200_000, 1800, 960), name="mid"),
        make_tier(3, 400.0, ResourceVector(100_000, 800, 960), name="cold"),
    )
