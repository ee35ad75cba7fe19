"""Prediction-driven tier placement: scoring and greedy assignment.

Per monitor epoch the policy turns calibration records into predicted
per-tier resource usage, normalizes against each tier's usable budget,
scores every (tier, vmdk) cell with the specialty-weighted match plus an
aged history term minus a migration-cost penalty, and at migration epochs
assigns VMDKs tier by tier, best score first, under running capacity
accounting. A brute-force per-epoch profit maximizer doubles as the test
oracle for the greedy round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .calibration import LatencyProbe, estimate_avg_lat, run_session
from .model import (
    CalibrationRecord,
    CapacityMatrices,
    PolicyWeights,
    ResourceVector,
    TierSpec,
    TierState,
    VmdkState,
)

# Score sentinel for cells gated out by capacity: the cell cannot host the
# VMDK at all, as opposed to hosting it at a very bad (even -inf) score.
INFEASIBLE = None

ORACLE_MAX_VMDKS = 10
ORACLE_MAX_TIERS = 4


@dataclass
class ScoreMatrix:
    """Per-(tier, vmdk) convolutional scores plus the history feeding the next epoch."""

    score: dict[tuple[int, str], float | None]
    history: dict[tuple[int, str], float]


@dataclass(frozen=True)
class AssignmentPlan:
    """A total assignment for one migration epoch.

    ``target`` maps every VMDK to exactly one tier; ``migrations`` lists only
    actual moves. VMDKs force-kept on a tier whose remaining capacity could
    not absorb them are in ``overloaded``. ``planned_usage`` records, per
    tier, the usage the planner accounted against the tier budget (only the
    kinds the policy checks; overloaded VMDKs are not counted).
    """

    epoch_index: int
    target: dict[str, int]
    migrations: tuple[tuple[str, int, int], ...]
    overloaded: frozenset[str] = frozenset()
    planned_usage: dict[int, ResourceVector] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for vmdk_id, frm, to in self.migrations:
            if frm == to:
                raise ValueError("migration list may only contain actual moves")
            if self.target.get(vmdk_id) != to:
                raise ValueError("migration target inconsistent with assignment")


def cal_capacity_matrices(
    calibrations: Mapping[str, CalibrationRecord],
    vmdks: Sequence[VmdkState],
    tiers: Sequence[TierSpec],
) -> CapacityMatrices:
    """Predict absolute resource usage of every VMDK on every tier.

    Throughput is the latency-implied ceiling 10^6/latency, additionally
    capped at the VMDK's current demand (an idle VMDK must not look like a
    heavy consumer); bandwidth follows from throughput and mean I/O size;
    storage is the VMDK size.
    """
    tier_latencies = {t.id: t.base_latency_us for t in tiers}
    mat = CapacityMatrices(
        tier_ids=tuple(t.id for t in tiers),
        vmdk_ids=tuple(v.spec.id for v in vmdks),
    )
    for tier in tiers:
        for v in vmdks:
            record = calibrations[v.spec.id]
            lat = estimate_avg_lat(record, v.current_tier, tier.id, tier_latencies)
            iops = 1e6 / lat if lat > 0 else 0.0
            iops = min(iops, v.demand_iops)
            mat.cap[(tier.id, v.spec.id)] = ResourceVector(
                p=iops,
                b=iops * v.avg_io_size_bytes / 1e6,
                s=v.spec.size_gb,
            )
    return mat


def normalize_and_gate(mat: CapacityMatrices, tiers: Sequence[TierSpec]) -> CapacityMatrices:
    """Fill per-cell feasibility and budget-normalized usage ratios.

    A cell is infeasible when any predicted component exceeds the tier's
    usable budget; its ratios are zeroed so downstream scores ignore it.
    """
    budgets = {t.id: t.max_usable() for t in tiers}
    for key in list(mat.cap):
        tier_id, _ = key
        cap = mat.cap[key]
        budget = budgets[tier_id]
        feasible = cap.fits_within(budget)
        mat.feasible[key] = feasible
        if not feasible:
            mat.ratio[key] = ResourceVector()
            continue
        mat.ratio[key] = ResourceVector(
            p=cap.p / budget.p if budget.p > 0 else 0.0,
            b=cap.b / budget.b if budget.b > 0 else 0.0,
            s=cap.s / budget.s if budget.s > 0 else 0.0,
        )
    return mat


def orthogonal_match_score(
    tier: TierSpec,
    ratios: ResourceVector,
    sla_weight: float,
    confidence: float,
    normalize_by_active_weights: bool = False,
) -> float:
    """Specialty-masked, weight-scaled inner product of tier and VMDK vectors."""
    masked = tier.specialty * tier.kind_weights
    numerator = masked.p * ratios.p + masked.b * ratios.b + masked.s * ratios.s
    if normalize_by_active_weights:
        denominator = masked.total()
        if denominator <= 0:
            return 0.0
    else:
        denominator = tier.kind_weights.total()
    return numerator * sla_weight * confidence / denominator


def mig_cost_seconds(
    vmdk: VmdkState,
    target_tier: int,
    tier_states: Mapping[int, TierState],
    source_tier: int | None = None,
) -> float:
    """Estimated seconds to move the VMDK, bottlenecked by spare bandwidth.

    The source's spare read bandwidth gets the VMDK's own read share back
    (a live migration frees it); the target contributes spare write
    bandwidth. Zero speed means the move is impossible this epoch (+inf).
    """
    source = vmdk.current_tier if source_tier is None else source_tier
    if target_tier == source:
        return 0.0
    read_side = tier_states[source].remaining_read_mbps() + vmdk.measured_read_mbps
    write_side = tier_states[target_tier].remaining_write_mbps()
    speed = min(read_side, write_side)
    if speed <= 0:
        return math.inf
    return vmdk.spec.size_gb * 1000.0 / speed


def cal_score(
    mat: CapacityMatrices,
    history: Mapping[tuple[int, str], float],
    tiers: Sequence[TierSpec],
    weights: PolicyWeights,
    tier_states: Mapping[int, TierState],
    vmdks: Sequence[VmdkState],
    calibrations: Mapping[str, CalibrationRecord],
    migration_epoch_seconds: float,
) -> ScoreMatrix:
    """Convolutional score: aged history + current match - weighted migration cost.

    Migration seconds are divided by the migration-epoch duration so the
    penalty is dimensionless. Infeasible cells keep the INFEASIBLE sentinel
    and their history resets to zero; so does history under an infinite
    migration cost, which only blocks the current epoch.
    """
    score: dict[tuple[int, str], float | None] = {}
    new_history: dict[tuple[int, str], float] = {}
    for tier in tiers:
        for v in vmdks:
            key = (tier.id, v.spec.id)
            if not mat.feasible[key]:
                score[key] = INFEASIBLE
                new_history[key] = 0.0
                continue
            current = orthogonal_match_score(
                tier,
                mat.ratio[key],
                v.spec.sla_weight,
                calibrations[v.spec.id].confidence,
                weights.normalize_by_active_weights,
            )
            cost = mig_cost_seconds(v, tier.id, tier_states) / migration_epoch_seconds
            # An impossible move (infinite cost) blocks the cell this epoch no
            # matter how small the per-tier cost weight is.
            penalty = tier.mig_weight * cost if math.isfinite(cost) else math.inf
            value = weights.aging_factor * history.get(key, 0.0) + current - penalty
            score[key] = value
            new_history[key] = value if math.isfinite(value) else 0.0
    return ScoreMatrix(score=score, history=new_history)


def _descending_by_score(
    scores: ScoreMatrix, tier_id: int, vmdk_ids: Sequence[str]
) -> list[str]:
    # -inf marks a migration that cannot run this epoch; skip it like the
    # infeasible sentinel instead of planning an order that stalls at birth.
    scored = [
        v for v in vmdk_ids
        if scores.score[(tier_id, v)] is not INFEASIBLE
        and scores.score[(tier_id, v)] > -math.inf
    ]
    return sorted(scored, key=lambda v: (-scores.score[(tier_id, v)], v))


def trigger_migration(
    scores: ScoreMatrix,
    mat: CapacityMatrices,
    tiers: Sequence[TierSpec],
    current_assignment: Mapping[str, int],
    epoch_index: int,
    pinned: Mapping[str, int] | None = None,
) -> AssignmentPlan:
    """Greedy assignment round: tiers in id order, VMDKs by descending score.

    Each tier absorbs VMDKs while its running budget holds. Whatever remains
    unassigned stays on its current tier, with an overload flag when even
    that tier cannot absorb it; totality always wins over capacity.

    ``pinned`` maps VMDKs with an in-flight migration to their committed
    destination: they consume budget there first and are never re-targeted.
    """
    remaining: dict[int, ResourceVector] = {t.id: t.max_usable() for t in tiers}
    usage: dict[int, ResourceVector] = {t.id: ResourceVector() for t in tiers}
    target: dict[str, int] = {}
    overloaded: set[str] = set()

    def absorb(tier_id: int, vmdk_id: str) -> bool:
        cap = mat.cap[(tier_id, vmdk_id)]
        if not cap.fits_within(remaining[tier_id]):
            return False
        remaining[tier_id] = ResourceVector(
            remaining[tier_id].p - cap.p,
            remaining[tier_id].b - cap.b,
            remaining[tier_id].s - cap.s,
        )
        usage[tier_id] = usage[tier_id] + cap
        return True

    effective_current = dict(current_assignment)
    for vmdk_id, dest in sorted((pinned or {}).items()):
        target[vmdk_id] = dest
        effective_current[vmdk_id] = dest
        if not absorb(dest, vmdk_id):
            overloaded.add(vmdk_id)

    for tier in tiers:
        for vmdk_id in _descending_by_score(scores, tier.id, mat.vmdk_ids):
            if vmdk_id in target:
                continue
            if absorb(tier.id, vmdk_id):
                target[vmdk_id] = tier.id

    for vmdk_id in mat.vmdk_ids:
        if vmdk_id in target:
            continue
        current = effective_current[vmdk_id]
        target[vmdk_id] = current
        if not absorb(current, vmdk_id):
            overloaded.add(vmdk_id)

    migrations = tuple(
        (v, effective_current[v], t)
        for v, t in target.items()
        if t != effective_current[v]
    )
    return AssignmentPlan(
        epoch_index=epoch_index,
        target=target,
        migrations=migrations,
        overloaded=frozenset(overloaded),
        planned_usage=usage,
    )


def epoch_profit(
    target: Mapping[str, int],
    previous: Mapping[str, int],
    mat: CapacityMatrices,
    weights: PolicyWeights,
    vmdks: Sequence[VmdkState],
    tier_states: Mapping[int, TierState],
    migration_epoch_seconds: float,
) -> float:
    """Single-epoch profit: SLA-weighted resource gain minus migration penalty.

    Resource terms use budget-normalized ratios so the three kinds are
    commensurable; the migration term uses the same normalized cost as the
    score. Used for oracle comparison and reporting only.
    """
    total = 0.0
    for v in vmdks:
        tier_id = target[v.spec.id]
        ratios = mat.ratio[(tier_id, v.spec.id)]
        gain = (
            weights.alpha.p * ratios.p
            + weights.alpha.b * ratios.b
            + weights.alpha.s * ratios.s
        )
        cost = 0.0
        if tier_id != previous[v.spec.id]:
            cost = (
                mig_cost_seconds(v, tier_id, tier_states, source_tier=previous[v.spec.id])
                / migration_epoch_seconds
            )
        total += v.spec.sla_weight * (gain - weights.beta * cost)
    return total


def oracle_assignment(
    mat: CapacityMatrices,
    weights: PolicyWeights,
    previous: Mapping[str, int],
    tiers: Sequence[TierSpec],
    vmdks: Sequence[VmdkState],
    tier_states: Mapping[int, TierState],
    migration_epoch_seconds: float,
    epoch_index: int = 0,
) -> AssignmentPlan:
    """Exhaustive per-epoch profit maximizer over capacity-feasible assignments.

    Enumeration only; bounded to small instances. Ties break toward the
    lexicographically smallest assignment vector (VMDKs in id order).
    """
    vmdk_states = sorted(vmdks, key=lambda v: v.spec.id)
    if len(vmdk_states) > ORACLE_MAX_VMDKS or len(tiers) > ORACLE_MAX_TIERS:
        raise ValueError(
            f"oracle limited to {ORACLE_MAX_VMDKS} VMDKs and {ORACLE_MAX_TIERS} tiers"
        )
    tier_ids = [t.id for t in tiers]
    budgets = {t.id: t.max_usable() for t in tiers}

    # Per-(vmdk, tier) profit contribution; the objective is separable once
    # the previous assignment and tier states are fixed.
    contrib: list[dict[int, float]] = []
    for v in vmdk_states:
        row: dict[int, float] = {}
        for t in tier_ids:
            ratios = mat.ratio[(t, v.spec.id)]
            gain = (
                weights.alpha.p * ratios.p
                + weights.alpha.b * ratios.b
                + weights.alpha.s * ratios.s
            )
            cost = 0.0
            if t != previous[v.spec.id]:
                cost = (
                    mig_cost_seconds(v, t, tier_states, source_tier=previous[v.spec.id])
                    / migration_epoch_seconds
                )
            row[t] = v.spec.sla_weight * (gain - weights.beta * cost)
        contrib.append(row)

    remaining = {t: [budgets[t].p, budgets[t].b, budgets[t].s] for t in tier_ids}
    choice: list[int] = []
    best_profit = -math.inf
    best_vector: list[int] | None = None

    def recurse(index: int, profit: float) -> None:
        nonlocal best_profit, best_vector
        if index == len(vmdk_states):
            if profit > best_profit:
                best_profit = profit
                best_vector = list(choice)
            return
        v = vmdk_states[index]
        cap = {t: mat.cap[(t, v.spec.id)] for t in tier_ids}
        for t in tier_ids:
            rem = remaining[t]
            c = cap[t]
            if c.p <= rem[0] and c.b <= rem[1] and c.s <= rem[2]:
                rem[0] -= c.p
                rem[1] -= c.b
                rem[2] -= c.s
                choice.append(t)
                recurse(index + 1, profit + contrib[index][t])
                choice.pop()
                rem[0] += c.p
                rem[1] += c.b
                rem[2] += c.s

    recurse(0, 0.0)
    if best_vector is None:
        raise ValueError("no capacity-feasible assignment exists")

    target = {v.spec.id: t for v, t in zip(vmdk_states, best_vector)}
    usage: dict[int, ResourceVector] = {t: ResourceVector() for t in tier_ids}
    for v, t in target.items():
        usage[t] = usage[t] + mat.cap[(t, v)]
    migrations = tuple(
        (v, previous[v], t) for v, t in target.items() if t != previous[v]
    )
    return AssignmentPlan(
        epoch_index=epoch_index,
        target=target,
        migrations=migrations,
        planned_usage=usage,
    )


@dataclass
class PolicyContext:
    """Everything a policy may look at when monitoring or planning."""

    tiers: tuple[TierSpec, ...]
    tier_states: dict[int, TierState]
    vmdk_states: dict[str, VmdkState]
    weights: PolicyWeights
    epoch_seconds: float
    probe_for: Callable[[str], LatencyProbe]
    in_flight: dict[str, int] = field(default_factory=dict)

    @property
    def migration_epoch_seconds(self) -> float:
        return self.weights.migration_epoch * self.epoch_seconds

    def current_assignment(self) -> dict[str, int]:
        return {v: s.current_tier for v, s in self.vmdk_states.items()}

    def sorted_states(self) -> list[VmdkState]:
        return [self.vmdk_states[v] for v in sorted(self.vmdk_states)]


class AutoTieringPolicy:
    """Calibrates at monitor epochs, plans greedy migrations at migration epochs."""

    name = "autotiering"

    def __init__(self) -> None:
        self.calibrations: dict[str, CalibrationRecord] = {}
        self.history: dict[tuple[int, str], float] = {}
        self.matrices: CapacityMatrices | None = None
        self.scores: ScoreMatrix | None = None

    def on_monitor(self, ctx: PolicyContext) -> None:
        states = ctx.sorted_states()
        for v in states:
            self.calibrations[v.spec.id] = run_session(
                v.spec.id, ctx.probe_for(v.spec.id), ctx.weights
            )
        mat = cal_capacity_matrices(self.calibrations, states, ctx.tiers)
        normalize_and_gate(mat, ctx.tiers)
        self.scores = cal_score(
            mat,
            self.history,
            ctx.tiers,
            ctx.weights,
            ctx.tier_states,
            states,
            self.calibrations,
            ctx.migration_epoch_seconds,
        )
        self.history = self.scores.history
        self.matrices = mat

    def plan_migrations(self, ctx: PolicyContext, epoch_index: int) -> AssignmentPlan:
        if self.scores is None or self.matrices is None:
            raise RuntimeError("plan requested before any monitor epoch")
        return trigger_migration(
            self.scores,
            self.matrices,
            ctx.tiers,
            ctx.current_assignment(),
            epoch_index,
            pinned=ctx.in_flight,
        )
