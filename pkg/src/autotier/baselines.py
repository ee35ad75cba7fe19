"""Measurement-only comparison policies.

IDT packs by measured IOPS into tiers ordered by read-IOPS capability and
checks storage only. EDT packs by IOPS density (measured IOPS per GB) into
tiers ordered by IOPS-per-GB capability and checks storage plus throughput.
Neither predicts: both act on the last epoch's measurements.

Both use the same churn-avoidance reading of their one-line definitions:
sort ties prefer the VMDK's current tier, and a VMDK whose metric is zero
never moves to a more capable tier than its current one.
"""

from __future__ import annotations

from typing import Callable, Mapping, Sequence

from .model import ResourceVector, TierSpec, VmdkState
from .policy import AssignmentPlan, PolicyContext


def _pack(
    vmdks: Sequence[VmdkState],
    tiers: Sequence[TierSpec],
    metric: Callable[[VmdkState], float],
    tier_capability: Callable[[TierSpec], float],
    check_throughput: bool,
    epoch_index: int,
    pinned: Mapping[str, int] | None = None,
) -> AssignmentPlan:
    tier_order = sorted(tiers, key=lambda t: (-tier_capability(t), t.id))
    rank = {t.id: i for i, t in enumerate(tier_order)}
    remaining_s = {t.id: t.max_usable().s for t in tiers}
    remaining_p = {t.id: t.max_usable().p for t in tiers}
    usage: dict[int, ResourceVector] = {t.id: ResourceVector() for t in tiers}
    target: dict[str, int] = {}
    overloaded: set[str] = set()
    by_id = {v.spec.id: v for v in vmdks}

    def absorb(tier_id: int, v: VmdkState) -> bool:
        if v.spec.size_gb > remaining_s[tier_id]:
            return False
        if check_throughput and v.measured_iops > remaining_p[tier_id]:
            return False
        remaining_s[tier_id] -= v.spec.size_gb
        p_used = 0.0
        if check_throughput:
            remaining_p[tier_id] -= v.measured_iops
            p_used = v.measured_iops
        usage[tier_id] = usage[tier_id] + ResourceVector(p=p_used, s=v.spec.size_gb)
        return True

    effective_current = {v.spec.id: v.current_tier for v in vmdks}
    for vmdk_id, dest in sorted((pinned or {}).items()):
        target[vmdk_id] = dest
        effective_current[vmdk_id] = dest
        if not absorb(dest, by_id[vmdk_id]):
            overloaded.add(vmdk_id)

    ordered = sorted(
        vmdks, key=lambda v: (-metric(v), rank[v.current_tier], v.spec.id)
    )
    for v in ordered:
        if v.spec.id in target:
            continue
        for tier in tier_order:
            if metric(v) == 0 and rank[tier.id] < rank[v.current_tier]:
                continue
            if absorb(tier.id, v):
                target[v.spec.id] = tier.id
                break

    for v in vmdks:
        if v.spec.id in target:
            continue
        target[v.spec.id] = v.current_tier
        if not absorb(v.current_tier, v):
            overloaded.add(v.spec.id)

    migrations = tuple(
        (vid, effective_current[vid], t)
        for vid, t in target.items()
        if t != effective_current[vid]
    )
    return AssignmentPlan(
        epoch_index=epoch_index,
        target=target,
        migrations=migrations,
        overloaded=frozenset(overloaded),
        planned_usage=usage,
    )


def idt_assign(
    vmdks: Sequence[VmdkState],
    tiers: Sequence[TierSpec],
    epoch_index: int = 0,
    pinned: Mapping[str, int] | None = None,
) -> AssignmentPlan:
    """Greedy IOPS-only placement: hotter VMDKs onto higher-IOPS tiers.

    Only the storage budget is checked; bandwidth pressure is invisible to
    this policy by construction.
    """
    return _pack(
        vmdks,
        tiers,
        metric=lambda v: v.measured_iops,
        tier_capability=lambda t: t.read_throughput_cap,
        check_throughput=False,
        epoch_index=epoch_index,
        pinned=pinned,
    )


def edt_assign(
    vmdks: Sequence[VmdkState],
    tiers: Sequence[TierSpec],
    epoch_index: int = 0,
    pinned: Mapping[str, int] | None = None,
) -> AssignmentPlan:
    """Density-based placement: measured IOPS per GB onto IOPS-per-GB tiers.

    Checks storage and throughput budgets; still blind to bandwidth.
    """
    return _pack(
        vmdks,
        tiers,
        metric=lambda v: v.measured_iops / v.spec.size_gb,
        tier_capability=lambda t: (
            t.read_throughput_cap / t.capacity.s if t.capacity.s > 0 else 0.0
        ),
        check_throughput=True,
        epoch_index=epoch_index,
        pinned=pinned,
    )


class IdtPolicy:
    name = "idt"

    def on_monitor(self, ctx: PolicyContext) -> None:
        pass  # measurement arrives through VmdkState; nothing to precompute

    def plan_migrations(self, ctx: PolicyContext, epoch_index: int) -> AssignmentPlan:
        return idt_assign(ctx.sorted_states(), ctx.tiers, epoch_index, pinned=ctx.in_flight)


class EdtPolicy:
    name = "edt"

    def on_monitor(self, ctx: PolicyContext) -> None:
        pass

    def plan_migrations(self, ctx: PolicyContext, epoch_index: int) -> AssignmentPlan:
        return edt_assign(ctx.sorted_states(), ctx.tiers, epoch_index, pinned=ctx.in_flight)
