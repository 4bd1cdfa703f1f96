"""End-to-end runs, parameter sweeps, minimum-bandwidth search and policy
comparison."""

from __future__ import annotations

from dataclasses import dataclass

from .allocation import PolicyKind, build_transmission_plan
from .judger import Reason, filter_fleet
from .proxy import CavContribution, net_gain, proxy_ap, reconstruction_quality, staleness_quality
from .scenario import ReportRow, ScenarioConfig, SimulationReport, scenario_digest

__all__ = [
    "ALL_POLICIES",
    "DEFAULT_POWER_GRID_W",
    "DEFAULT_BANDWIDTH_GRID_HZ",
    "STAGES",
    "SweepSpec",
    "SweepRow",
    "MinBandwidthQuery",
    "InfeasibleQuery",
    "ComparisonRow",
    "run_pipeline",
    "sweep",
    "min_required_bandwidth",
    "bandwidth_reduction",
    "compare_policies",
]

ALL_POLICIES = tuple(PolicyKind)
DEFAULT_POWER_GRID_W = (4e-3, 8e-3, 12e-3)
DEFAULT_BANDWIDTH_GRID_HZ = (100e6, 150e6, 200e6)

# Judging runs on coordinates before anything is sent, so dropped CAVs use no bandwidth.
STAGES = ("score", "judge", "allocate", "transmit", "fuse")


def run_pipeline(config: ScenarioConfig) -> SimulationReport:
    """Run one snapshot of the scene under ``config.policy``."""
    policy = config.policy
    judgement = filter_fleet(config.vehicles, config.ego_id, config.d_max_m, config.judger)
    decisions = {d.cav_id: d for d in judgement.decisions}
    others = config.collaborators

    if policy is PolicyKind.NO_FUSION:
        kept = set()
    elif policy.uses_judger:
        kept = judgement.kept_ids
    else:
        kept = {v.id for v in others}

    plan = build_transmission_plan(config.vehicles, config.ego_id, kept, judgement.raw_scores,
                                   config.channel, policy, config.seed)
    params = config.proxy

    rows, contributions = [], []
    for v in others:
        d = decisions[v.id]
        entry = plan[v.id]
        raw = judgement.raw_scores[v.id]
        if entry.participates:
            if policy is PolicyKind.TWD:
                q = reconstruction_quality(entry.alpha, params.gamma) * staleness_quality(
                    entry.delay_s, params.tau_max_s)
            else:
                q = reconstruction_quality(entry.alpha, params.gamma)
            g = net_gain(raw, q, params.lambda_penalty)
            contributions.append(CavContribution(v.id, q, raw, g))
            reason = Reason.KEPT.value
        else:
            q, g = 0.0, 0.0
            reason = d.reason.value if policy.uses_judger else "not_transmitted"
        rows.append(ReportRow(
            cav_id=v.id, distance_m=d.distance_m, score_raw_m2=raw,
            score_normalized=d.normalized_score, kept=entry.participates, reason=reason,
            subchannels=entry.subchannels, capacity_bps=entry.capacity_bps, alpha=entry.alpha,
            delay_s=entry.delay_s, quality=q, net_gain_m2=g,
        ))

    ap = proxy_ap(contributions, config.ego.sensing_radius_m, config.d_max_m, params)
    return SimulationReport(
        scenario_digest=scenario_digest(config),
        policy=policy.value,
        seed=config.seed,
        rows=tuple(rows),
        proxy_ap=ap,
        net_gain_sum_m2=sum(c.net_gain_m2 for c in contributions),
        bandwidth_consumed_hz=plan.assigned_subchannels * config.channel.subchannel_bandwidth_hz,
        score_evaluations=judgement.score_evaluations,
        metadata={"stages": list(STAGES), "judging": "pre-transmission"},
    )


# --------------------------------------------------------------------------
# sweeps

_AXES = {"transmit_power": "transmit_power_w", "bandwidth": "total_bandwidth_hz"}


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple
    policies: tuple = ALL_POLICIES

    def __post_init__(self):
        if self.axis not in _AXES:
            raise ValueError(f"axis must be one of {sorted(_AXES)}")
        values = tuple(float(v) for v in self.values)
        if not values or any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("sweep values must be non-empty and strictly ascending")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "policies", tuple(PolicyKind.parse(p) for p in self.policies))


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    policy: str
    proxy_ap: float
    bandwidth_consumed_hz: float


def sweep(base_config: ScenarioConfig, spec: SweepSpec) -> list:
    """One run per (axis value, policy); rows are axis-major, policy-minor."""
    rows = []
    for value in spec.values:
        cfg = base_config.with_channel(**{_AXES[spec.axis]: value})
        for policy in spec.policies:
            report = run_pipeline(cfg.replace(policy=policy))
            rows.append(SweepRow(value, policy.value, report.proxy_ap, report.bandwidth_consumed_hz))
    return rows


# --------------------------------------------------------------------------
# minimum required bandwidth

class InfeasibleQuery(Exception):
    """The target AP is not reached anywhere in the search interval."""


@dataclass(frozen=True)
class MinBandwidthQuery:
    target_ap: float
    w_low_hz: float
    w_high_hz: float
    tolerance_hz: float = 1e5

    def __post_init__(self):
        if not self.w_low_hz < self.w_high_hz:
            raise ValueError("w_low_hz must be below w_high_hz")
        if not self.w_low_hz > 0:
            raise ValueError("w_low_hz must be positive")
        if not self.tolerance_hz > 0:
            raise ValueError("tolerance_hz must be positive")
        if not 0.0 < self.target_ap < 1.0:
            raise ValueError("target_ap must lie in (0, 1)")


def _ap_at(config: ScenarioConfig, bandwidth_hz: float) -> float:
    return run_pipeline(config.with_channel(total_bandwidth_hz=bandwidth_hz)).proxy_ap


def min_required_bandwidth(base_config: ScenarioConfig, query: MinBandwidthQuery, policy=None) -> float:
    """Smallest bandwidth in ``[w_low_hz, w_high_hz]`` (to within
    ``tolerance_hz``) at which ``policy`` reaches ``target_ap``.

    Bisection; proxy AP is non-decreasing in bandwidth for a fixed policy.
    Raises :class:`InfeasibleQuery` if even ``w_high_hz`` falls short.
    """
    cfg = base_config if policy is None else base_config.replace(policy=PolicyKind.parse(policy))
    lo, hi = query.w_low_hz, query.w_high_hz
    if _ap_at(cfg, lo) >= query.target_ap:
        return lo
    if _ap_at(cfg, hi) < query.target_ap:
        raise InfeasibleQuery(
            f"{cfg.policy.value} does not reach AP {query.target_ap:g} below {hi:g} Hz")
    # invariant: ap(lo) < target <= ap(hi)
    while hi - lo > query.tolerance_hz:
        mid = 0.5 * (lo + hi)
        if _ap_at(cfg, mid) >= query.target_ap:
            hi = mid
        else:
            lo = mid
    return hi


def bandwidth_reduction(w_candidate: float, w_baseline: float) -> float:
    """Relative saving of ``w_candidate`` over ``w_baseline``, in percent."""
    return 100.0 * (w_baseline - w_candidate) / w_baseline


# --------------------------------------------------------------------------
# comparison

@dataclass(frozen=True)
class ComparisonRow:
    rank: int
    policy: str
    proxy_ap: float
    bandwidth_consumed_hz: float
    kept_count: int


def compare_policies(config: ScenarioConfig, policies=ALL_POLICIES) -> list:
    """Run every policy on the same scene and rank by proxy AP (descending).

    Ties keep the canonical policy order.
    """
    chosen = sorted({PolicyKind.parse(p) for p in policies}, key=ALL_POLICIES.index)
    reports = [(p, run_pipeline(config.replace(policy=p))) for p in chosen]
    ranked = sorted(reports, key=lambda pr: -pr[1].proxy_ap)
    return [ComparisonRow(i + 1, p.value, r.proxy_ap, r.bandwidth_consumed_hz, len(r.kept_ids))
            for i, (p, r) in enumerate(ranked)]
