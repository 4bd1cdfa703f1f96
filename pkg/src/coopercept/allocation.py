"""Sub-channel allocation and per-CAV transmission plans."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import ChannelParams, channel_gain, compression_ratio, subchannel_capacity

__all__ = [
    "PolicyKind",
    "PlanEntry",
    "TransmissionPlan",
    "DELAY_SENTINEL_S",
    "largest_remainder",
    "allocate_subchannels",
    "link_seed",
    "build_transmission_plan",
]

# TWD delay recorded for a link with zero capacity (JSON has no infinity).
DELAY_SENTINEL_S = sys.float_info.max


class PolicyKind(str, Enum):
    SMART_COOPER = "SmartCooper"
    C_AOL = "C-AOL"
    TWF = "TWF"
    TWD = "TWD"
    NO_FUSION = "NoFusion"

    @classmethod
    def parse(cls, value) -> "PolicyKind":
        if isinstance(value, cls):
            return value
        key = str(value).replace("-", "").replace("_", "").lower()
        for member in cls:
            if member.value.replace("-", "").lower() == key or member.name.replace("_", "").lower() == key:
                return member
        raise ValueError(f"unknown policy {value!r}")

    @property
    def score_proportional(self) -> bool:
        return self in (PolicyKind.SMART_COOPER, PolicyKind.C_AOL)

    @property
    def uses_judger(self) -> bool:
        return self is PolicyKind.SMART_COOPER


@dataclass(frozen=True)
class PlanEntry:
    cav_id: str
    subchannels: int
    capacity_bps: float
    alpha: float
    delay_s: float
    participates: bool


@dataclass(frozen=True)
class TransmissionPlan:
    entries: tuple
    policy: PolicyKind

    def __post_init__(self):
        for e in self.entries:
            if not 0.0 <= e.alpha <= 1.0 or e.delay_s < 0:
                raise ValueError(f"invalid plan entry {e}")

    @property
    def participants(self):
        return [e for e in self.entries if e.participates]

    @property
    def assigned_subchannels(self) -> int:
        return sum(e.subchannels for e in self.participants)

    def __getitem__(self, cav_id):
        for e in self.entries:
            if e.cav_id == cav_id:
                return e
        raise KeyError(cav_id)


def largest_remainder(weights, seats: int) -> list:
    """Hamilton apportionment of ``seats`` proportional to ``weights``.

    Leftover seats go to the largest fractional remainders; ties keep input
    order, so callers pass weights sorted by their tie-break key.
    """
    w = np.asarray(weights, dtype=float)
    total = w.sum()
    if seats <= 0 or len(w) == 0:
        return [0] * len(w)
    if total <= 0:
        w = np.ones_like(w)
        total = w.sum()
    quotas = seats * w / total
    counts = np.floor(quotas).astype(int)
    leftover = seats - int(counts.sum())
    order = sorted(range(len(w)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    return counts.tolist()


def allocate_subchannels(transmitters, n_subchannels: int, policy) -> dict:
    """Split ``n_subchannels`` among ``(cav_id, raw_score)`` transmitters.

    Score-proportional policies give every transmitter one sub-channel
    first when there are enough to go round, then apportion the rest by
    score. Fair policies split evenly, handing remainders out round-robin.
    Ties resolve by ascending ``cav_id``.
    """
    policy = PolicyKind.parse(policy)
    if n_subchannels < 1:
        raise ValueError("n_subchannels must be >= 1")
    ranked = sorted(transmitters, key=lambda t: str(t[0]))
    if not ranked:
        return {}
    ids = [t[0] for t in ranked]
    k = len(ids)

    if policy.score_proportional:
        scores = [float(t[1]) for t in ranked]
        if n_subchannels >= k:
            counts = [1 + c for c in largest_remainder(scores, n_subchannels - k)]
        else:
            counts = largest_remainder(scores, n_subchannels)
    else:
        base, extra = divmod(n_subchannels, k)
        counts = [base + (1 if i < extra else 0) for i in range(k)]
    return dict(zip(ids, counts))


def link_seed(seed: int, cav_id: str) -> int:
    """Stable per-link seed derived from the scene seed and the CAV id."""
    entropy = [int(seed) & (2**32 - 1)] + list(str(cav_id).encode())
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def build_transmission_plan(fleet, ego_id: str, kept_ids, scores: dict, channel: ChannelParams,
                            policy, seed: int = 0) -> TransmissionPlan:
    """Assign sub-channels to the kept CAVs and derive capacity, compression
    ratio and delay for each one.

    Every non-ego vehicle gets an entry; those outside ``kept_ids`` do not
    participate. TWD sends uncompressed frames and pays for it in delay; all
    other policies compress to fit one frame window.
    """
    policy = PolicyKind.parse(policy)
    ego = next(v for v in fleet if v.id == ego_id)
    others = [v for v in fleet if v.id != ego_id]
    kept = set() if policy is PolicyKind.NO_FUSION else set(kept_ids)
    transmitters = [(v.id, scores.get(v.id, 0.0)) for v in others if v.id in kept]
    counts = allocate_subchannels(transmitters, channel.num_subchannels, policy) if transmitters else {}

    entries = []
    for v in others:
        if v.id not in kept:
            entries.append(PlanEntry(v.id, 0, 0.0, 0.0, 0.0, False))
            continue
        n = counts[v.id]
        gain = channel_gain((v.x_m, v.y_m), (ego.x_m, ego.y_m), channel, link_seed(seed, v.id))
        capacity = n * subchannel_capacity(gain, channel)
        if policy is PolicyKind.TWD:
            alpha = 1.0
            delay = v.data_volume_bits / capacity if capacity > 0 else DELAY_SENTINEL_S
            delay = min(delay, DELAY_SENTINEL_S) if math.isfinite(delay) else DELAY_SENTINEL_S
        else:
            alpha = compression_ratio(capacity, v.data_volume_bits, channel.frame_window_s)
            delay = channel.frame_window_s
        entries.append(PlanEntry(v.id, n, capacity, alpha, delay, True))
    return TransmissionPlan(tuple(entries), policy)
