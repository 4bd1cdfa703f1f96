"""Score normalization and the keep/drop rule applied to each collaborator."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .geometry import Disc, collaborative_score

__all__ = [
    "JudgerPolicy",
    "Reason",
    "JudgerDecision",
    "FleetJudgement",
    "normalize_scores",
    "judge",
    "filter_fleet",
]


@dataclass(frozen=True)
class JudgerPolicy:
    score_threshold_3cav: float = 0.4
    score_threshold_4cav: float = 0.3
    distance_fraction: float = 0.5

    def __post_init__(self):
        for name in ("score_threshold_3cav", "score_threshold_4cav"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not 0.0 < self.distance_fraction <= 1.0:
            raise ValueError("distance_fraction must lie in (0, 1]")

    def threshold(self, collaborator_count: int) -> float:
        # only the 3- and 4-vehicle cases are calibrated; extend to the nearest one
        return self.score_threshold_3cav if collaborator_count <= 3 else self.score_threshold_4cav


class Reason(str, Enum):
    KEPT = "kept"
    LOW_SCORE_AND_FAR = "low_score_and_far"
    EGO_ALWAYS_KEPT = "ego_always_kept"


@dataclass(frozen=True)
class JudgerDecision:
    cav_id: str
    kept: bool
    normalized_score: float
    distance_m: float
    reason: Reason

    def __post_init__(self):
        if self.kept == (self.reason is Reason.LOW_SCORE_AND_FAR):
            raise ValueError("a decision drops a CAV only for low_score_and_far")


@dataclass
class FleetJudgement:
    """Output of :func:`filter_fleet`.

    ``raw_scores`` maps each non-ego id to its collaborative-gain area;
    ``score_evaluations`` counts calls to the geometric scorer.
    """

    decisions: list
    raw_scores: dict
    score_evaluations: int

    @property
    def kept_ids(self) -> set:
        return {d.cav_id for d in self.decisions if d.kept and d.reason is not Reason.EGO_ALWAYS_KEPT}


def normalize_scores(raw_scores) -> list:
    """Divide by the scene maximum; an all-zero scene stays all-zero."""
    raw = [float(s) for s in raw_scores]
    if any(s < 0 for s in raw):
        raise ValueError("raw scores must be non-negative")
    top = max(raw, default=0.0)
    if top == 0:
        return [0.0] * len(raw)
    return [s / top for s in raw]


def judge(normalized_score: float, distance_m: float, collaborator_count: int, d_max: float,
          policy: JudgerPolicy = JudgerPolicy(), cav_id: str = "") -> JudgerDecision:
    """Drop a collaborator only when its score is low *and* it is far."""
    low = normalized_score < policy.threshold(collaborator_count)
    far = distance_m > policy.distance_fraction * d_max
    if low and far:
        return JudgerDecision(cav_id, False, normalized_score, distance_m, Reason.LOW_SCORE_AND_FAR)
    return JudgerDecision(cav_id, True, normalized_score, distance_m, Reason.KEPT)


def filter_fleet(fleet, ego_id: str, d_max: float, policy: JudgerPolicy = JudgerPolicy()) -> FleetJudgement:
    """Score, normalize and judge every collaborator in one linear pass.

    ``fleet`` is a sequence of objects with ``id``, ``x_m``, ``y_m`` and
    ``sensing_radius_m`` attributes. The ego comes first in the output.
    """
    egos = [v for v in fleet if v.id == ego_id]
    if len(egos) != 1:
        raise ValueError(f"expected exactly one ego {ego_id!r}, found {len(egos)}")
    ego = egos[0]
    ego_disc = Disc((ego.x_m, ego.y_m), ego.sensing_radius_m)

    others = [v for v in fleet if v.id != ego_id]
    raw, distances = [], []
    evaluations = 0
    for v in others:
        disc = Disc((v.x_m, v.y_m), v.sensing_radius_m)
        raw.append(collaborative_score(disc, ego_disc, d_max))
        evaluations += 1
        distances.append(math.dist(disc.center, ego_disc.center))

    normalized = normalize_scores(raw)
    count = len(fleet)
    decisions = [JudgerDecision(ego.id, True, 0.0, 0.0, Reason.EGO_ALWAYS_KEPT)]
    decisions += [judge(n, d, count, d_max, policy, cav_id=v.id)
                  for v, n, d in zip(others, normalized, distances)]
    return FleetJudgement(decisions, {v.id: s for v, s in zip(others, raw)}, evaluations)
