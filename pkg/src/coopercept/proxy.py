"""Analytic stand-in for codec + fusion: compression ratio and delay map to
a quality factor, quality and coverage gain map to a proxy AP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ProxyParams",
    "CavContribution",
    "reconstruction_quality",
    "staleness_quality",
    "net_gain",
    "reference_area",
    "proxy_ap",
]


@dataclass(frozen=True)
class ProxyParams:
    """Calibration of the proxy.

    ``ap_single`` is the single-vehicle floor; ``ap_max`` is reached once
    the summed net gain covers the whole annulus between the ego disc and
    the collaborative coverage disc.
    """

    gamma: float = 0.5
    lambda_penalty: float = 0.25
    tau_max_s: float = 0.1
    ap_single: float = 0.409
    ap_max: float = 0.70

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.lambda_penalty >= 0:
            raise ValueError("lambda_penalty must be non-negative")
        if not self.tau_max_s > 0:
            raise ValueError("tau_max_s must be positive")
        if not 0.0 <= self.ap_single < self.ap_max <= 1.0:
            raise ValueError("need 0 <= ap_single < ap_max <= 1")

    @property
    def harmful_quality(self) -> float:
        """Quality below which a contribution turns negative."""
        return self.lambda_penalty / (1.0 + self.lambda_penalty)


@dataclass(frozen=True)
class CavContribution:
    cav_id: str
    quality: float
    raw_score_m2: float
    net_gain_m2: float

    def __post_init__(self):
        if not 0.0 <= self.quality <= 1.0 or self.net_gain_m2 > self.raw_score_m2 + 1e-9:
            raise ValueError(f"invalid contribution {self}")


def reconstruction_quality(alpha: float, gamma: float = 0.5) -> float:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return alpha ** gamma


def staleness_quality(delay_s: float, tau_max_s: float = 0.1) -> float:
    if delay_s < 0:
        raise ValueError("delay must be non-negative")
    return max(0.0, 1.0 - delay_s / tau_max_s)


def net_gain(raw_score_m2: float, quality: float, lambda_penalty: float = 0.25) -> float:
    """Coverage credited to a collaborator: full area at perfect quality,
    a penalty proportional to area at zero quality."""
    return raw_score_m2 * (quality - lambda_penalty * (1.0 - quality))


def reference_area(ego_radius: float, d_max: float) -> float:
    if ego_radius > d_max:
        raise ValueError("ego radius exceeds MCSC")
    return math.pi * (d_max ** 2 - ego_radius ** 2)


def proxy_ap(contributions, ego_radius: float, d_max: float, params: ProxyParams = ProxyParams()) -> float:
    a_ref = reference_area(ego_radius, d_max)
    total = sum(c.net_gain_m2 for c in contributions)
    frac = min(1.0, max(0.0, total / a_ref)) if a_ref > 0 else 0.0
    return params.ap_single + (params.ap_max - params.ap_single) * frac
