"""Link-level channel model: path-loss gain, OFDM sub-channel capacity and
the channel-aware compression ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChannelParams",
    "LinkState",
    "THERMAL_NOISE_W_PER_HZ",
    "FADING_CAP",
    "channel_gain",
    "subchannel_capacity",
    "link_capacity",
    "compression_ratio",
]

# -174 dBm/Hz
THERMAL_NOISE_W_PER_HZ = 10 ** (-174 / 10) * 1e-3

# Upper bound on the fading power factor (and floor keeps gains strictly positive).
FADING_CAP = 10.0
_FADING_FLOOR = 1e-6


@dataclass(frozen=True)
class ChannelParams:
    """Shared radio parameters of a scene, in SI units."""

    total_bandwidth_hz: float = 200e6
    num_subchannels: int = 3
    transmit_power_w: float = 8e-3
    noise_density_w_per_hz: float = THERMAL_NOISE_W_PER_HZ
    pathloss_exponent: float = 2.5
    reference_distance_m: float = 1.0
    fading_enabled: bool = False
    frame_window_s: float = 0.1

    def __post_init__(self):
        if not self.total_bandwidth_hz > 0:
            raise ValueError("total_bandwidth_hz must be positive")
        if isinstance(self.num_subchannels, bool) or int(self.num_subchannels) != self.num_subchannels \
                or self.num_subchannels < 1:
            raise ValueError("num_subchannels must be an integer >= 1")
        if not self.transmit_power_w > 0:
            raise ValueError("transmit_power_w must be positive")
        if not self.noise_density_w_per_hz > 0:
            raise ValueError("noise_density_w_per_hz must be positive")
        if not self.pathloss_exponent >= 0:
            raise ValueError("pathloss_exponent must be non-negative")
        if not self.reference_distance_m > 0:
            raise ValueError("reference_distance_m must be positive")
        if not self.frame_window_s > 0:
            raise ValueError("frame_window_s must be positive")

    @property
    def subchannel_bandwidth_hz(self) -> float:
        return self.total_bandwidth_hz / self.num_subchannels


@dataclass(frozen=True)
class LinkState:
    gain: float
    subchannel_capacity_bps: float
    assigned_subchannels: int = 0

    def __post_init__(self):
        if self.gain < 0 or self.subchannel_capacity_bps < 0:
            raise ValueError("gain and capacity must be non-negative")

    @property
    def capacity_bps(self) -> float:
        return self.assigned_subchannels * self.subchannel_capacity_bps


def _fading_power(link_seed: int) -> float:
    # |h|^2 for a unit-power Rayleigh tap is Exp(1): unit mean.
    rng = np.random.default_rng(np.random.SeedSequence(int(link_seed) & (2**63 - 1)))
    return float(min(FADING_CAP, max(_FADING_FLOOR, rng.exponential(1.0))))


def channel_gain(tx_pos, rx_pos, params: ChannelParams, link_seed: int = 0) -> float:
    """Power gain of the link ``tx_pos -> rx_pos``.

    Log-distance path loss ``(d0 / max(d, d0)) ** eta``; when
    ``params.fading_enabled`` the result is multiplied by an exponential
    power factor drawn from ``link_seed`` (same seed, same gain).
    """
    distance = math.dist(tx_pos, rx_pos)
    if distance == 0:
        raise ValueError("coincident transceivers")
    d0 = params.reference_distance_m
    gain = (d0 / max(distance, d0)) ** params.pathloss_exponent
    if params.fading_enabled:
        gain *= _fading_power(link_seed)
    return gain


def subchannel_capacity(gain: float, params: ChannelParams) -> float:
    """Shannon capacity (bit/s) of one of the N equal sub-channels."""
    if gain < 0:
        raise ValueError("gain must be non-negative")
    b = params.subchannel_bandwidth_hz
    snr = gain * params.transmit_power_w / (params.noise_density_w_per_hz * b)
    return b * math.log1p(snr) / math.log(2)


def link_capacity(gain: float, params: ChannelParams, subchannels: int) -> float:
    return subchannels * subchannel_capacity(gain, params)


def compression_ratio(capacity_bps: float, data_volume_bits: float, frame_window_s: float) -> float:
    """Fraction of a frame deliverable within ``frame_window_s``, clamped to [0, 1]."""
    if data_volume_bits <= 0:
        raise ValueError("empty payload")
    if capacity_bps < 0:
        raise ValueError("capacity must be non-negative")
    if frame_window_s <= 0:
        raise ValueError("frame_window_s must be positive")
    return min(1.0, capacity_bps * frame_window_s / data_volume_bits)
