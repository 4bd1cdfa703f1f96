import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coopercept.channel import (
    FADING_CAP,
    ChannelParams,
    LinkState,
    channel_gain,
    compression_ratio,
    link_capacity,
    subchannel_capacity,
)

DESK = ChannelParams(total_bandwidth_hz=200e6, num_subchannels=3, transmit_power_w=8e-3,
                     noise_density_w_per_hz=1e-12)

# mpmath, 40 digits: (2e8/3) * log2(1 + 8e-3 / (1e-12 * 2e8/3)) = (2e8/3) * log2(121)
CAPACITY_UNIT_GAIN = 461257549.15163963416


def mp_capacity(gain, p):
    mp.mp.dps = 40
    b = mp.mpf(p.total_bandwidth_hz) / p.num_subchannels
    return b * mp.log(1 + mp.mpf(gain) * mp.mpf(p.transmit_power_w) / (mp.mpf(p.noise_density_w_per_hz) * b), 2)


class TestChannelGain:
    def test_reference_distance_is_unity(self):
        assert channel_gain((0, 0), (1, 0), ChannelParams()) == 1.0

    def test_inverse_square_at_ten(self):
        p = ChannelParams(pathloss_exponent=2.0)
        assert channel_gain((0, 0), (10, 0), p) == pytest.approx(0.01, rel=1e-15)

    def test_fifty_metres(self):
        # 50 ** -2.5 evaluated with mpmath at 40 digits
        assert channel_gain((0, 0), (30, 40), ChannelParams()) == pytest.approx(5.656854249492380195e-05, rel=1e-14)

    def test_below_reference_distance_is_clamped(self):
        p = ChannelParams(reference_distance_m=5.0)
        assert channel_gain((0, 0), (2, 0), p) == 1.0

    def test_coincident(self):
        with pytest.raises(ValueError, match="coincident transceivers"):
            channel_gain((3, 4), (3, 4), ChannelParams())

    @given(st.floats(1e-3, 1e4), st.floats(1e-3, 1e4), st.floats(0, 5))
    def test_non_increasing_in_distance(self, d1, d2, eta):
        p = ChannelParams(pathloss_exponent=eta)
        near, far = sorted((d1, d2))
        assert channel_gain((0, 0), (near, 0), p) >= channel_gain((0, 0), (far, 0), p)

    def test_fading_is_seeded(self):
        p = ChannelParams(fading_enabled=True)
        a = channel_gain((0, 0), (50, 0), p, link_seed=11)
        assert a == channel_gain((0, 0), (50, 0), p, link_seed=11)
        assert a != channel_gain((0, 0), (50, 0), p, link_seed=12)

    def test_fading_range_and_unit_mean(self):
        p = ChannelParams(fading_enabled=True, pathloss_exponent=0.0)
        draws = [channel_gain((0, 0), (5, 0), p, link_seed=s) for s in range(4000)]
        assert all(0 < g <= FADING_CAP for g in draws)
        assert sum(draws) / len(draws) == pytest.approx(1.0, abs=0.06)


class TestSubchannelCapacity:
    def test_zero_gain(self):
        assert subchannel_capacity(0.0, DESK) == 0.0

    def test_unit_gain_desk_values(self):
        assert subchannel_capacity(1.0, DESK) == pytest.approx(CAPACITY_UNIT_GAIN, rel=1e-13)

    def test_doubling_gain_increases(self):
        assert subchannel_capacity(2.0, DESK) > subchannel_capacity(1.0, DESK)

    def test_matches_high_precision(self):
        for gain in (1e-9, 1e-5, 0.3, 1.0, 17.0):
            assert subchannel_capacity(gain, DESK) == pytest.approx(float(mp_capacity(gain, DESK)), rel=1e-13)

    @given(st.floats(1e-8, 1e2), st.floats(1.001, 10))
    def test_strictly_increasing_in_gain_and_power(self, gain, factor):
        assert subchannel_capacity(gain * factor, DESK) > subchannel_capacity(gain, DESK)
        hotter = ChannelParams(**{**vars(DESK), "transmit_power_w": DESK.transmit_power_w * factor})
        assert subchannel_capacity(gain, hotter) > subchannel_capacity(gain, DESK)

    @given(st.floats(1e6, 1e10), st.floats(1.01, 10), st.floats(1e-8, 1.0))
    def test_weakly_increasing_in_bandwidth(self, w, factor, gain):
        p = ChannelParams(total_bandwidth_hz=w, noise_density_w_per_hz=1e-15)
        q = ChannelParams(total_bandwidth_hz=w * factor, noise_density_w_per_hz=1e-15)
        assert subchannel_capacity(gain, q) >= subchannel_capacity(gain, p)

    @pytest.mark.parametrize("k", [0, 1, 2, 3, 7])
    def test_aggregate_is_k_times(self, k):
        assert link_capacity(0.01, DESK, k) == k * subchannel_capacity(0.01, DESK)
        assert LinkState(0.01, subchannel_capacity(0.01, DESK), k).capacity_bps == link_capacity(0.01, DESK, k)

    def test_negative_gain_rejected(self):
        with pytest.raises(ValueError):
            subchannel_capacity(-1.0, DESK)


class TestCompressionRatio:
    def test_exact_fit(self):
        assert compression_ratio(1e9, 1e8, 0.1) == 1.0

    def test_desk_example(self):
        assert compression_ratio(CAPACITY_UNIT_GAIN, 1e8, 0.1) == pytest.approx(0.46125754915163963, rel=1e-13)

    def test_clamped(self):
        assert compression_ratio(1e10, 1e8, 0.1) == 1.0

    def test_empty_payload(self):
        with pytest.raises(ValueError, match="empty payload"):
            compression_ratio(1e6, 0, 0.1)

    @settings(max_examples=300)
    @given(st.floats(0, 1e12), st.floats(1, 1e12), st.floats(1e-4, 10))
    def test_in_unit_interval(self, c, v, t):
        assert 0.0 <= compression_ratio(c, v, t) <= 1.0


@pytest.mark.parametrize("field, value", [
    ("total_bandwidth_hz", 0.0),
    ("num_subchannels", 0),
    ("num_subchannels", 2.5),
    ("transmit_power_w", -1.0),
    ("noise_density_w_per_hz", 0.0),
    ("pathloss_exponent", -0.1),
    ("frame_window_s", 0.0),
])
def test_params_invariants(field, value):
    with pytest.raises(ValueError):
        ChannelParams(**{field: value})


def test_thermal_noise_default():
    assert 10 * math.log10(ChannelParams().noise_density_w_per_hz / 1e-3) == pytest.approx(-174.0)
