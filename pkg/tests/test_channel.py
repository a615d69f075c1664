import math

import numpy as np
import pytest

from mmwdiv.arraygeom import ArrayGeometry, Direction
from mmwdiv.channel import (
    PathSpec,
    ShadowingEvent,
    base_gain,
    friis_path_loss_db,
    instantaneous_gain,
    quantize_delay_chips,
    shadow_attenuation_db,
    snapshot,
)

F0 = 60e9
CHIP_S = 0.57e-9
# frozen from a high-precision evaluation of 20*log10(4*pi*d*f/c)
PL_7M_DB = 84.90675799400669
PL_CEIL_DB = 86.13393076015010
CEIL_LEN_M = 8.06225774829855


class TestFriis:
    def test_unit_argument_is_zero_db(self):
        d = 3e8 / (4 * math.pi * F0)
        assert friis_path_loss_db(d, F0) == pytest.approx(0.0, abs=1e-9)

    def test_seven_meters_at_sixty_ghz(self):
        assert friis_path_loss_db(7.0, F0) == pytest.approx(PL_7M_DB, abs=1e-9)

    def test_distance_doubling_adds_six_db(self):
        diff = friis_path_loss_db(14.0, F0) - friis_path_loss_db(7.0, F0)
        assert diff == pytest.approx(20.0 * math.log10(2.0), abs=1e-12)

    def test_rejects_nonpositive_distance(self):
        with pytest.raises(ValueError):
            friis_path_loss_db(0.0, F0)

    def test_strictly_decreasing_gain_with_distance(self):
        gains = [base_gain(d, 0.0, F0) for d in (1.0, 2.0, 5.0, 7.0, 20.0)]
        assert all(a > b for a, b in zip(gains, gains[1:]))


class TestBaseGain:
    def test_zero_loss_gives_unity(self):
        d = 3e8 / (4 * math.pi * F0)
        assert base_gain(d, 0.0, F0) == pytest.approx(1.0, rel=1e-12)

    def test_los_path(self):
        assert base_gain(7.0, 0.0, F0) == pytest.approx(10 ** (-PL_7M_DB / 20), rel=1e-9)

    def test_ceiling_path_with_reflection_loss(self):
        expected = 10 ** (-(PL_CEIL_DB + 8.0) / 20)
        assert base_gain(CEIL_LEN_M, 8.0, F0) == pytest.approx(expected, rel=1e-9)


class TestDelayQuantization:
    def test_equal_lengths(self):
        assert quantize_delay_chips(7.0, 7.0, CHIP_S) == 0

    def test_ceiling_bounce_is_six_chips(self):
        assert quantize_delay_chips(CEIL_LEN_M, 7.0, CHIP_S) == 6

    def test_half_meter_excess(self):
        # 0.5 m / 3e8 / 0.57 ns = 2.924 chips
        assert quantize_delay_chips(7.5, 7.0, CHIP_S) == 3

    def test_rounds_half_away_from_zero(self):
        # excess of exactly 2.5 chips
        assert quantize_delay_chips(7.0 + 2.5 * CHIP_S * 3e8, 7.0, CHIP_S) == 3

    def test_rejects_shorter_path(self):
        with pytest.raises(ValueError):
            quantize_delay_chips(6.9, 7.0, CHIP_S)


class TestShadowAttenuation:
    def setup_method(self):
        self.ev = ShadowingEvent(path_index=1, start_s=0.4)

    def test_zero_before_start(self):
        assert shadow_attenuation_db(self.ev, 0.39) == 0.0
        assert shadow_attenuation_db(self.ev, -5.0) == 0.0

    def test_peak_at_end_of_decay(self):
        assert shadow_attenuation_db(self.ev, 0.4 + 0.0557) == pytest.approx(23.3, abs=1e-9)

    def test_ramp_midpoint(self):
        assert shadow_attenuation_db(self.ev, 0.4 + 0.0557 / 2) == pytest.approx(11.65, abs=1e-9)

    def test_hold_and_recovery(self):
        assert shadow_attenuation_db(self.ev, 0.7) == pytest.approx(23.3, abs=1e-12)
        t_mid_rise = 0.4 + 0.664 - 0.0318 / 2
        assert shadow_attenuation_db(self.ev, t_mid_rise) == pytest.approx(11.65, abs=1e-9)
        assert shadow_attenuation_db(self.ev, 0.4 + 0.664) == 0.0
        assert shadow_attenuation_db(self.ev, 2.0) == 0.0

    def test_continuity_on_microsecond_grid(self):
        t = np.arange(0.395, 0.4 + 0.664 + 0.005, 1e-6)
        a = np.array([shadow_attenuation_db(self.ev, ti) for ti in t])
        assert np.max(np.abs(np.diff(a))) < 0.01

    def test_monotone_ramps(self):
        decay = np.arange(0.4, 0.4 + 0.0557, 1e-4)
        rise = np.arange(0.4 + 0.664 - 0.0318, 0.4 + 0.664, 1e-4)
        a_decay = [shadow_attenuation_db(self.ev, ti) for ti in decay]
        a_rise = [shadow_attenuation_db(self.ev, ti) for ti in rise]
        assert all(x <= y for x, y in zip(a_decay, a_decay[1:]))
        assert all(x >= y for x, y in zip(a_rise, a_rise[1:]))

    def test_rejects_ramps_longer_than_total(self):
        with pytest.raises(ValueError):
            ShadowingEvent(path_index=1, start_s=0.0, decay_s=0.5, total_s=0.6, rise_s=0.2)


def los_path():
    return PathSpec.from_geometry(
        index=1,
        tx_direction=Direction(0.0, 0.0),
        rx_direction=Direction(math.pi, 0.0),
        length_m=7.0,
        reflection_loss_db=0.0,
        carrier_hz=F0,
        chip_s=CHIP_S,
    )


class TestInstantaneousGain:
    def test_no_events(self):
        path = los_path()
        assert instantaneous_gain(path, [], 0.5) == path.base_gain

    def test_full_attenuation(self):
        path = los_path()
        ev = ShadowingEvent(path_index=1, start_s=0.0)
        got = instantaneous_gain(path, [ev], 0.1)  # within the hold
        assert got == pytest.approx(path.base_gain * 10 ** (-23.3 / 20), rel=1e-12)

    def test_two_ten_db_events_add(self):
        path = los_path()
        events = [
            ShadowingEvent(path_index=1, start_s=0.0, max_attenuation_db=10.0),
            ShadowingEvent(path_index=1, start_s=0.0, max_attenuation_db=10.0),
        ]
        got = instantaneous_gain(path, events, 0.1)
        assert got == pytest.approx(path.base_gain * 0.1, rel=1e-12)

    def test_event_on_other_path_ignored(self):
        path = los_path()
        ev = ShadowingEvent(path_index=2, start_s=0.0)
        assert instantaneous_gain(path, [ev], 0.1) == path.base_gain

    def test_bounded_by_base_gain(self):
        path = los_path()
        ev = ShadowingEvent(path_index=1, start_s=0.0)
        for t in np.linspace(-0.1, 0.8, 97):
            g = instantaneous_gain(path, [ev], t)
            assert 0.0 < g <= path.base_gain


class TestSnapshot:
    def ceiling_path(self, loss_db=8.0):
        elev = math.atan2(2.0, 3.5)
        return PathSpec.from_geometry(
            index=2,
            tx_direction=Direction(0.0, elev),
            rx_direction=Direction(math.pi, elev),
            length_m=CEIL_LEN_M,
            reflection_loss_db=loss_db,
            carrier_hz=F0,
            chip_s=CHIP_S,
            los_length_m=7.0,
        )

    def test_single_path_scalar_arrays(self):
        one = ArrayGeometry.uniform_linear(1, 2.5e-3)
        d = 3e8 / (4 * math.pi * F0)  # unit-gain distance
        path = PathSpec.from_geometry(
            index=1,
            tx_direction=Direction(0.0, 0.0),
            rx_direction=Direction(math.pi, 0.0),
            length_m=d,
            reflection_loss_db=0.0,
            carrier_hz=F0,
            chip_s=CHIP_S,
        )
        snap = snapshot([path], one, one, [], 0.0, F0)
        np.testing.assert_allclose(snap.matrices[0], [[1.0 + 0.0j]], rtol=1e-9)

    def test_rank_one_and_frobenius_norm(self):
        geom = ArrayGeometry.uniform_linear(20, 2.5e-3, (0, 0, 1))
        paths = [los_path(), self.ceiling_path()]
        snap = snapshot(paths, geom, geom, [], 0.0, F0)
        for l, path in enumerate(paths):
            s = np.linalg.svd(snap.matrices[l], compute_uv=False)
            assert s[1] < 1e-10 * s[0]
            fro = np.linalg.norm(snap.matrices[l])
            assert fro == pytest.approx(20.0 * path.base_gain, rel=1e-9)

    def test_gain_scaling_scales_frobenius_exactly(self):
        geom = ArrayGeometry.uniform_linear(8, 2.5e-3, (0, 0, 1))
        paths = [los_path()]
        ev = ShadowingEvent(path_index=1, start_s=0.0, max_attenuation_db=20.0)
        clear = snapshot(paths, geom, geom, [], 0.1, F0)
        blocked = snapshot(paths, geom, geom, [ev], 0.1, F0)
        ratio = np.linalg.norm(blocked.matrices[0]) / np.linalg.norm(clear.matrices[0])
        assert ratio == pytest.approx(0.1, rel=1e-12)

    def test_empty_path_list(self):
        geom = ArrayGeometry.uniform_linear(2, 2.5e-3)
        with pytest.raises(ValueError):
            snapshot([], geom, geom, [], 0.0, F0)


class TestPathSpec:
    def test_los_must_have_zero_loss_and_delay(self):
        with pytest.raises(ValueError):
            PathSpec(
                index=1,
                tx_direction=Direction(0.0, 0.0),
                rx_direction=Direction(math.pi, 0.0),
                length_m=7.0,
                reflection_loss_db=8.0,
                delay_chips=0,
                base_gain=1e-5,
            )

    def test_validate_against_detects_inconsistency(self):
        path = PathSpec(
            index=1,
            tx_direction=Direction(0.0, 0.0),
            rx_direction=Direction(math.pi, 0.0),
            length_m=7.0,
            reflection_loss_db=0.0,
            delay_chips=0,
            base_gain=1e-3,  # wrong for 7 m at 60 GHz
        )
        with pytest.raises(ValueError):
            path.validate_against(F0)

    def test_from_geometry_is_consistent(self):
        los_path().validate_against(F0)
