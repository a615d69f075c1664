import math

import numpy as np
import pytest

from mmwdiv.beamform import (
    AwvPair,
    DegenerateGeometryError,
    Scheme,
    eg_apc_gain_closed,
    eg_awv_apc,
    eg_awv_pc,
    eg_gain_targets,
    ms_awv,
    non_diversity_awv,
    phase_only,
    received_power_dbm,
    total_power_gain,
    verify_ms_optimality,
)
from mmwdiv.channel import ChannelSnapshot
from mmwdiv.scenario import office_scenario, _matrices


def dft_steering(n_ant, n_paths):
    "Exactly orthogonal unit-modulus columns."
    i = np.arange(n_ant)
    return np.stack(
        [np.exp(-2j * np.pi * i * l / n_ant) for l in range(n_paths)], axis=1
    )


def random_steering(rng, n_ant, n_paths, min_sv=0.3):
    "Random unit-modulus columns, resampled until well conditioned."
    while True:
        cols = np.exp(2j * np.pi * rng.random((n_ant, n_paths)))
        s = np.linalg.svd(cols / math.sqrt(n_ant), compute_uv=False)
        if s[-1] > min_sv:
            return cols


def snapshot_from(cols_h, cols_g, gains):
    gains = np.asarray(gains, dtype=float)
    mats = np.stack(
        [gains[l] * np.outer(cols_g[:, l], cols_h[:, l]) for l in range(gains.size)]
    )
    return ChannelSnapshot(time_s=0.0, gains=gains, matrices=mats)


class TestGainTargets:
    def test_single_path_square_arrays(self):
        t = eg_gain_targets([0.37], 8, 8)
        assert t.alpha[0] == pytest.approx(1.0, rel=1e-12)
        assert t.beta[0] == pytest.approx(1.0, rel=1e-12)

    def test_two_paths(self):
        t = eg_gain_targets([1.0, 0.5], 4, 4)
        np.testing.assert_allclose(t.alpha, [math.sqrt(0.75), math.sqrt(1.5)], rtol=1e-12)
        np.testing.assert_allclose(t.alpha * t.beta * [1.0, 0.5], 0.75, rtol=1e-12)

    def test_asymmetric_arrays_scale_targets(self):
        sym = eg_gain_targets([1.0, 0.5], 4, 4)
        asym = eg_gain_targets([1.0, 0.5], 4, 1)
        np.testing.assert_allclose(asym.alpha, 2 * sym.alpha, rtol=1e-12)
        np.testing.assert_allclose(asym.beta, sym.beta / 2, rtol=1e-12)
        np.testing.assert_allclose(asym.alpha / asym.beta, 4.0, rtol=1e-9)

    def test_rejects_nonpositive_gain(self):
        with pytest.raises(ValueError):
            eg_gain_targets([1.0, 0.0], 4, 4)


class TestApcWeights:
    def test_rank_one_closed_form(self):
        rng = np.random.default_rng(0)
        h = np.exp(2j * np.pi * rng.random((16, 1)))
        g = np.exp(2j * np.pi * rng.random((16, 1)))
        targets = eg_gain_targets([2.5e-5], 16, 16)
        pair = eg_awv_apc(h, g, targets)
        np.testing.assert_allclose(pair.w_t, np.conj(h[:, 0]) * targets.alpha[0] / 16, atol=1e-12)
        assert pair.scheme is Scheme.EG_APC

    def test_constraints_met_on_random_instances(self):
        rng = np.random.default_rng(1)
        for _ in range(25):
            n = int(rng.integers(1, 5))
            n_t = int(rng.integers(n, 33))
            n_r = int(rng.integers(n, 33))
            h = random_steering(rng, n_t, n)
            g = random_steering(rng, n_r, n)
            gains = 10 ** rng.uniform(-5, -3, n)
            targets = eg_gain_targets(gains, n_t, n_r)
            pair = eg_awv_apc(h, g, targets)
            assert np.max(np.abs(h.T @ pair.w_t - targets.alpha)) < 1e-9
            assert np.max(np.abs(g.T @ pair.w_r - targets.beta)) < 1e-9

    def test_coincident_directions_raise(self):
        rng = np.random.default_rng(2)
        h = np.exp(2j * np.pi * rng.random((8, 1)))
        h = np.concatenate([h, h], axis=1)
        targets = eg_gain_targets([1.0, 0.5], 8, 8)
        with pytest.raises(DegenerateGeometryError):
            eg_awv_apc(h, h, targets)

    def test_more_paths_than_antennas_rejected(self):
        rng = np.random.default_rng(3)
        h = np.exp(2j * np.pi * rng.random((2, 3)))
        targets = eg_gain_targets([1.0, 0.5, 0.25], 2, 2)
        with pytest.raises(ValueError):
            eg_awv_apc(h, h, targets)

    def test_paper_scenario_equal_compound_gains(self):
        sc = office_scenario()
        _, _, h, g = _matrices(sc)
        targets = eg_gain_targets(sc.base_gains, 20, 20)
        pair = eg_awv_apc(h, g, targets)
        snap = snapshot_from(h, g, sc.base_gains)
        compound = [abs(pair.w_r @ c @ pair.w_t) for c in snap.matrices]
        assert compound[0] == pytest.approx(compound[1], rel=1e-9)


class TestPcWeights:
    def test_projection_values(self):
        w = np.array([2.0 * np.exp(1j * np.pi / 3), 1.0, -3.0j])
        out = phase_only(w)
        np.testing.assert_allclose(out[0], np.exp(1j * np.pi / 3), atol=1e-12)
        np.testing.assert_allclose(out[1], 1.0, atol=1e-12)
        np.testing.assert_allclose(out[2], -1.0j, atol=1e-12)

    def test_projection_idempotent(self):
        rng = np.random.default_rng(4)
        w = np.exp(2j * np.pi * rng.random(16))
        np.testing.assert_allclose(phase_only(w), w, atol=1e-12)

    def test_zero_entry_maps_to_phase_zero(self):
        out = phase_only(np.array([0.0 + 0.0j, 1.0j]))
        assert out[0] == 1.0 + 0.0j

    def test_keeps_apc_phases(self):
        sc = office_scenario()
        _, _, h, g = _matrices(sc)
        targets = eg_gain_targets(sc.base_gains, 20, 20)
        apc = eg_awv_apc(h, g, targets)
        pc = eg_awv_pc(h, g, targets)
        np.testing.assert_allclose(np.abs(pc.w_t), 1.0, atol=1e-12)
        np.testing.assert_allclose(np.angle(pc.w_t), np.angle(apc.w_t), atol=1e-12)

    def test_targets_not_met_in_paper_scenario(self):
        # the phase-only projection cannot hold the per-path gains at the
        # equal-gain targets
        sc = office_scenario()
        _, _, h, g = _matrices(sc)
        targets = eg_gain_targets(sc.base_gains, 20, 20)
        pc = eg_awv_pc(h, g, targets)
        residual = np.abs(h.T @ pc.w_t - targets.alpha)
        assert np.max(residual) > 0.01 * np.max(targets.alpha)


class TestMsWeights:
    def test_broadside_all_ones(self):
        h = np.ones((8, 1), dtype=complex)
        pair = ms_awv(h, h, 1)
        np.testing.assert_allclose(pair.w_t, np.ones(8), atol=1e-12)

    def test_unit_modulus_and_match(self):
        rng = np.random.default_rng(6)
        h = random_steering(rng, 20, 2)
        g = random_steering(rng, 20, 2)
        pair = ms_awv(h, g, 2)
        np.testing.assert_allclose(np.abs(pair.w_t), 1.0, atol=1e-12)
        assert h[:, 1] @ pair.w_t == pytest.approx(20.0, rel=1e-9)

    def test_index_out_of_range(self):
        h = np.ones((4, 2), dtype=complex)
        with pytest.raises(IndexError):
            ms_awv(h, h, 3)

    def test_non_diversity_is_path_one(self):
        rng = np.random.default_rng(7)
        h = random_steering(rng, 10, 2)
        g = random_steering(rng, 10, 2)
        nd = non_diversity_awv(h, g)
        ms1 = ms_awv(h, g, 1)
        np.testing.assert_array_equal(nd.w_t, ms1.w_t)
        np.testing.assert_array_equal(nd.w_r, ms1.w_r)
        assert nd.scheme is Scheme.NON_DIVERSITY


class TestTotalPowerGain:
    def test_scalar_arrays_single_path(self):
        lam = 3.7e-5
        snap = snapshot_from(np.ones((1, 1)), np.ones((1, 1)), [lam])
        g = total_power_gain(np.ones(1, dtype=complex), np.ones(1, dtype=complex), snap)
        assert g == pytest.approx(lam**2, rel=1e-12)

    def test_scale_invariance(self):
        rng = np.random.default_rng(8)
        h = random_steering(rng, 12, 2)
        g = random_steering(rng, 12, 2)
        snap = snapshot_from(h, g, [1e-4, 5e-5])
        pair = ms_awv(h, g, 1)
        base = total_power_gain(pair.w_t, pair.w_r, snap)
        scaled = total_power_gain(3j * pair.w_t, (0.2 - 0.7j) * pair.w_r, snap)
        assert scaled == pytest.approx(base, rel=1e-12)

    def test_ms_on_orthogonal_steering(self):
        h = dft_steering(16, 3)
        g = dft_steering(16, 3)
        gains = [1e-4, 5e-5, 2e-5]
        snap = snapshot_from(h, g, gains)
        for k, lam in enumerate(gains, start=1):
            pair = ms_awv(h, g, k)
            got = total_power_gain(pair.w_t, pair.w_r, snap)
            assert got == pytest.approx(lam**2 * 16 * 16, rel=1e-9)

    def test_zero_weights_rejected(self):
        snap = snapshot_from(np.ones((1, 1)), np.ones((1, 1)), [1.0])
        with pytest.raises(ValueError):
            total_power_gain(np.zeros(1), np.ones(1), snap)


class TestClosedFormGain:
    def test_matches_general_form_on_random_instances(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            n = int(rng.integers(1, 5))
            n_t = int(rng.integers(n, 33))
            n_r = int(rng.integers(n, 33))
            h = random_steering(rng, n_t, n)
            g = random_steering(rng, n_r, n)
            base = 10 ** rng.uniform(-5, -3, n)
            inst = base * rng.uniform(0.05, 1.0, n)
            targets = eg_gain_targets(base, n_t, n_r)
            pair = eg_awv_apc(h, g, targets)
            snap = snapshot_from(h, g, inst)
            general = total_power_gain(pair.w_t, pair.w_r, snap)
            closed = eg_apc_gain_closed(base, inst, pair, n_t, n_r)
            assert closed == pytest.approx(general, rel=1e-9)

    def test_non_shadowed_numerator_reduces_to_mean_gain(self):
        # with every path at its stored gain the compound amplitudes all
        # equal the mean gain, so the total is N * lbar^2 over the weight
        # norms (in the unit-norm steering convention)
        rng = np.random.default_rng(11)
        h = random_steering(rng, 24, 3)
        g = random_steering(rng, 24, 3)
        base = np.array([1e-4, 5e-5, 2.5e-5])
        targets = eg_gain_targets(base, 24, 24)
        awv = eg_awv_apc(h, g, targets)
        lbar = base.mean()
        wt2 = np.vdot(awv.w_t, awv.w_t).real
        wr2 = np.vdot(awv.w_r, awv.w_r).real
        expected = 3 * lbar**2 / (wt2 * wr2)
        closed = eg_apc_gain_closed(base, base, awv, 24, 24)
        assert closed == pytest.approx(expected, rel=1e-9)

    def test_los_removed_leaves_nlos_terms(self):
        rng = np.random.default_rng(10)
        h = random_steering(rng, 16, 2)
        g = random_steering(rng, 16, 2)
        base = np.array([1e-4, 4e-5])
        targets = eg_gain_targets(base, 16, 16)
        pair = eg_awv_apc(h, g, targets)
        inst = np.array([0.0, base[1]])
        closed = eg_apc_gain_closed(base, inst, pair, 16, 16)
        general = total_power_gain(pair.w_t, pair.w_r, snapshot_from(h, g, inst))
        assert closed == pytest.approx(general, rel=1e-9)

    def test_rejects_non_apc_weights(self):
        h = dft_steering(8, 2)
        pair = ms_awv(h, h, 1)
        with pytest.raises(ValueError):
            eg_apc_gain_closed([1.0, 0.5], [1.0, 0.5], pair, 8, 8)


class TestReceivedPower:
    def test_unit_gain(self):
        assert received_power_dbm(10.0, 1.0) == pytest.approx(10.0, abs=1e-12)

    def test_minus_sixty_db_gain(self):
        assert received_power_dbm(10.0, 1e-6) == pytest.approx(-50.0, abs=1e-12)

    def test_ms_paper_level(self):
        # 10 dBm + 10*log10(400 * lam_los^2), lam_los frozen from the
        # free-space oracle for 7 m at 60 GHz
        lam1 = 5.684105110424833e-05
        assert received_power_dbm(10.0, 400 * lam1**2) == pytest.approx(-48.8862, abs=1e-4)

    def test_rejects_zero_gain(self):
        with pytest.raises(ValueError):
            received_power_dbm(10.0, 0.0)


class TestMsOptimality:
    def test_single_path_trivial(self):
        report = verify_ms_optimality([0.5], trials=100, seed=0)
        assert report.passed
        assert report.selection_gain == pytest.approx(0.25, rel=1e-9)

    def test_two_paths_never_beaten(self):
        report = verify_ms_optimality([1.0, 0.5], trials=100_000, seed=0)
        assert report.passed
        assert report.best_random_gain <= 1.0 + 1e-9
        assert report.selection_gain == pytest.approx(1.0, rel=1e-9)

    def test_equal_gain_allocation_is_suboptimal(self):
        gains = np.array([1.0, 0.5])
        # equal compound gain under the unit-norm constraint
        weights = (1 / gains) / np.linalg.norm(1 / gains)
        objective = float(np.sum(gains**2 * weights**2 * weights**2))
        assert objective < gains.max() ** 2


class TestSchemeOrderings:
    """Gain relations between schemes on the bundled two-path scenario."""

    def cases(self, loss_db):
        sc = office_scenario(reflection_loss_db=loss_db)
        _, _, h, g = _matrices(sc)
        base = sc.base_gains
        blocked = base * np.array([10 ** (-23.3 / 20), 1.0])
        targets = eg_gain_targets(base, 20, 20)
        apc = eg_awv_apc(h, g, targets)
        pc = eg_awv_pc(h, g, targets)
        out = {}
        for case, gains in (("nb", base), ("blk", blocked)):
            snap = snapshot_from(h, g, gains)
            k = int(np.argmax(gains)) + 1
            out[case] = {
                "ms": total_power_gain(*_wpair(ms_awv(h, g, k)), snap),
                "nd": total_power_gain(*_wpair(non_diversity_awv(h, g)), snap),
                "eg_apc": total_power_gain(*_wpair(apc), snap),
                "eg_pc": total_power_gain(*_wpair(pc), snap),
            }
        return out

    @pytest.mark.parametrize("loss_db", [0.0, 8.0, 16.0])
    def test_ms_never_below_equal_gain(self, loss_db):
        gains = self.cases(loss_db)
        assert gains["nb"]["ms"] == pytest.approx(gains["nb"]["nd"], rel=1e-12)
        assert gains["nb"]["ms"] >= gains["nb"]["eg_apc"]
        assert gains["nb"]["ms"] >= gains["nb"]["eg_pc"]
        assert gains["blk"]["ms"] > gains["blk"]["eg_apc"]
        assert gains["blk"]["ms"] > gains["blk"]["eg_pc"]


def _wpair(pair):
    return pair.w_t, pair.w_r
