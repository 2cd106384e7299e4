import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from femtorelay.channel import (
    NetworkGeometry,
    Placement,
    PropagationParams,
    ShadowGains,
    SnrTriplet,
    placement_from_variates,
    sample_placement,
    sample_shadowing,
    snr_batch,
    snr_triplet,
)

GEOM = NetworkGeometry(s_o=150.0, r_m=200.0, r_f=20.0)
NO_SHADOW = PropagationParams(alpha=3.0, shadow_sigma_db=0.0, d_min=1.0, rx_snr_db=10.0)


def _place(u):
    return Placement(u_pos=u, v_pos=(150.0, 0.0))


class TestValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [dict(s_o=-1.0), dict(r_m=0.0), dict(r_f=0.0), dict(r_f=200.0), dict(s_o=math.inf)],
    )
    def test_bad_geometry(self, kwargs):
        with pytest.raises(ValueError):
            NetworkGeometry(**kwargs)

    @pytest.mark.parametrize(
        "kwargs",
        [dict(alpha=1.9), dict(shadow_sigma_db=-1.0), dict(d_min=0.0), dict(rx_snr_db=math.nan)],
    )
    def test_bad_propagation(self, kwargs):
        with pytest.raises(ValueError):
            PropagationParams(**kwargs)

    def test_bad_snr(self):
        with pytest.raises(ValueError):
            SnrTriplet(-1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            SnrTriplet(math.inf, 1.0, 1.0)

    @pytest.mark.parametrize("g", [math.nan, math.inf, 0.0])
    def test_rejects_bad_shadow(self, g):
        with pytest.raises(ValueError):
            snr_triplet(_place((100.0, 0.0)), GEOM, NO_SHADOW, ShadowGains(uf=g))


class TestPlacement:
    def test_inside_disks(self):
        rng = np.random.default_rng(1)
        for _ in range(2000):
            p = sample_placement(rng, GEOM)
            assert math.hypot(*p.u_pos) <= GEOM.r_m + 1e-9
            assert math.hypot(p.v_pos[0] - GEOM.s_o, p.v_pos[1]) <= GEOM.r_f + 1e-9

    def test_deterministic(self):
        a = sample_placement(np.random.default_rng(5), GEOM)
        b = sample_placement(np.random.default_rng(5), GEOM)
        assert a == b

    def test_tiny_macro_disk_collapses_to_origin(self):
        geom = NetworkGeometry(s_o=150.0, r_m=1e-12, r_f=1e-13)
        p = sample_placement(np.random.default_rng(0), geom)
        assert math.hypot(*p.u_pos) <= 1e-12

    def test_area_uniform_radius(self):
        # (100/200)^2 of the disk area lies inside radius 100.
        rng = np.random.default_rng(2024)
        radii = np.array([math.hypot(*placement_from_variates(u, GEOM).u_pos) for u in rng.random((100_000, 4))])
        assert abs(np.mean(radii <= 100.0) - 0.25) <= 0.005

    def test_radius_cdf_ks(self):
        rng = np.random.default_rng(7)
        radii = np.array([math.hypot(*placement_from_variates(u, GEOM).u_pos) for u in rng.random((100_000, 4))])
        ks = stats.kstest(radii, lambda r: np.clip(r / GEOM.r_m, 0, 1) ** 2)
        assert ks.statistic < 0.01

    def test_angle_uniform(self):
        rng = np.random.default_rng(8)
        pts = np.array([placement_from_variates(u, GEOM).u_pos for u in rng.random((20_000, 4))])
        angles = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * np.pi)
        assert stats.kstest(angles / (2 * np.pi), "uniform").statistic < 0.015


class TestSnrTriplet:
    def test_equidistant(self):
        snr = snr_triplet(_place((75.0, 0.0)), GEOM, NO_SHADOW)
        assert snr.gamma_uf == pytest.approx(10.0, rel=1e-12)
        assert (snr.gamma_vf, snr.gamma_ub) == (10.0, 10.0)

    def test_hand_value(self):
        # 10 * (100 / 50)^3
        snr = snr_triplet(_place((100.0, 0.0)), GEOM, NO_SHADOW)
        assert snr.gamma_uf == pytest.approx(80.0, rel=1e-12)

    def test_clamp_at_fbs(self):
        # d_UF clamps to 1 m: 10 * 150^3
        snr = snr_triplet(_place((150.0, 0.0)), GEOM, NO_SHADOW)
        assert snr.gamma_uf == pytest.approx(3.375e7, rel=1e-12)

    def test_shadowing_ratio(self):
        shadow = ShadowGains(ub=2.0, uf=5.0, vf=0.1)
        snr = snr_triplet(_place((100.0, 0.0)), GEOM, NO_SHADOW, shadow)
        assert snr.gamma_uf == pytest.approx(80.0 * 5.0 / 2.0, rel=1e-12)
        assert snr.gamma_vf == snr.gamma_ub == 10.0

    @given(
        x=st.floats(-200, 200),
        y=st.floats(-200, 200),
        k=st.floats(1e-9, 1e9),
        log_g=st.lists(st.floats(-3, 3), min_size=3, max_size=3),
    )
    def test_path_constant_cancels(self, x, y, k, log_g):
        shadow = ShadowGains(*(10.0**g for g in log_g))
        base = snr_triplet(_place((x, y)), GEOM, NO_SHADOW, shadow)
        scaled = snr_triplet(_place((x, y)), GEOM, NO_SHADOW, shadow, k=k)
        assert scaled.gamma_uf == pytest.approx(base.gamma_uf, rel=1e-13)

    @given(
        x=st.floats(-200, 200),
        y=st.floats(-200, 200),
        log_g=st.lists(st.floats(-3, 3), min_size=3, max_size=3),
        snr_db=st.floats(-20, 40),
    )
    def test_power_control(self, x, y, log_g, snr_db):
        params = PropagationParams(shadow_sigma_db=8.0, rx_snr_db=snr_db)
        snr = snr_triplet(_place((x, y)), GEOM, params, ShadowGains(*(10.0**g for g in log_g)))
        assert snr.gamma_vf == snr.gamma_ub == params.rx_snr

    def test_monotone_in_distances(self):
        # Along the x axis between the stations: moving toward the FBS shrinks
        # d_UF and grows d_UB, so gamma_uf must increase strictly.
        xs = np.linspace(2.0, 148.0, 300)
        g = [snr_triplet(_place((x, 0.0)), GEOM, NO_SHADOW).gamma_uf for x in xs]
        assert np.all(np.diff(g) > 0)
        # Fixed d_UB (circle around the MBS): gamma_uf falls as d_UF grows.
        angles = np.linspace(0.01, np.pi, 300)
        g = [snr_triplet(_place((100 * np.cos(a), 100 * np.sin(a))), GEOM, NO_SHADOW).gamma_uf for a in angles]
        assert np.all(np.diff(g) < 0)


class TestShadowing:
    def test_off_gives_unit_gains(self):
        g = sample_shadowing(np.random.default_rng(0), NO_SHADOW)
        assert (g.ub, g.uf, g.vf) == (1.0, 1.0, 1.0)

    def test_log_normal_spread(self):
        params = PropagationParams(shadow_sigma_db=8.0)
        rng = np.random.default_rng(3)
        db = np.array([10 * np.log10(sample_shadowing(rng, params).uf) for _ in range(20_000)])
        assert abs(db.mean()) < 0.2
        assert db.std() == pytest.approx(8.0, rel=0.02)


def test_batch_matches_scalar():
    rng = np.random.default_rng(11)
    params = PropagationParams(shadow_sigma_db=8.0, rx_snr_db=7.0)
    u = rng.random((500, 4))
    n = rng.standard_normal((500, 3))
    guf, gvf, gub = snr_batch(u, n, GEOM, params)
    for i in range(500):
        p = placement_from_variates(u[i], GEOM)
        g = ShadowGains(*(10.0 ** (8.0 * z / 10.0) for z in n[i]))
        ref = snr_triplet(p, GEOM, params, g)
        assert guf[i] == pytest.approx(ref.gamma_uf, rel=1e-12)
        assert gvf[i] == ref.gamma_vf and gub[i] == ref.gamma_ub
