"""Rate formulas against hand values and an independent linear-algebra oracle."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from femtorelay.channel import SnrTriplet
from femtorelay.schemes import (
    BackhaulCapacities,
    Order,
    SchemeId,
    beta_eq,
    beta_wzq,
    capacity,
    df_rates,
    dfqsi_rates,
    qf_rates,
    quantization_state,
    scheme_points,
    verify_wzq_identity,
)

REF = SnrTriplet(3.0, 3.0, 3.0)
REF_CAPS = BackhaulCapacities(2.0, 2.0)

gammas = st.floats(0.0, 1e3, allow_nan=False)
snrs = st.builds(SnrTriplet, gammas, gammas, gammas)
c_ups = st.floats(1e-6, 30.0)


def sic_rates(snr, beta, order):
    """MMSE-SIC rates at the MBS observing (y_B, yhat_F); generic linear algebra.

    Receive vectors per user over (y_B, yhat_F); noise covariance diag(1, 1 + beta).
    """
    h_u = np.array([math.sqrt(snr.gamma_ub), math.sqrt(snr.gamma_uf)])
    h_v = np.array([0.0, math.sqrt(snr.gamma_vf)])
    noise = np.diag([1.0, 1.0 + beta])

    def sinr(h, interferers):
        cov = noise + sum(np.outer(g, g) for g in interferers)
        return float(h @ np.linalg.solve(cov, h))

    if order is Order.UV:
        return math.log2(1 + sinr(h_u, [h_v])), math.log2(1 + sinr(h_v, []))
    return math.log2(1 + sinr(h_u, [])), math.log2(1 + sinr(h_v, [h_u]))


class TestDF:
    def test_reference_uv(self):
        p = df_rates(Order.UV, REF, 2.0)
        assert p.r_u == pytest.approx(math.log2(1.75), abs=1e-12)
        assert p.r_v == 2.0

    def test_reference_vu(self):
        p = df_rates(Order.VU, REF, 2.0)
        assert p.r_u == 2.0
        assert p.r_v == pytest.approx(0.8073549220576041, abs=1e-12)

    @given(snr=snrs)
    def test_zero_backhaul(self, snr):
        for order in Order:
            assert df_rates(order, snr, 0.0).r_v == 0.0


class TestBeta:
    def test_eq_reference(self):
        assert beta_eq(REF, 2.0) == pytest.approx(7.0 / 3.0, rel=1e-14)

    def test_eq_large_backhaul(self):
        assert beta_eq(REF, 60.0) < 1e-15

    def test_eq_unit(self):
        assert beta_eq(SnrTriplet(0.0, 0.0, 3.0), 1.0) == pytest.approx(1.0, rel=1e-14)

    def test_wzq_reference(self):
        assert beta_wzq(REF, 2.0) == pytest.approx(4.0 / 3.0 + 3.0 / 12.0, rel=1e-14)

    def test_wzq_limit_strong_side_info(self):
        assert beta_wzq(SnrTriplet(3.0, 3.0, 1e15), 2.0) == pytest.approx(4.0 / 3.0, rel=1e-12)

    @given(guf=gammas, gvf=gammas, c=c_ups)
    def test_no_side_info_coincide(self, guf, gvf, c):
        snr = SnrTriplet(guf, gvf, 0.0)
        assert beta_wzq(snr, c) == beta_eq(snr, c)

    def test_zero_backhaul_is_infinite(self):
        assert beta_eq(REF, 0.0) == math.inf
        assert beta_wzq(REF, 0.0) == math.inf

    @given(snr=snrs, c=c_ups)
    def test_eq_spends_backhaul(self, snr, c):
        # I(Y_F; Yhat_F) = log2((E|y_F|^2 + beta) / beta) must equal c_up
        b = beta_eq(snr, c)
        info = math.log2((snr.gamma_uf + snr.gamma_vf + 1.0 + b) / b)
        assert info == pytest.approx(c, abs=1e-9)

    @given(snr=snrs, c=c_ups)
    def test_wzq_below_eq(self, snr, c):
        assert beta_wzq(snr, c) <= beta_eq(snr, c)

    @given(guf=st.floats(1e-3, 1e3), gvf=gammas, gub=st.floats(1e-3, 1e3), c=c_ups)
    def test_wzq_strictly_below_eq(self, guf, gvf, gub, c):
        snr = SnrTriplet(guf, gvf, gub)
        assert beta_wzq(snr, c) < beta_eq(snr, c)


class TestQF:
    def test_reference_eq_uv(self):
        p = qf_rates(Order.UV, REF, 7.0 / 3.0, SchemeId.QF_EQ)
        assert p.r_u == pytest.approx(math.log2(1 + 3 + 9 / 19), abs=1e-12)
        assert p.r_u == pytest.approx(2.1615, abs=1e-4)
        assert p.r_v == pytest.approx(math.log2(1.9), abs=1e-12)

    def test_reference_eq_vu(self):
        p = qf_rates(Order.VU, REF, 7.0 / 3.0, SchemeId.QF_EQ)
        assert p.r_u == pytest.approx(math.log2(4.9), abs=1e-12)
        assert p.r_v == pytest.approx(math.log2(1 + 3 / (3 / 4 + 1 + 7 / 3)), abs=1e-12)
        assert p.r_v == pytest.approx(0.7947, abs=1e-4)

    @pytest.mark.parametrize("order", list(Order))
    def test_infinite_beta(self, order):
        p = qf_rates(order, REF, math.inf)
        assert (p.r_u, p.r_v) == (capacity(3.0), 0.0)

    @pytest.mark.parametrize("order", list(Order))
    def test_huge_beta_approaches_limit(self, order):
        p = qf_rates(order, REF, 1e300)
        assert p.r_u == pytest.approx(2.0, abs=1e-12)
        assert p.r_v == pytest.approx(0.0, abs=1e-12)

    def test_negative_beta_rejected(self):
        with pytest.raises(ValueError):
            qf_rates(Order.UV, REF, -1.0)

    @given(snr=snrs, beta=st.floats(0.0, 1e4))
    def test_matches_mmse_sic_oracle(self, snr, beta):
        for order in Order:
            p = qf_rates(order, snr, beta)
            r_u, r_v = sic_rates(snr, beta, order)
            assert p.r_u == pytest.approx(r_u, rel=1e-9, abs=1e-12)
            assert p.r_v == pytest.approx(r_v, rel=1e-9, abs=1e-12)

    @given(snr=snrs, c=c_ups)
    def test_wzq_dominates_eq(self, snr, c):
        for order in Order:
            w = qf_rates(order, snr, beta_wzq(snr, c))
            e = qf_rates(order, snr, beta_eq(snr, c))
            assert w.r_u >= e.r_u and w.r_v >= e.r_v

    @given(snr=snrs)
    def test_large_backhaul_limit(self, snr):
        p = qf_rates(Order.UV, snr, beta_wzq(snr, 60.0))
        assert p.r_u == pytest.approx(capacity(snr.gamma_ub + snr.gamma_uf / (snr.gamma_vf + 1)), abs=1e-6)
        assert p.r_v == pytest.approx(capacity(snr.gamma_vf), abs=1e-6)

    @given(gvf=gammas, gub=gammas, beta=st.floats(0.0, 100.0))
    def test_no_interference_matches_df_vu(self, gvf, gub, beta):
        snr = SnrTriplet(0.0, gvf, gub)
        assert qf_rates(Order.VU, snr, beta).r_u == df_rates(Order.VU, snr, 1.0).r_u


class TestDFQSI:
    def test_reference_uv(self):
        p = dfqsi_rates(Order.UV, REF, REF_CAPS)
        assert (p.r_u, p.r_v) == (2.0, 2.0)

    def test_vu_is_df(self):
        a = dfqsi_rates(Order.VU, REF, REF_CAPS)
        b = df_rates(Order.VU, REF, 2.0)
        assert (a.r_u, a.r_v) == (b.r_u, b.r_v)
        assert a.scheme is SchemeId.DFQSI

    @given(snr=snrs, c=st.floats(0.0, 30.0))
    def test_no_downlink_equals_df(self, snr, c):
        a = dfqsi_rates(Order.UV, snr, BackhaulCapacities(c, 0.0))
        b = df_rates(Order.UV, snr, c)
        assert (a.r_u, a.r_v) == (b.r_u, b.r_v)

    def test_large_downlink_capped(self):
        p = dfqsi_rates(Order.UV, REF, BackhaulCapacities(2.0, 500.0))
        assert p.r_u == 2.0

    @given(snr=snrs, cu=st.floats(0.0, 30.0), cd=st.floats(0.0, 30.0))
    def test_dominates_df(self, snr, cu, cd):
        assert dfqsi_rates(Order.UV, snr, BackhaulCapacities(cu, cd)).r_u >= df_rates(Order.UV, snr, cu).r_u

    def test_gamma_qu(self):
        assert quantization_state(SchemeId.DFQSI, REF, REF_CAPS).gamma_qu == pytest.approx(3.0, rel=1e-14)
        assert quantization_state(SchemeId.DFQSI, REF, BackhaulCapacities(1.0, 0.0)).gamma_qu == 0.0


@given(snr=snrs, c=st.floats(0.0, 25.0), dc=st.floats(0.0, 5.0), cd=st.floats(0.0, 25.0))
def test_monotone_in_backhaul(snr, c, dc, cd):
    for scheme in SchemeId:
        lo = scheme_points(scheme, snr, BackhaulCapacities(c, cd))
        up = scheme_points(scheme, snr, BackhaulCapacities(c + dc, cd))
        down = scheme_points(scheme, snr, BackhaulCapacities(c, cd + dc))
        for a, b, d in zip(lo, up, down):
            assert b.r_u >= a.r_u and b.r_v >= a.r_v
            assert d.r_u >= a.r_u and d.r_v >= a.r_v


class TestWzqIdentity:
    def test_reference(self):
        check = verify_wzq_identity(REF, 2.0)
        assert check.ok
        assert check.mutual_info == pytest.approx(2.0, abs=1e-12)

    def test_matches_closed_form(self):
        # C(((gvf+1)(gub+1) + guf) / (beta (gub+1)))
        snr = SnrTriplet(7.0, 2.5, 11.0)
        b = beta_wzq(snr, 3.3)
        closed = capacity(((snr.gamma_vf + 1) * (snr.gamma_ub + 1) + snr.gamma_uf) / (b * (snr.gamma_ub + 1)))
        assert verify_wzq_identity(snr, 3.3).mutual_info == pytest.approx(closed, abs=1e-12)

    def test_no_side_info(self):
        snr = SnrTriplet(5.0, 2.0, 0.0)
        assert beta_wzq(snr, 1.5) == beta_eq(snr, 1.5)
        assert verify_wzq_identity(snr, 1.5).residual < 1e-12

    def test_eq_beta_overspends_with_side_info(self):
        # With side information, EQ's larger beta leaves backhaul unused.
        snr = SnrTriplet(5.0, 2.0, 4.0)
        b = beta_eq(snr, 2.0)
        cond = (snr.gamma_uf + snr.gamma_vf + 1 + b) - snr.gamma_uf * snr.gamma_ub / (snr.gamma_ub + 1)
        assert math.log2(cond / b) < 2.0

    def test_randomized(self):
        rng = np.random.default_rng(99)
        worst = 0.0
        for g, c in zip(rng.uniform(0, 100, (10_000, 3)), 20.0 - rng.uniform(0, 20, 10_000)):
            worst = max(worst, verify_wzq_identity(SnrTriplet(*g), float(c)).residual)
        assert worst < 1e-9

    @pytest.mark.parametrize("c", [0.0, -1.0, math.inf])
    def test_rejects_bad_capacity(self, c):
        with pytest.raises(ValueError):
            verify_wzq_identity(REF, c)


def test_capacities_validate():
    with pytest.raises(ValueError):
        BackhaulCapacities(-1.0, 0.0)
    with pytest.raises(ValueError):
        BackhaulCapacities(1.0, math.nan)
