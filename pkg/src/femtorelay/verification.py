"""Randomized property battery behind ``femtorelay verify``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .channel import SnrTriplet
from .region import max_min_two, oracle_grid_size
from .schemes import (
    BackhaulCapacities,
    Order,
    SchemeId,
    beta_eq,
    beta_wzq,
    capacity,
    df_rates,
    dfqsi_rates,
    qf_rates,
    scheme_points,
    verify_wzq_identity,
)


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    samples: int
    max_residual: float
    tolerance: float
    strict: bool = True

    @property
    def passed(self) -> bool:
        if self.strict:
            return self.max_residual < self.tolerance
        return self.max_residual <= self.tolerance

    def report(self) -> str:
        op = "<" if self.strict else "<="
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name}: samples={self.samples} max residual {self.max_residual:.3g} {op} {self.tolerance:g} {status}"


def _snrs(rng, n, high=100.0):
    g = rng.uniform(0.0, high, size=(n, 3))
    return [SnrTriplet(*row) for row in g]


def _c_up(rng, n, high=20.0):
    # Uniform on (0, high]
    return high - rng.uniform(0.0, high, size=n)


def check_wzq_identity(rng, n) -> PropertyCheck:
    worst = 0.0
    for snr, c in zip(_snrs(rng, n), _c_up(rng, n)):
        worst = max(worst, verify_wzq_identity(snr, float(c)).residual)
    return PropertyCheck("wzq_identity", n, worst, 1e-9)


def check_max_min_oracle(rng, n, grid_step=1e-4) -> PropertyCheck:
    pts = rng.uniform(0.0, 10.0, size=(4, n))
    oracle = kernels.oracle_max_min(pts[0], pts[1], pts[2], pts[3], oracle_grid_size(grid_step))
    closed = np.array([max_min_two((a, b), (c, d)) for a, b, c, d in pts.T])
    return PropertyCheck("max_min_oracle", n, float(np.max(np.abs(oracle - closed))), 1e-3, strict=False)


def check_beta_dominance(rng, n) -> PropertyCheck:
    worst = 0.0
    for snr, c in zip(_snrs(rng, n), _c_up(rng, n)):
        worst = max(worst, beta_wzq(snr, c) - beta_eq(snr, c))
    return PropertyCheck("beta_wzq_le_beta_eq", n, worst, 0.0, strict=False)


def check_qf_dominance(rng, n) -> PropertyCheck:
    worst = 0.0
    for snr, c in zip(_snrs(rng, n), _c_up(rng, n)):
        for order in Order:
            wzq = qf_rates(order, snr, beta_wzq(snr, c))
            eq = qf_rates(order, snr, beta_eq(snr, c))
            worst = max(worst, eq.r_u - wzq.r_u, eq.r_v - wzq.r_v)
    return PropertyCheck("qf_wzq_dominates_eq", n, worst, 0.0, strict=False)


def check_dfqsi_dominance(rng, n) -> PropertyCheck:
    worst = 0.0
    c_down = rng.uniform(0.0, 20.0, size=n)
    for snr, cu, cd in zip(_snrs(rng, n), _c_up(rng, n), c_down):
        df = df_rates(Order.UV, snr, cu)
        worst = max(worst, df.r_u - dfqsi_rates(Order.UV, snr, BackhaulCapacities(cu, cd)).r_u)
        worst = max(worst, abs(df.r_u - dfqsi_rates(Order.UV, snr, BackhaulCapacities(cu, 0.0)).r_u))
    return PropertyCheck("dfqsi_dominates_df", n, worst, 0.0, strict=False)


def check_monotone_c_up(rng, n) -> PropertyCheck:
    worst = 0.0
    steps = rng.uniform(0.0, 2.0, size=n)
    c_down = rng.uniform(0.0, 10.0, size=n)
    for snr, cu, dc, cd in zip(_snrs(rng, n), _c_up(rng, n), steps, c_down):
        lo = BackhaulCapacities(cu, cd)
        hi = BackhaulCapacities(cu + dc, cd)
        more_down = BackhaulCapacities(cu, cd + dc)
        for scheme in SchemeId:
            for a, b, c in zip(scheme_points(scheme, snr, lo), scheme_points(scheme, snr, hi), scheme_points(scheme, snr, more_down)):
                worst = max(worst, a.r_u - b.r_u, a.r_v - b.r_v, a.r_u - c.r_u, a.r_v - c.r_v)
    return PropertyCheck("rates_nondecreasing_in_backhaul", n, worst, 0.0, strict=False)


def check_limits(rng, n) -> list[PropertyCheck]:
    worst_rate = 0.0
    worst_beta = 0.0
    worst_zero = 0.0
    for snr in _snrs(rng, n):
        for beta in (beta_eq(snr, 60.0), beta_wzq(snr, 60.0)):
            worst_beta = max(worst_beta, beta)
            worst_rate = max(worst_rate, abs(qf_rates(Order.UV, snr, beta).r_v - capacity(snr.gamma_vf)))
        zero = BackhaulCapacities(0.0, 0.0)
        for scheme in SchemeId:
            for p in scheme_points(scheme, snr, zero):
                worst_zero = max(worst_zero, p.r_v)
            if scheme in (SchemeId.QF_EQ, SchemeId.QF_WZQ):
                for p in scheme_points(scheme, snr, zero):
                    worst_zero = max(worst_zero, abs(p.r_u - capacity(snr.gamma_ub)))
    return [
        PropertyCheck("qf_limit_rate_c_up_60", n, worst_rate, 1e-6),
        PropertyCheck("qf_limit_beta_c_up_60", n, worst_beta, 1e-12),
        PropertyCheck("zero_backhaul", n, worst_zero, 0.0, strict=False),
    ]


def check_kernel_agreement(rng, n) -> PropertyCheck:
    g = rng.uniform(0.0, 100.0, size=(3, n))
    c_up = float(rng.uniform(0.0, 10.0))
    c_down = float(rng.uniform(0.0, 10.0))
    caps = BackhaulCapacities(c_up, c_down)
    worst = 0.0
    for scheme in SchemeId:
        batch = kernels.evaluate_batch(g[0], g[1], g[2], c_up, c_down, scheme.code)
        for i in range(n):
            uv, vu = scheme_points(scheme, SnrTriplet(g[0, i], g[1, i], g[2, i]), caps)
            ref = np.array([uv.r_u, uv.r_v, vu.r_u, vu.r_v])
            worst = max(worst, float(np.max(np.abs(batch[i, :4] - ref))))
    return PropertyCheck(f"kernel_agreement[{kernels.BACKEND}]", n, worst, 1e-12)


def run_battery(samples: int = 10_000, seed: int = 0) -> list[PropertyCheck]:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    checks = [
        check_wzq_identity(rng, samples),
        check_max_min_oracle(rng, samples),
        check_beta_dominance(rng, samples),
        check_qf_dominance(rng, samples),
        check_dfqsi_dominance(rng, samples),
        check_monotone_c_up(rng, samples),
    ]
    checks.extend(check_limits(rng, samples))
    checks.append(check_kernel_agreement(rng, min(samples, 2_000)))
    return checks
