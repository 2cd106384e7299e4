"""Achievable rate pairs for the four relaying schemes.

All rates are in b/s/Hz and use ``C(x) = log2(1 + x)``.

DF
    The FBS decodes the femto message and forwards the bits, so the femto
    rate is capped by the backhaul uplink.
QF_EQ / QF_WZQ
    The FBS quantizes what it hears and forwards it. The quantization noise
    ratio ``beta`` comes from :func:`beta_eq` (plain compression) or
    :func:`beta_wzq` (compression with the MBS observation as decoder side
    information).
DFQSI
    DF, with the MBS sending a quantized copy of the macro message down the
    backhaul so the FBS can cancel it.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .channel import SnrTriplet

__all__ = [
    "SchemeId",
    "Order",
    "BackhaulCapacities",
    "RatePoint",
    "QuantizationState",
    "WzqCheck",
    "capacity",
    "pow2m1",
    "df_rates",
    "beta_eq",
    "beta_wzq",
    "qf_rates",
    "dfqsi_rates",
    "quantization_state",
    "scheme_rates",
    "scheme_points",
    "verify_wzq_identity",
]

LN2 = math.log(2.0)


class SchemeId(enum.Enum):
    DF = "DF"
    QF_EQ = "QF_EQ"
    QF_WZQ = "QF_WZQ"
    DFQSI = "DFQSI"

    @property
    def code(self) -> int:
        return _SCHEME_CODES[self]


_SCHEME_CODES = {SchemeId.DF: 0, SchemeId.QF_EQ: 1, SchemeId.QF_WZQ: 2, SchemeId.DFQSI: 3}


class Order(enum.Enum):
    UV = "UV"
    VU = "VU"


@dataclass(frozen=True)
class BackhaulCapacities:
    c_up: float
    c_down: float = 0.0

    def __post_init__(self):
        for name in ("c_up", "c_down"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
            object.__setattr__(self, name, float(value))


@dataclass(frozen=True)
class RatePoint:
    r_u: float
    r_v: float
    scheme: SchemeId
    order: Order

    def __post_init__(self):
        if not (math.isfinite(self.r_u) and math.isfinite(self.r_v)):
            raise ValueError("rates must be finite")
        if self.r_u < 0 or self.r_v < 0:
            raise ValueError("rates must be >= 0")

    @property
    def pair(self) -> tuple[float, float]:
        return (self.r_u, self.r_v)


@dataclass(frozen=True)
class QuantizationState:
    """Quantization-noise ratio for QF and downlink side-information SNR for DFQSI."""

    beta: float
    gamma_qu: float


@dataclass(frozen=True)
class WzqCheck:
    ok: bool
    residual: float
    mutual_info: float


def capacity(x: float) -> float:
    return math.log2(1.0 + x)


def pow2m1(c: float) -> float:
    """``2**c - 1`` without cancellation for small ``c``."""
    return math.expm1(c * LN2)


def df_rates(order: Order, snr: SnrTriplet, c_up: float) -> RatePoint:
    guf, gvf, gub = snr.gamma_uf, snr.gamma_vf, snr.gamma_ub
    c_up = float(c_up)
    if order is Order.UV:
        r_u = min(capacity(guf / (gvf + 1.0)), capacity(gub))
        r_v = min(c_up, capacity(gvf))
    else:
        r_v = min(c_up, capacity(gvf / (guf + 1.0)))
        r_u = capacity(gub)
    return RatePoint(r_u, r_v, SchemeId.DF, order)


def beta_eq(snr: SnrTriplet, c_up: float) -> float:
    """Quantization-noise ratio when the MBS observation is ignored.

    Returns ``inf`` for ``c_up == 0``: nothing can be forwarded.
    """
    if c_up <= 0:
        return math.inf
    # Summation order matches beta_wzq so the two agree exactly when gamma_ub = 0.
    return (snr.gamma_vf + 1.0 + snr.gamma_uf) / pow2m1(c_up)


def beta_wzq(snr: SnrTriplet, c_up: float) -> float:
    """Quantization-noise ratio with the MBS observation as side information.

    Algebraically ``(gvf + 1)/D + guf/(D (gub + 1))`` with ``D = 2**c_up - 1``.
    """
    if c_up <= 0:
        return math.inf
    return (snr.gamma_vf + 1.0 + snr.gamma_uf / (snr.gamma_ub + 1.0)) / pow2m1(c_up)


def qf_rates(order: Order, snr: SnrTriplet, beta: float, scheme: SchemeId = SchemeId.QF_WZQ) -> RatePoint:
    if beta < 0 or math.isnan(beta):
        raise ValueError(f"beta must be >= 0, got {beta!r}")
    guf, gvf, gub = snr.gamma_uf, snr.gamma_vf, snr.gamma_ub
    if math.isinf(beta):
        # Nothing forwarded: the MBS only has its own observation.
        return RatePoint(capacity(gub), 0.0, scheme, order)
    if order is Order.UV:
        r_u = capacity(gub + guf / (gvf + 1.0 + beta))
        r_v = capacity(gvf / (1.0 + beta))
    else:
        r_u = capacity(gub + guf / (1.0 + beta))
        r_v = capacity(gvf / (guf / (gub + 1.0) + 1.0 + beta))
    return RatePoint(r_u, r_v, scheme, order)


def dfqsi_rates(order: Order, snr: SnrTriplet, caps: BackhaulCapacities) -> RatePoint:
    if order is Order.VU:
        point = df_rates(Order.VU, snr, caps.c_up)
        return RatePoint(point.r_u, point.r_v, SchemeId.DFQSI, Order.VU)
    guf, gvf, gub = snr.gamma_uf, snr.gamma_vf, snr.gamma_ub
    gamma_qu = pow2m1(caps.c_down)
    r_u = min(capacity(gamma_qu + guf / (gvf + 1.0)), capacity(gub))
    r_v = min(caps.c_up, capacity(gvf))
    return RatePoint(r_u, r_v, SchemeId.DFQSI, Order.UV)


def quantization_state(scheme: SchemeId, snr: SnrTriplet, caps: BackhaulCapacities) -> QuantizationState:
    """``beta`` for the QF variants (``nan`` for DF/DFQSI) and ``gamma_qu``."""
    if scheme is SchemeId.QF_EQ:
        beta = beta_eq(snr, caps.c_up)
    elif scheme is SchemeId.QF_WZQ:
        beta = beta_wzq(snr, caps.c_up)
    else:
        beta = math.nan
    return QuantizationState(beta=beta, gamma_qu=pow2m1(caps.c_down))


def scheme_rates(scheme: SchemeId, order: Order, snr: SnrTriplet, caps: BackhaulCapacities) -> RatePoint:
    if scheme is SchemeId.DF:
        return df_rates(order, snr, caps.c_up)
    if scheme is SchemeId.QF_EQ:
        return qf_rates(order, snr, beta_eq(snr, caps.c_up), SchemeId.QF_EQ)
    if scheme is SchemeId.QF_WZQ:
        return qf_rates(order, snr, beta_wzq(snr, caps.c_up), SchemeId.QF_WZQ)
    return dfqsi_rates(order, snr, caps)


def scheme_points(scheme: SchemeId, snr: SnrTriplet, caps: BackhaulCapacities) -> tuple[RatePoint, RatePoint]:
    """Both decoding-order corners ``(UV, VU)`` of one scheme."""
    return (
        scheme_rates(scheme, Order.UV, snr, caps),
        scheme_rates(scheme, Order.VU, snr, caps),
    )


def _wzq_covariance(snr: SnrTriplet, beta: float) -> np.ndarray:
    # (Y_B, Y_F, Yhat_F) with unit-power symbols and unit thermal noise.
    guf, gvf, gub = snr.gamma_uf, snr.gamma_vf, snr.gamma_ub
    var_b = gub + 1.0
    var_f = guf + gvf + 1.0
    cross = math.sqrt(gub * guf)
    return np.array(
        [
            [var_b, cross, cross],
            [cross, var_f, var_f],
            [cross, var_f, var_f + beta],
        ]
    )


def verify_wzq_identity(snr: SnrTriplet, c_up: float, tolerance: float = 1e-9) -> WzqCheck:
    """Check that WZQ's ``beta`` spends exactly ``c_up`` bits of backhaul.

    Computes ``I(Y_F; Yhat_F | Y_B)`` from the joint Gaussian covariance of
    the MBS observation, the FBS observation and its quantized version, and
    compares it to ``c_up``. The conditional variance of ``Yhat_F`` given
    ``Y_F`` and ``Y_B`` is the quantization noise ``beta`` itself
    (``Y_B -> Y_F -> Yhat_F`` is Markov).
    """
    if not c_up > 0 or not math.isfinite(c_up):
        raise ValueError("c_up must be finite and > 0")
    beta = beta_wzq(snr, c_up)
    if not beta > 0:
        raise ValueError("singular covariance: quantization noise is zero")
    cov = _wzq_covariance(snr, beta)
    cond_var = cov[2, 2] - cov[2, 0] ** 2 / cov[0, 0]
    info = math.log2(cond_var / beta)
    residual = abs(info - c_up)
    return WzqCheck(ok=residual < tolerance, residual=residual, mutual_info=info)
