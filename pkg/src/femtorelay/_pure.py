"""Numpy implementations of the batch kernels.

Used when the compiled ``_kernels`` extension is unavailable or disabled.
Formulas and operation order mirror ``_kernels.pyx``.
"""
import math

import numpy as np

# evaluate_batch output columns
COLUMNS = (
    "ru_uv", "rv_uv", "ru_vu", "rv_vu",
    "max_sum", "ru_maxsum", "rv_maxsum",
    "max_min", "ru_maxmin", "rv_maxmin",
)

DF, QF_EQ, QF_WZQ, DFQSI = 0, 1, 2, 3
LN2 = math.log(2.0)
SUM_TIE_RTOL = 1e-12


def _cap(x):
    return np.log2(1.0 + x)


def scheme_corners(guf, gvf, gub, c_up, c_down, scheme):
    guf = np.asarray(guf, dtype=np.float64)
    gvf = np.asarray(gvf, dtype=np.float64)
    gub = np.asarray(gub, dtype=np.float64)
    if scheme in (DF, DFQSI):
        cap_ub = _cap(gub)
        if scheme == DF:
            ru_uv = np.minimum(_cap(guf / (gvf + 1.0)), cap_ub)
        else:
            gqu = math.expm1(c_down * LN2)
            ru_uv = np.minimum(_cap(gqu + guf / (gvf + 1.0)), cap_ub)
        rv_uv = np.minimum(c_up, _cap(gvf))
        rv_vu = np.minimum(c_up, _cap(gvf / (guf + 1.0)))
        ru_vu = cap_ub
    elif scheme in (QF_EQ, QF_WZQ):
        if c_up <= 0:
            ru_uv = _cap(gub)
            ru_vu = ru_uv.copy()
            rv_uv = np.zeros_like(guf)
            rv_vu = np.zeros_like(guf)
        else:
            d = math.expm1(c_up * LN2)
            if scheme == QF_EQ:
                beta = (gvf + 1.0 + guf) / d
            else:
                beta = (gvf + 1.0 + guf / (gub + 1.0)) / d
            ru_uv = _cap(gub + guf / (gvf + 1.0 + beta))
            rv_uv = _cap(gvf / (1.0 + beta))
            ru_vu = _cap(gub + guf / (1.0 + beta))
            rv_vu = _cap(gvf / (guf / (gub + 1.0) + 1.0 + beta))
    else:
        raise ValueError(f"unknown scheme code {scheme}")
    return ru_uv, rv_uv, ru_vu, rv_vu


def max_min_pairs(x1, y1, x2, y2):
    x1, y1, x2, y2 = (np.asarray(a, dtype=np.float64) for a in (x1, y1, x2, y2))
    dominated = np.sign(x1 - x2) * np.sign(y1 - y2) >= 0
    same_side = np.sign(x1 - y1) * np.sign(x2 - y2) >= 0
    case = np.where(dominated, 1, np.where(same_side, 2, 3)).astype(np.int8)

    v1 = np.minimum(np.maximum(x1, x2), np.maximum(y1, y2))
    w1 = np.where((x1 >= x2) & (y1 >= y2), 1.0, 0.0)
    m1 = np.minimum(x1, y1)
    m2 = np.minimum(x2, y2)
    v2 = np.maximum(m1, m2)
    w2 = np.where(m1 >= m2, 1.0, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        den = y2 - y1 + x1 - x2
        v3 = (x1 * y2 - y1 * x2) / den
        w3 = np.clip((y2 - x2) / den, 0.0, 1.0)

    value = np.where(case == 1, v1, np.where(case == 2, v2, v3))
    weight = np.where(case == 1, w1, np.where(case == 2, w2, w3))
    return value, weight, case


def _mix(weight, a, b):
    mixed = weight * a + (1.0 - weight) * b
    return np.where(weight == 1.0, a, np.where(weight == 0.0, b, mixed))


def evaluate_batch(guf, gvf, gub, c_up, c_down, scheme):
    """Corners and both region metrics for every trial; see ``COLUMNS``."""
    ru_uv, rv_uv, ru_vu, rv_vu = scheme_corners(guf, gvf, gub, c_up, c_down, scheme)
    out = np.empty((ru_uv.shape[0], len(COLUMNS)))
    out[:, 0] = ru_uv
    out[:, 1] = rv_uv
    out[:, 2] = ru_vu
    out[:, 3] = rv_vu

    s1 = ru_uv + rv_uv
    s2 = ru_vu + rv_vu
    best = np.maximum(s1, s2)
    tied = np.abs(s1 - s2) <= SUM_TIE_RTOL * best
    by_rate = (ru_uv > ru_vu) | ((ru_uv == ru_vu) & (rv_uv >= rv_vu))
    pick_uv = np.where(tied, by_rate, s1 > s2)
    out[:, 4] = best
    out[:, 5] = np.where(pick_uv, ru_uv, ru_vu)
    out[:, 6] = np.where(pick_uv, rv_uv, rv_vu)

    value, weight, _ = max_min_pairs(ru_uv, rv_uv, ru_vu, rv_vu)
    # A single corner can beat the pair only through a tie; the pair covers it.
    out[:, 7] = value
    out[:, 8] = _mix(weight, ru_uv, ru_vu)
    out[:, 9] = _mix(weight, rv_uv, rv_vu)
    return out


def oracle_max_min(x1, y1, x2, y2, n, chunk=256):
    x1, y1, x2, y2 = (np.asarray(a, dtype=np.float64) for a in (x1, y1, x2, y2))
    lam = np.arange(n + 1, dtype=np.float64) / n
    out = np.empty(x1.shape[0])
    for start in range(0, x1.shape[0], chunk):
        sl = slice(start, start + chunk)
        a = x2[sl, None] + lam * (x1[sl, None] - x2[sl, None])
        b = y2[sl, None] + lam * (y1[sl, None] - y2[sl, None])
        out[sl] = np.minimum(a, b).max(axis=1)
    return out
