"""Max sum-rate and max-min rate of a region spanned by corner points.

A region is the set of rate pairs reachable by time sharing between its
corners (and anything they dominate). The sum rate is linear, so the best
corner is optimal. The max-min rate of two corners has a closed form, and
for more corners the best pair wins.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels

__all__ = [
    "Objective",
    "RateRegion",
    "OperatingPoint",
    "MaxMinCase",
    "max_sum_rate",
    "max_min_case",
    "max_min_pair",
    "max_min_two",
    "max_min_region",
    "max_min_oracle",
    "oracle_grid_size",
]

Point = tuple[float, float]

SUM_TIE_RTOL = 1e-12


class Objective(enum.Enum):
    MAX_SUM = "MAX_SUM"
    MAX_MIN = "MAX_MIN"


class MaxMinCase(enum.IntEnum):
    DOMINATED = 1
    SAME_SIDE = 2
    OPPOSITE_SIDES = 3


@dataclass(frozen=True)
class RateRegion:
    points: tuple[Point, ...]

    def __init__(self, points: Sequence[Sequence[float]]):
        pts = tuple((float(x), float(y)) for x, y in points)
        if not pts:
            raise ValueError("a rate region needs at least one point")
        for x, y in pts:
            if not (math.isfinite(x) and math.isfinite(y)) or x < 0 or y < 0:
                raise ValueError(f"corner points must be finite and >= 0, got {(x, y)!r}")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class OperatingPoint:
    """A rate pair inside the region, ``weight * first + (1 - weight) * second``."""

    r_u: float
    r_v: float
    objective: Objective
    value: float
    weight: float
    first: Point
    second: Point


def _sign(a: float) -> int:
    return (a > 0) - (a < 0)


def max_min_case(p1: Point, p2: Point) -> MaxMinCase:
    """Which branch of the two-point max-min formula applies.

    Boundaries where a product of differences vanishes are sent to the
    neighbouring branch that is defined there; the branches agree on them.
    Signs are compared directly so tiny differences cannot underflow.
    """
    (x1, y1), (x2, y2) = (float(v) for v in p1), (float(v) for v in p2)
    if _sign(x1 - x2) * _sign(y1 - y2) >= 0:
        return MaxMinCase.DOMINATED
    if _sign(x1 - y1) * _sign(x2 - y2) >= 0:
        return MaxMinCase.SAME_SIDE
    return MaxMinCase.OPPOSITE_SIDES


def max_min_pair(p1: Point, p2: Point) -> tuple[float, float, MaxMinCase]:
    """Max-min rate of two corners, the time-share weight on ``p1``, and the branch."""
    (x1, y1), (x2, y2) = (float(v) for v in p1), (float(v) for v in p2)
    case = max_min_case((x1, y1), (x2, y2))
    if case is MaxMinCase.DOMINATED:
        value = min(max(x1, x2), max(y1, y2))
        weight = 1.0 if (x1 >= x2 and y1 >= y2) else 0.0
    elif case is MaxMinCase.SAME_SIDE:
        m1, m2 = min(x1, y1), min(x2, y2)
        value = max(m1, m2)
        weight = 1.0 if m1 >= m2 else 0.0
    else:
        # Denominator terms share a sign here, so it cannot vanish.
        den = y2 - y1 + x1 - x2
        value = (x1 * y2 - y1 * x2) / den
        weight = min(1.0, max(0.0, (y2 - x2) / den))
    return value, weight, case


def max_min_two(p1: Point, p2: Point) -> float:
    return max_min_pair(p1, p2)[0]


def _mix(weight: float, p1: Point, p2: Point) -> Point:
    if weight == 1.0:
        return p1
    if weight == 0.0:
        return p2
    return (
        weight * p1[0] + (1.0 - weight) * p2[0],
        weight * p1[1] + (1.0 - weight) * p2[1],
    )


def max_sum_rate(region: RateRegion) -> OperatingPoint:
    """Best corner for ``r_u + r_v``.

    Sums within ``SUM_TIE_RTOL`` of the best count as tied (both SIC orders of
    a MAC give the same sum up to rounding); ties go to larger ``r_u``, then
    larger ``r_v``. ``value`` is the exact maximum sum.
    """
    value = max(x + y for x, y in region.points)
    tied = [p for p in region.points if value - (p[0] + p[1]) <= SUM_TIE_RTOL * value]
    best = max(tied)
    return OperatingPoint(
        r_u=best[0],
        r_v=best[1],
        objective=Objective.MAX_SUM,
        value=value,
        weight=1.0,
        first=best,
        second=best,
    )


def max_min_region(region: RateRegion) -> OperatingPoint:
    """Best max-min rate over every pair of corners, single corners included.

    Ties in the max-min value go to the operating point with the larger sum rate.
    """
    best = None
    for p1, p2 in itertools.combinations_with_replacement(region.points, 2):
        value, weight, _ = max_min_pair(p1, p2)
        r_u, r_v = _mix(weight, p1, p2)
        key = (value, r_u + r_v)
        if best is None or key > best[0]:
            best = (key, weight, p1, p2, r_u, r_v)
    (value, _), weight, p1, p2, r_u, r_v = best
    return OperatingPoint(
        r_u=r_u,
        r_v=r_v,
        objective=Objective.MAX_MIN,
        value=value,
        weight=weight,
        first=p1,
        second=p2,
    )


def oracle_grid_size(grid_step: float) -> int:
    """Number of grid intervals on [0, 1] so the spacing is at most ``grid_step``."""
    if not 0 < grid_step <= 0.01:
        raise ValueError("grid_step must lie in (0, 0.01]")
    return max(1, math.ceil(1.0 / grid_step - 1e-9))


def max_min_oracle(region: RateRegion, grid_step: float = 1e-4) -> float:
    """Brute-force max-min rate by scanning time-share weights on a grid.

    Meant as an independent check of :func:`max_min_region`.
    """
    n = oracle_grid_size(grid_step)
    pairs = list(itertools.combinations_with_replacement(region.points, 2))
    a = np.array([p for p, _ in pairs], dtype=np.float64)
    b = np.array([q for _, q in pairs], dtype=np.float64)
    values = kernels.oracle_max_min(a[:, 0].copy(), a[:, 1].copy(), b[:, 0].copy(), b[:, 1].copy(), n)
    return float(values.max())
