"""Seeded Monte Carlo sweeps over backhaul capacity or femtocell position.

Every trial draws its own random stream from
``SeedSequence(master_seed, spawn_key=(value_index, trial_index))``, so a
trial's result does not depend on how trials are split across workers.
Workers only produce the random variates. Rates and metrics are evaluated
in the parent process on the full batch in trial order.
"""
from __future__ import annotations

import dataclasses
import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__, kernels
from .channel import (
    NetworkGeometry,
    Placement,
    PropagationParams,
    SnrTriplet,
    placement_from_variates,
    shadowing_from_variates,
    snr_batch,
    snr_triplet,
)
from .region import OperatingPoint, RateRegion, max_min_region, max_sum_rate
from .schemes import BackhaulCapacities, RatePoint, SchemeId, scheme_points

__all__ = [
    "SweepVariable",
    "ScenarioConfig",
    "PointConfig",
    "SchemeOutcome",
    "TrialResult",
    "SummaryRow",
    "SweepSummary",
    "SEED_SCHEME",
    "trial_seed",
    "draw_variates",
    "run_trial",
    "evaluate_point",
    "run_sweep",
]

SEED_SCHEME = "numpy.SeedSequence(master_seed, spawn_key=(value_index, trial_index)) -> PCG64"
N_UNIFORMS = 4
N_NORMALS = 3
ALL_SCHEMES = tuple(SchemeId)


class SweepVariable(enum.Enum):
    C_UP = "c_up"
    S_O = "s_o"


@dataclass(frozen=True)
class PointConfig:
    """Everything a trial needs at one sweep value."""

    geometry: NetworkGeometry
    propagation: PropagationParams
    caps: BackhaulCapacities


@dataclass(frozen=True)
class ScenarioConfig:
    """A full sweep definition.

    When ``c_down_ratio`` is set, the downlink capacity follows the uplink
    (``c_down = c_down_ratio * c_up``) at every sweep point; otherwise
    ``c_down`` is used as is.
    """

    geometry: NetworkGeometry = field(default_factory=NetworkGeometry)
    propagation: PropagationParams = field(default_factory=PropagationParams)
    c_up: float = 4.0
    c_down: float = 1.0
    c_down_ratio: float | None = None
    schemes: tuple[SchemeId, ...] = ALL_SCHEMES
    trials: int = 10_000
    master_seed: int = 0
    sweep_variable: SweepVariable = SweepVariable.C_UP
    sweep_values: tuple[float, ...] = (4.0,)

    def __post_init__(self):
        object.__setattr__(self, "sweep_values", tuple(float(v) for v in self.sweep_values))
        object.__setattr__(self, "schemes", tuple(SchemeId(s) for s in self.schemes))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if not self.schemes:
            raise ValueError("at least one scheme is required")
        if len(set(self.schemes)) != len(self.schemes):
            raise ValueError("schemes must not repeat")
        if self.c_down_ratio is not None and not (math.isfinite(self.c_down_ratio) and self.c_down_ratio >= 0):
            raise ValueError("c_down_ratio must be finite and >= 0")
        values = self.sweep_values
        if not values:
            raise ValueError("at least one sweep value is required")
        if any(not math.isfinite(v) or v < 0 for v in values):
            raise ValueError("sweep values must be finite and >= 0")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        for v in values:
            self.at(v)

    def at(self, value: float) -> PointConfig:
        if self.sweep_variable is SweepVariable.C_UP:
            geometry, c_up = self.geometry, value
        else:
            geometry, c_up = dataclasses.replace(self.geometry, s_o=value), self.c_up
        c_down = self.c_down if self.c_down_ratio is None else self.c_down_ratio * c_up
        return PointConfig(geometry, self.propagation, BackhaulCapacities(c_up, c_down))

    def to_dict(self) -> dict:
        return {
            "geometry": dataclasses.asdict(self.geometry),
            "propagation": dataclasses.asdict(self.propagation),
            "c_up": self.c_up,
            "c_down": self.c_down,
            "c_down_ratio": self.c_down_ratio,
            "schemes": [s.value for s in self.schemes],
            "trials": self.trials,
            "master_seed": self.master_seed,
            "sweep_variable": self.sweep_variable.value,
            "sweep_values": list(self.sweep_values),
        }


@dataclass(frozen=True)
class SchemeOutcome:
    uv: RatePoint
    vu: RatePoint
    max_sum: OperatingPoint
    max_min: OperatingPoint


@dataclass(frozen=True)
class TrialResult:
    snr: SnrTriplet
    outcomes: dict[SchemeId, SchemeOutcome]


@dataclass(frozen=True)
class SummaryRow:
    sweep_var: str
    sweep_value: float
    scheme: str
    mean_max_sum: float
    se_max_sum: float
    mean_max_min: float
    se_max_min: float
    mean_ru_maxmin: float
    mean_rv_maxmin: float
    mean_ru_maxsum: float
    mean_rv_maxsum: float
    trials: int


@dataclass(frozen=True)
class SweepSummary:
    rows: tuple[SummaryRow, ...]
    metadata: dict

    def row(self, value: float, scheme: SchemeId | str) -> SummaryRow:
        name = SchemeId(scheme).value
        for r in self.rows:
            if r.sweep_value == value and r.scheme == name:
                return r
        raise KeyError((value, name))

    def series(self, scheme: SchemeId | str, column: str) -> np.ndarray:
        name = SchemeId(scheme).value
        return np.array([getattr(r, column) for r in self.rows if r.scheme == name])


def trial_seed(master_seed: int, value_index: int, trial_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(value_index, trial_index))


def draw_variates(seed) -> tuple[np.ndarray, np.ndarray]:
    """Four placement uniforms then three shadowing normals, from one trial stream."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.random(N_UNIFORMS), rng.standard_normal(N_NORMALS)


def run_trial(
    seed,
    point: PointConfig,
    schemes: Sequence[SchemeId] = ALL_SCHEMES,
    placement: Placement | None = None,
) -> TrialResult:
    """Evaluate one realization.

    ``placement`` overrides the sampled user positions; the random stream is
    still consumed so shadowing is unchanged.
    """
    uniforms, normals = draw_variates(seed)
    if placement is None:
        placement = placement_from_variates(uniforms, point.geometry)
    shadow = shadowing_from_variates(normals, point.propagation)
    snr = snr_triplet(placement, point.geometry, point.propagation, shadow)
    outcomes = {}
    for scheme in schemes:
        uv, vu = scheme_points(scheme, snr, point.caps)
        region = RateRegion([uv.pair, vu.pair])
        outcomes[scheme] = SchemeOutcome(uv, vu, max_sum_rate(region), max_min_region(region))
    return TrialResult(snr, outcomes)


def _draw_chunk(args):
    master_seed, value_index, start, stop = args
    uniforms = np.empty((stop - start, N_UNIFORMS))
    normals = np.empty((stop - start, N_NORMALS))
    for row, t in enumerate(range(start, stop)):
        uniforms[row], normals[row] = draw_variates(trial_seed(master_seed, value_index, t))
    return uniforms, normals


def _draw_block(master_seed, value_index, trials, workers, executor=None):
    if executor is None or workers <= 1:
        return _draw_chunk((master_seed, value_index, 0, trials))
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    jobs = [(master_seed, value_index, int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]
    parts = list(executor.map(_draw_chunk, jobs))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def evaluate_point(config: ScenarioConfig, value_index: int, workers: int = 1, executor=None) -> dict[SchemeId, np.ndarray]:
    """Per-trial metrics at one sweep value.

    Returns, per scheme, an array of shape ``(trials, len(kernels.COLUMNS))``.
    """
    point = config.at(config.sweep_values[value_index])
    uniforms, normals = _draw_block(config.master_seed, value_index, config.trials, workers, executor)
    guf, gvf, gub = snr_batch(uniforms, normals, point.geometry, point.propagation)
    return {
        scheme: kernels.evaluate_batch(guf, gvf, gub, point.caps.c_up, point.caps.c_down, scheme.code)
        for scheme in config.schemes
    }


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    n = x.shape[0]
    mean = float(np.mean(x))
    se = float(np.std(x, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return mean, se


def _col(name: str) -> int:
    return kernels.COLUMNS.index(name)


def summarize(config: ScenarioConfig, value: float, scheme: SchemeId, metrics: np.ndarray) -> SummaryRow:
    mean_sum, se_sum = _mean_se(metrics[:, _col("max_sum")])
    mean_min, se_min = _mean_se(metrics[:, _col("max_min")])
    return SummaryRow(
        sweep_var=config.sweep_variable.value,
        sweep_value=value,
        scheme=scheme.value,
        mean_max_sum=mean_sum,
        se_max_sum=se_sum,
        mean_max_min=mean_min,
        se_max_min=se_min,
        mean_ru_maxmin=float(np.mean(metrics[:, _col("ru_maxmin")])),
        mean_rv_maxmin=float(np.mean(metrics[:, _col("rv_maxmin")])),
        mean_ru_maxsum=float(np.mean(metrics[:, _col("ru_maxsum")])),
        mean_rv_maxsum=float(np.mean(metrics[:, _col("rv_maxsum")])),
        trials=metrics.shape[0],
    )


def sweep_metadata(config: ScenarioConfig) -> dict:
    return {
        "version": __version__,
        "master_seed": config.master_seed,
        "seed_scheme": SEED_SCHEME,
        "kernels": kernels.BACKEND,
        "config": config.to_dict(),
    }


def run_sweep(config: ScenarioConfig, workers: int = 1) -> SweepSummary:
    """Run every sweep value and aggregate; rows are value-major, scheme-minor."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    rows = []
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for vi, value in enumerate(config.sweep_values):
            per_scheme = evaluate_point(config, vi, workers, executor)
            for scheme in config.schemes:
                rows.append(summarize(config, value, scheme, per_scheme[scheme]))
    finally:
        if executor is not None:
            executor.shutdown()
    return SweepSummary(tuple(rows), sweep_metadata(config))
