"""Geometry, path loss, shadowing and power control for the two-cell uplink.

The MBS sits at the origin and the FBS at ``(s_o, 0)``. Both uplinks are
power controlled, so the macro user U reaches the MBS and the femto user V
reaches the FBS at the same received SNR ``Gamma``. The only SNR that depends
on the draw is the interference of U at the FBS::

    gamma_uf = Gamma * |h_UF|^2 / |h_UB|^2

Any common path-loss constant cancels in that ratio.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NetworkGeometry",
    "PropagationParams",
    "Placement",
    "ShadowGains",
    "SnrTriplet",
    "db_to_linear",
    "link_gain",
    "sample_placement",
    "sample_shadowing",
    "snr_triplet",
    "placement_from_variates",
    "shadowing_from_variates",
    "snr_batch",
]

MBS_POS = (0.0, 0.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class NetworkGeometry:
    """Base-station positions and cell radii, in meters."""

    s_o: float = 150.0
    r_m: float = 200.0
    r_f: float = 20.0

    def __post_init__(self):
        for name in ("s_o", "r_m", "r_f"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.s_o < 0:
            raise ValueError("s_o must be >= 0")
        if self.r_m <= 0 or self.r_f <= 0:
            raise ValueError("cell radii must be > 0")
        if self.r_f >= self.r_m:
            raise ValueError("femtocell radius must be smaller than macrocell radius")

    @property
    def fbs_pos(self) -> tuple[float, float]:
        return (self.s_o, 0.0)


@dataclass(frozen=True)
class PropagationParams:
    """Path-loss exponent, shadowing spread, distance clamp and target SNR.

    ``shadow_sigma_db = 0`` switches shadowing off. ``rx_snr_db`` is the
    power-controlled received SNR ``P_R / sigma^2`` in dB.
    """

    alpha: float = 3.0
    shadow_sigma_db: float = 8.0
    d_min: float = 1.0
    rx_snr_db: float = 10.0

    def __post_init__(self):
        for name in ("alpha", "shadow_sigma_db", "d_min", "rx_snr_db"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.alpha < 2:
            raise ValueError("alpha must be >= 2")
        if self.shadow_sigma_db < 0:
            raise ValueError("shadow_sigma_db must be >= 0")
        if self.d_min <= 0:
            raise ValueError("d_min must be > 0")

    @property
    def rx_snr(self) -> float:
        return db_to_linear(self.rx_snr_db)


@dataclass(frozen=True)
class Placement:
    u_pos: tuple[float, float]
    v_pos: tuple[float, float]


@dataclass(frozen=True)
class ShadowGains:
    """Linear log-normal shadowing gains per link (1.0 means no shadowing)."""

    ub: float = 1.0
    uf: float = 1.0
    vf: float = 1.0


@dataclass(frozen=True)
class SnrTriplet:
    """The three linear SNRs every rate formula depends on."""

    gamma_uf: float
    gamma_vf: float
    gamma_ub: float

    def __post_init__(self):
        for name in ("gamma_uf", "gamma_vf", "gamma_ub"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")


def _disk_point(radius: float, u_radius: float, u_angle: float, center=(0.0, 0.0)):
    r = radius * math.sqrt(u_radius)
    theta = 2.0 * math.pi * u_angle
    return (center[0] + r * math.cos(theta), center[1] + r * math.sin(theta))


def placement_from_variates(uniforms, geometry: NetworkGeometry) -> Placement:
    """Map four uniforms ``(u_r, u_theta, v_r, v_theta)`` to user positions.

    The radius is ``R * sqrt(u)`` so the points are uniform in area.
    """
    ur, ua, vr, va = (float(x) for x in uniforms)
    return Placement(
        u_pos=_disk_point(geometry.r_m, ur, ua, MBS_POS),
        v_pos=_disk_point(geometry.r_f, vr, va, geometry.fbs_pos),
    )


def shadowing_from_variates(normals, params: PropagationParams) -> ShadowGains:
    """Map three standard normals ``(ub, uf, vf)`` to linear shadowing gains."""
    sigma = params.shadow_sigma_db
    ub, uf, vf = (db_to_linear(sigma * float(n)) for n in normals)
    return ShadowGains(ub=ub, uf=uf, vf=vf)


def sample_placement(rng: np.random.Generator, geometry: NetworkGeometry) -> Placement:
    return placement_from_variates(rng.random(4), geometry)


def sample_shadowing(rng: np.random.Generator, params: PropagationParams) -> ShadowGains:
    # Always consume three normals so the stream does not depend on sigma.
    return shadowing_from_variates(rng.standard_normal(3), params)


def link_gain(distance: float, alpha: float, shadow: float = 1.0, k: float = 1.0) -> float:
    """Channel power gain ``|h|^2 = k * g / d^alpha``."""
    return k * shadow / distance**alpha


def snr_triplet(
    placement: Placement,
    geometry: NetworkGeometry,
    params: PropagationParams,
    shadow: ShadowGains | None = None,
    k: float = 1.0,
) -> SnrTriplet:
    """SNR triplet for one realization under perfect power control.

    ``k`` is the common path-loss constant. It has no effect on the result
    and is exposed only so that this can be checked.
    """
    if shadow is None:
        shadow = ShadowGains()
    for name in ("ub", "uf", "vf"):
        g = getattr(shadow, name)
        if not math.isfinite(g) or g <= 0:
            raise ValueError(f"shadow gain {name} must be finite and > 0, got {g!r}")

    gamma = params.rx_snr
    ux, uy = placement.u_pos
    fx, fy = geometry.fbs_pos
    d_ub = max(math.hypot(ux - MBS_POS[0], uy - MBS_POS[1]), params.d_min)
    d_uf = max(math.hypot(ux - fx, uy - fy), params.d_min)

    h_ub = link_gain(d_ub, params.alpha, shadow.ub, k)
    h_uf = link_gain(d_uf, params.alpha, shadow.uf, k)
    return SnrTriplet(gamma_uf=gamma * (h_uf / h_ub), gamma_vf=gamma, gamma_ub=gamma)


def snr_batch(
    uniforms: np.ndarray,
    normals: np.ndarray,
    geometry: NetworkGeometry,
    params: PropagationParams,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized :func:`snr_triplet` over per-trial variates.

    Parameters
    ----------
    uniforms : array, shape (n, 4)
        Placement uniforms, same layout as :func:`placement_from_variates`.
    normals : array, shape (n, 3)
        Shadowing normals, same layout as :func:`shadowing_from_variates`.

    Returns
    -------
    gamma_uf, gamma_vf, gamma_ub : arrays, shape (n,)
    """
    uniforms = np.asarray(uniforms, dtype=np.float64)
    normals = np.asarray(normals, dtype=np.float64)
    n = uniforms.shape[0]

    r = geometry.r_m * np.sqrt(uniforms[:, 0])
    theta = 2.0 * np.pi * uniforms[:, 1]
    ux = r * np.cos(theta)
    uy = r * np.sin(theta)

    d_ub = np.maximum(np.hypot(ux, uy), params.d_min)
    d_uf = np.maximum(np.hypot(ux - geometry.s_o, uy), params.d_min)
    g = 10.0 ** (params.shadow_sigma_db * normals[:, :2] / 10.0)

    h_ub = g[:, 0] / d_ub**params.alpha
    h_uf = g[:, 1] / d_uf**params.alpha
    gamma = params.rx_snr
    gamma_uf = gamma * (h_uf / h_ub)
    full = np.full(n, gamma)
    return gamma_uf, full, full.copy()
