"""Closed-form kinematics of the three periodic boundary worldlines.

Three worldline families share a drive frequency omega_d and an effective
light speed v:

- SM  (sinusoidal motion): z(t) = -R cos(omega_d t), with R = A / omega_d^2.
- SA  (sinusoidal acceleration): directional proper acceleration
  2 A cos(omega_d t); the position follows in closed form.
- AUA (alternating uniform acceleration): constant proper acceleration A
  whose sign flips every half period; piecewise hyperbolic in proper time.

Positions returned by `position` are centered: the mean over one coordinate
period is subtracted, so only the oscillating part remains (the raw AUA
worldline carries a static offset v^2/A that must not enter drive synthesis).

All functions are pure functions of immutable parameter values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import C_LIGHT
from .numerics import ellip_e, ellip_f, find_root

__all__ = [
    "SUBLUMINAL_MARGIN",
    "TrajectoryKind",
    "TrajectoryParams",
    "WorldlineSample",
    "average_acceleration",
    "coordinate_period",
    "directional_acceleration",
    "position",
    "proper_period",
    "proper_time",
    "relativity_estimator",
    "solve_acceleration_parameter",
    "worldline_sample",
]

# Reject SM wall speeds within this margin of v to stay clear of the
# elliptic singularity at R*omega_d = v.
SUBLUMINAL_MARGIN = 1e-9


class TrajectoryKind(str, Enum):
    SM = "sm"
    SA = "sa"
    AUA = "aua"


@dataclass(frozen=True)
class TrajectoryParams:
    """One worldline: kind, characteristic acceleration parameter A [m/s^2]
    (R*omega_d^2 for SM, the acceleration amplitude alpha for SA, the
    constant magnitude a for AUA), drive frequency omega_d [rad/s], and
    effective light speed v [m/s]."""

    kind: TrajectoryKind
    A: float
    omega_d: float
    v: float

    def __post_init__(self):
        object.__setattr__(self, "kind", TrajectoryKind(self.kind))
        if not self.A > 0.0:
            raise ValueError(f"A must be positive, got {self.A}")
        if not self.omega_d > 0.0:
            raise ValueError(f"omega_d must be positive, got {self.omega_d}")
        if not 0.0 < self.v <= C_LIGHT:
            raise ValueError(f"v must lie in (0, c], got {self.v}")
        if self.kind is TrajectoryKind.SM:
            wall_speed = self.A / self.omega_d  # R * omega_d
            if wall_speed >= self.v * (1.0 - SUBLUMINAL_MARGIN):
                raise ValueError(
                    f"SM wall speed R*omega_d = {wall_speed:.6g} m/s reaches the "
                    f"effective light speed v = {self.v:.6g} m/s"
                )

    @property
    def R(self) -> float:
        """SM oscillation amplitude A / omega_d^2 [m]."""
        if self.kind is not TrajectoryKind.SM:
            raise ValueError(f"R is only defined for SM, not {self.kind.value}")
        return self.A / self.omega_d**2


@dataclass(frozen=True)
class WorldlineSample:
    """One point on a worldline: coordinate time, proper time, centered
    position, and directional proper acceleration."""

    t: float
    tau: float
    z: float
    alpha_dir: float


def coordinate_period(p: TrajectoryParams) -> float:
    return 2.0 * math.pi / p.omega_d


def _sa_velocity_ratio(p: TrajectoryParams) -> float:
    # Peak |dz/dt| / v for SA is beta / sqrt(1 + beta^2) with this beta.
    return 2.0 * p.A / (p.v * p.omega_d)


def _aua_segment_sinh(p: TrajectoryParams) -> float:
    # sinh(A tau_p / 4v); fixed by requiring the coordinate period 2 pi/omega_d.
    return p.A * math.pi / (2.0 * p.v * p.omega_d)


def proper_period(p: TrajectoryParams) -> float:
    """Proper time elapsed over one coordinate period."""
    if p.kind is TrajectoryKind.SM:
        m = (p.R * p.omega_d / p.v) ** 2
        return ellip_e(2.0 * math.pi, m) / p.omega_d
    if p.kind is TrajectoryKind.SA:
        beta = _sa_velocity_ratio(p)
        return ellip_f(2.0 * math.pi, -(beta**2)) / p.omega_d
    s = _aua_segment_sinh(p)
    return (4.0 * p.v / p.A) * math.asinh(s)


def _aua_segment_index(p: TrajectoryParams, t):
    return np.floor(2.0 * np.asarray(t, dtype=float) / coordinate_period(p) + 0.5)


def _raw_position(p: TrajectoryParams, t):
    t = np.asarray(t, dtype=float)
    w = p.omega_d
    if p.kind is TrajectoryKind.SM:
        return -p.R * np.cos(w * t)
    if p.kind is TrajectoryKind.SA:
        beta = _sa_velocity_ratio(p)
        return -(p.v / w) * np.arcsin(
            beta * np.cos(w * t) / math.sqrt(1.0 + beta**2)
        )
    # AUA: per segment n, sinh((A/v)(tau - n tau_p/2)) = A t / v - 2 n s,
    # so the position is closed-form in coordinate time.
    s = _aua_segment_sinh(p)
    n = _aua_segment_index(p, t)
    xi = p.A * t / p.v - 2.0 * n * s
    sign = np.where(np.mod(n, 2.0) == 0.0, 1.0, -1.0)
    return sign * (p.v**2 / p.A) * (
        np.hypot(1.0, xi) + (sign - 1.0) * math.hypot(1.0, s)
    )


def _period_mean(p: TrajectoryParams) -> float:
    """Mean of the raw position over one coordinate period (closed form)."""
    if p.kind is TrajectoryKind.AUA:
        s = _aua_segment_sinh(p)
        return (p.v**2 / p.A) * math.hypot(1.0, s)
    return 0.0  # SM and SA oscillate symmetrically about zero


def position(p: TrajectoryParams, t):
    """Centered boundary position z(t) [m]; accepts scalar or array t."""
    out = _raw_position(p, t) - _period_mean(p)
    return float(out) if np.ndim(t) == 0 else out


def directional_acceleration(p: TrajectoryParams, t):
    """Signed proper acceleration [m/s^2]: magnitude of the proper
    acceleration times the sign of the spatial 4-acceleration component."""
    t = np.asarray(t, dtype=float)
    w = p.omega_d
    if p.kind is TrajectoryKind.SM:
        x_sq = (p.R * w / p.v) ** 2
        out = p.A * np.cos(w * t) / (1.0 - x_sq * np.sin(w * t) ** 2) ** 1.5
    elif p.kind is TrajectoryKind.SA:
        out = 2.0 * p.A * np.cos(w * t)
    else:
        n = _aua_segment_index(p, t)
        out = np.where(np.mod(n, 2.0) == 0.0, p.A, -p.A)
    return float(out) if out.ndim == 0 else out


def proper_time(p: TrajectoryParams, t):
    """Proper time tau(t) [s] along the worldline, with tau(0) = 0."""
    t_arr = np.asarray(t, dtype=float)
    w = p.omega_d
    if p.kind is TrajectoryKind.SM:
        m = (p.R * w / p.v) ** 2
        out = ellip_e(w * t_arr, m) / w
    elif p.kind is TrajectoryKind.SA:
        beta = _sa_velocity_ratio(p)
        out = ellip_f(w * t_arr, -(beta**2)) / w
    else:
        s = _aua_segment_sinh(p)
        tau_p = proper_period(p)
        n = _aua_segment_index(p, t_arr)
        xi = p.A * t_arr / p.v - 2.0 * n * s
        out = n * tau_p / 2.0 + (p.v / p.A) * np.arcsinh(xi)
    out = np.asarray(out)
    return float(out) if np.ndim(t) == 0 else out


def worldline_sample(p: TrajectoryParams, t: float) -> WorldlineSample:
    return WorldlineSample(
        t=float(t),
        tau=proper_time(p, float(t)),
        z=position(p, float(t)),
        alpha_dir=directional_acceleration(p, float(t)),
    )


def average_acceleration(p: TrajectoryParams) -> float:
    """Proper-time average of the proper acceleration over one period [m/s^2].

    Closed forms:
      SM:  v w atanh(R w / v) / E(pi/2, (R w / v)^2)
      SA:  v w asinh(2 A / (v w)) / F(pi/2, -(2 A / (v w))^2)
      AUA: A (the magnitude is constant)
    """
    w = p.omega_d
    if p.kind is TrajectoryKind.SM:
        x = p.R * w / p.v
        return p.v * w * math.atanh(x) / ellip_e(math.pi / 2.0, x**2)
    if p.kind is TrajectoryKind.SA:
        beta = _sa_velocity_ratio(p)
        return p.v * w * math.asinh(beta) / ellip_f(math.pi / 2.0, -(beta**2))
    return p.A


def solve_acceleration_parameter(
    kind: TrajectoryKind, abar_target: float, omega_d: float, v: float
) -> float:
    """Invert average_acceleration: the A for which the worldline of the
    given kind reaches the target time-averaged proper acceleration.

    The average is monotone increasing in A at fixed omega_d, so a bracketed
    root find converges; for SM the bracket stays inside the subluminal bound
    (the average diverges as R*omega_d approaches v, so any positive target
    is reachable)."""
    kind = TrajectoryKind(kind)
    if not abar_target > 0.0:
        raise ValueError(f"abar_target must be positive, got {abar_target}")
    if not omega_d > 0.0 or not 0.0 < v <= C_LIGHT:
        raise ValueError("omega_d must be positive and v in (0, c]")

    if kind is TrajectoryKind.AUA:
        return float(abar_target)

    def abar_of(a_param: float) -> float:
        return average_acceleration(TrajectoryParams(kind, a_param, omega_d, v))

    if kind is TrajectoryKind.SM:
        # Parametrize by the velocity ratio x = R*omega_d/v in (0, 1), keeping
        # the bracket strictly inside the subluminal rejection margin.
        def mismatch(x: float) -> float:
            return abar_of(x * v * omega_d) - abar_target

        x_hi = 1.0 - 16.0 * SUBLUMINAL_MARGIN
        if mismatch(x_hi) < 0.0:
            raise ValueError(
                f"abar_target={abar_target:.4g} m/s^2 exceeds the subluminal "
                f"ceiling {abar_of(x_hi * v * omega_d):.4g} m/s^2 at this omega_d"
            )
        x = find_root(mismatch, 1e-12, x_hi, tol=1e-13)
        return x * v * omega_d

    # SA: abar/A lies in (4/pi, 2), so expand the upper bound geometrically.
    lo = abar_target / 2.05
    hi = abar_target
    for _ in range(64):
        if abar_of(hi) >= abar_target:
            break
        hi *= 2.0
    else:
        raise ValueError(f"could not bracket abar_target={abar_target!r}")
    return find_root(lambda a: abar_of(a) - abar_target, lo, hi, tol=1e-13)


def relativity_estimator(p: TrajectoryParams) -> float:
    """Dimensionless measure of how relativistic the motion is: the average
    acceleration times one period, in units of the effective light speed.
    Values of order 1 or above mark significantly relativistic worldlines."""
    return average_acceleration(p) * coordinate_period(p) / p.v
