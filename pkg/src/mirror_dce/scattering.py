"""First-order input-output scattering at the driven SQUID boundary.

An incoming mode at frequency omega reflects off the static boundary with a
pure phase R(omega) = -(1 + i k L_eff^0)/(1 - i k L_eff^0), k = omega/v.
Each drive harmonic n couples it to three sidebands, with amplitudes built
from P(w', w'') = (2 i L_eff^0 / v) sqrt(w') sqrt(w'') theta(w') theta(w''):

- down-conversion from omega - n*omega_d (only for omega > n*omega_d),
- pair creation against (n*omega_d - omega)^dagger (only for omega < n*omega_d),
- up-conversion from omega + n*omega_d.

For a thermal input at temperature T the mean output photon number is

    n_out(w) = |R|^2 n_in(w) + (4 L^2 / (v^2 a0^2)) * sum_n |a_n + i b_n|^2
               * [ w |w - n wd| n_in(|w - n wd|) + w (n wd - w) theta(n wd - w) ]

where the up-conversion sideband is dropped (negligible occupation for
k_B T << hbar omega_d). At the degenerate points w = n wd the stimulated
factor x*n_in(x) is evaluated by its analytic limit k_B T / hbar, keeping
the spectrum continuous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import CircuitParams, DriveSpectrum, effective_length
from .constants import HBAR, K_B

__all__ = [
    "ConversionAmplitude",
    "ScatterAmplitudes",
    "ThermalInput",
    "output_spectrum",
    "reflection",
    "scatter_amplitudes",
    "temperature_estimator",
    "thermal_occupation",
]


@dataclass(frozen=True)
class ThermalInput:
    """Thermal input field at bath temperature T [K]."""

    T: float = 0.0

    def __post_init__(self):
        if self.T < 0.0:
            raise ValueError(f"temperature must be >= 0, got {self.T}")


@dataclass(frozen=True)
class ConversionAmplitude:
    """First-order sideband amplitudes for one drive harmonic n."""

    n: int
    down: complex   # coefficient of a_in(omega - n*omega_d)
    conj: complex   # coefficient of a_in(n*omega_d - omega)^dagger
    up: complex     # coefficient of a_in(omega + n*omega_d)


@dataclass(frozen=True)
class ScatterAmplitudes:
    """Output-mode decomposition at one probe frequency."""

    omega: float
    r: complex
    conv: tuple[ConversionAmplitude, ...]


def thermal_occupation(omega, T: float):
    """Bose-Einstein occupation 1/(exp(hbar w / k_B T) - 1); 0 at T = 0."""
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0.0):
        raise ValueError("thermal_occupation requires omega > 0")
    if T < 0.0:
        raise ValueError(f"temperature must be >= 0, got {T}")
    kt = K_B * T
    if kt == 0.0:  # includes temperatures small enough to underflow
        out = np.zeros_like(w)
    else:
        y = HBAR * w / kt
        # expm1 overflows past ~709; occupation is zero there anyway.
        out = np.where(y > 700.0, 0.0, 1.0 / np.expm1(np.minimum(y, 700.0)))
    return float(out) if np.ndim(omega) == 0 else out


def _x_times_occupation(x, T: float):
    """x * n_in(x) extended continuously to x = 0 (limit k_B T / hbar)."""
    x = np.asarray(x, dtype=float)
    kt = K_B * T
    if kt == 0.0:
        return np.zeros_like(x)
    y = HBAR * x / kt
    # Clipping below keeps the ratio exactly 1 at y = 0 without a 0/0 branch;
    # above 700 the occupation is zero to double precision.
    y_safe = np.clip(y, 1e-300, 700.0)
    frac = np.where(y > 700.0, 0.0, y_safe / np.expm1(y_safe))
    return (kt / HBAR) * frac


def reflection(omega, L_eff0: float, v: float):
    """Static-boundary reflection coefficient, a pure phase of modulus 1."""
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0.0):
        raise ValueError("reflection requires omega > 0")
    kl = w * L_eff0 / v
    out = -(1.0 + 1j * kl) / (1.0 - 1j * kl)
    return complex(out) if np.ndim(omega) == 0 else out


def scatter_amplitudes(
    omega: float,
    d: DriveSpectrum,
    c: CircuitParams,
    *,
    symmetrized_up: bool = False,
) -> ScatterAmplitudes:
    """First-order output amplitudes at probe frequency omega.

    Harmonics with zero coefficients are skipped. `symmetrized_up` switches
    the sine-quadrature factor of the up-conversion line from P to P*
    (matching the pattern of the other two lines); the default keeps the
    literal asymmetric form. The choice never affects n_out, which drops the
    up-conversion sideband.
    """
    w = float(omega)
    if not w > 0.0:
        raise ValueError("scatter_amplitudes requires omega > 0")
    leff0 = effective_length(c)
    v = c.v
    wd = d.omega_d

    def p_factor(w1: float, w2: float) -> complex:
        if w1 <= 0.0 or w2 <= 0.0:
            return 0.0 + 0.0j
        return 2j * leff0 / v * math.sqrt(w1) * math.sqrt(w2)

    k_w = w / v
    conv = []
    for n in range(1, d.n_max + 1):
        an = float(d.a[n - 1]) / d.a0
        bn = float(d.b[n - 1]) / d.a0
        if an == 0.0 and bn == 0.0:
            continue
        w_down = w - n * wd
        w_conj = n * wd - w
        w_up = w + n * wd

        p_down = p_factor(w, w_down)
        down = (an * p_down - 1j * bn * p_down.conjugate()) * np.exp(
            1j * (k_w + abs(w_down) / v) * leff0
        )
        p_conj = p_factor(w, w_conj)
        conj = (an * p_conj.conjugate() - 1j * bn * p_conj) * np.exp(
            1j * (k_w - abs(w_conj) / v) * leff0
        )
        p_up = p_factor(w, w_up)
        p_up_b = p_up.conjugate() if symmetrized_up else p_up
        up = (an * p_up - 1j * bn * p_up_b) * np.exp(1j * (k_w + w_up / v) * leff0)
        conv.append(
            ConversionAmplitude(n=n, down=complex(down), conj=complex(conj), up=complex(up))
        )

    return ScatterAmplitudes(
        omega=w, r=reflection(w, leff0, v), conv=tuple(conv)
    )


def output_spectrum(
    omega,
    d: DriveSpectrum,
    c: CircuitParams,
    th: ThermalInput = ThermalInput(0.0),
):
    """Mean output photon number n_out(omega) against a thermal input.

    Accepts scalar or array omega (all > 0); vectorized over the grid.
    The stimulated factor is continuous across omega = n*omega_d.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0.0):
        raise ValueError("output_spectrum requires omega > 0")
    leff0 = effective_length(c)
    # |R|^2 is identically 1; keep the factor explicit so the stimulated
    # term is implemented exactly as written.
    r_sq = np.abs(reflection(w, leff0, c.v)) ** 2
    out = r_sq * thermal_occupation(w, th.T)

    prefactor = 4.0 * leff0**2 / (c.v**2 * d.a0**2)
    wd = d.omega_d
    for n in range(1, d.n_max + 1):
        c_sq = float(d.a[n - 1]) ** 2 + float(d.b[n - 1]) ** 2
        if c_sq == 0.0:
            continue
        detune = w - n * wd
        stimulated = w * _x_times_occupation(np.abs(detune), th.T)
        spontaneous = w * np.maximum(-detune, 0.0)
        out = out + prefactor * c_sq * (stimulated + spontaneous)
    return float(out) if np.ndim(omega) == 0 else out


def temperature_estimator(omega: float, n_out) -> float:
    """Temperature-scale reading of a photon number: hbar*omega*n_out/k_B [K].

    Linear in n_out at fixed omega; a comparison scale, not a fitted
    equilibrium temperature."""
    n = np.asarray(n_out, dtype=float)
    if np.any(n < 0.0):
        raise ValueError("n_out must be >= 0")
    out = HBAR * float(omega) * n / K_B
    return float(out) if np.ndim(n_out) == 0 else out
