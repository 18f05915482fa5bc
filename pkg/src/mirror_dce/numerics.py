"""Shared numeric kernels: elliptic integrals, adaptive quadrature, bracketed
root finding, and Fourier-coefficient extraction for periodic signals.

Conventions
-----------
- Elliptic integrals take the *parameter* m (not the modulus k), so the
  incomplete second kind is E(phi, m) = int_0^phi sqrt(1 - m sin^2(t)) dt.
  Negative m is fully supported, and phi may exceed pi/2; the periodic
  extension E(phi + pi, m) = E(phi, m) + 2 E(pi/2, m) holds (likewise for F).
- `integrate` interprets its tolerance relative to the magnitude of the
  integral, floored at 1, so the default 1e-12 behaves as a relative target
  for O(1) integrals and an absolute one for tiny ones.

All functions are pure; there is no shared mutable state, so everything here
is safe to call concurrently.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special
from scipy.optimize import brentq

__all__ = [
    "AliasingWarning",
    "ConvergenceError",
    "FourierSeries",
    "Quadrature",
    "ellip_e",
    "ellip_f",
    "find_root",
    "fourier_decompose",
    "integrate",
]

_EPS = float(np.finfo(float).eps)


class ConvergenceError(RuntimeError):
    """An iterative routine exhausted its budget without converging."""


class AliasingWarning(UserWarning):
    """The highest extracted Fourier harmonic still carries significant power."""


@dataclass(frozen=True)
class Quadrature:
    """Adaptive-quadrature settings.

    abs_tol is the tolerance on the integral estimate (scaled by the
    integral's own magnitude, floored at 1); max_subdivisions bounds the
    interval-halving depth.
    """

    abs_tol: float = 1e-12
    max_subdivisions: int = 48

    def __post_init__(self):
        if not self.abs_tol > 0.0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_subdivisions < 1:
            raise ValueError(
                f"max_subdivisions must be >= 1, got {self.max_subdivisions}"
            )


def _check_elliptic_domain(phi, m, strict: bool) -> None:
    # The integrands contain sqrt(1 - m sin^2 theta); for m > 0 the argument
    # can cross zero once |sin theta| reaches 1/sqrt(m).
    m_arr = np.asarray(m, dtype=float)
    if not np.any(m_arr > 0.0):
        return
    phi_arr = np.asarray(phi, dtype=float)
    sin_sq_peak = np.where(
        np.abs(phi_arr) >= np.pi / 2.0, 1.0, np.sin(phi_arr) ** 2
    )
    peak = m_arr * sin_sq_peak
    bad = (peak >= 1.0) if strict else (peak > 1.0)
    bad &= m_arr > 0.0
    if np.any(bad):
        worst = float(np.max(np.where(bad, peak, -np.inf)))
        raise ValueError(
            "elliptic integrand leaves the real domain: "
            f"m*sin^2(theta) reaches {worst:.6g} on the integration range"
        )


def _elliptic_integrand_quad(phi: float, m: float, second_kind: bool) -> float:
    q = Quadrature(abs_tol=1e-13, max_subdivisions=48)
    if second_kind:
        return integrate(
            lambda th: np.sqrt(1.0 - m * np.sin(th) ** 2), 0.0, phi, q
        )
    return integrate(
        lambda th: 1.0 / np.sqrt(1.0 - m * np.sin(th) ** 2), 0.0, phi, q
    )


def _eval_elliptic(phi, m, second_kind: bool):
    scalar = np.isscalar(phi) and np.isscalar(m)
    fn = special.ellipeinc if second_kind else special.ellipkinc
    out = fn(phi, m)
    m_arr = np.asarray(m, dtype=float)
    if np.any(m_arr > 1.0):
        # scipy yields nan for m > 1 even where the integrand stays real;
        # integrate those entries directly.
        phi_b, m_b = np.broadcast_arrays(np.asarray(phi, dtype=float), m_arr)
        patched = np.array(np.broadcast_to(out, phi_b.shape), dtype=float)
        for idx in np.argwhere(m_b > 1.0):
            i = tuple(idx)
            patched[i] = _elliptic_integrand_quad(
                float(phi_b[i]), float(m_b[i]), second_kind
            )
        out = patched
    return float(out) if scalar else out


def ellip_e(phi, m):
    """Incomplete elliptic integral of the second kind, parameter convention.

    E(phi, m) = int_0^phi sqrt(1 - m sin^2 theta) dtheta. The complete
    integral is phi = pi/2. Accepts scalars or arrays (broadcast), any real
    m with m sin^2(theta) <= 1 on the range (negative m always valid).
    """
    _check_elliptic_domain(phi, m, strict=False)
    return _eval_elliptic(phi, m, second_kind=True)


def ellip_f(phi, m):
    """Incomplete elliptic integral of the first kind, parameter convention.

    F(phi, m) = int_0^phi dtheta / sqrt(1 - m sin^2 theta). Requires
    1 - m sin^2(theta) > 0 on the whole range (strict, the integrand is
    singular at equality). Negative m always valid.
    """
    _check_elliptic_domain(phi, m, strict=True)
    return _eval_elliptic(phi, m, second_kind=False)


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    q: Quadrature | None = None,
) -> float:
    """Adaptive Simpson quadrature of f over [a, b].

    The tolerance scales with the magnitude of the integral (estimated from
    the first subdivision level, so cancellation in the total does not mask
    large contributions); splits until the local Richardson error estimate
    meets it, raising ConvergenceError if the halving depth exceeds
    q.max_subdivisions anywhere.
    """
    if q is None:
        q = Quadrature()
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0

    def eval_at(x: float) -> float:
        y = float(f(x))
        if not np.isfinite(y):
            raise ValueError(f"integrand is not finite at x={x!r}: {y!r}")
        return y

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    mid = 0.5 * (a + b)
    fa, fm, fb = eval_at(a), eval_at(mid), eval_at(b)
    f_lq = eval_at(0.5 * (a + mid))
    f_rq = eval_at(0.5 * (mid + b))
    whole = simpson(a, b, fa, fm, fb)
    s_left = simpson(a, mid, fa, f_lq, fm)
    s_right = simpson(mid, b, fm, f_rq, fb)
    scale = max(abs(whole), abs(s_left) + abs(s_right))
    if scale == 0.0:
        return 0.0
    tol = q.abs_tol * scale

    def recurse(x0, x2, f0, f1, f2, s, fl, fr, s_l, s_r, tol, depth):
        s2 = s_l + s_r
        err = s2 - s
        if abs(err) <= 15.0 * tol:
            return s2 + err / 15.0
        if depth <= 0:
            raise ConvergenceError(
                f"quadrature did not converge on [{x0}, {x2}] "
                f"after {q.max_subdivisions} subdivisions"
            )
        x1 = 0.5 * (x0 + x2)
        half = 0.5 * tol
        return expand(x0, x1, f0, fl, f1, s_l, half, depth - 1) + expand(
            x1, x2, f1, fr, f2, s_r, half, depth - 1
        )

    def expand(x0, x2, f0, f1, f2, s, tol, depth):
        x1 = 0.5 * (x0 + x2)
        fl = eval_at(0.5 * (x0 + x1))
        fr = eval_at(0.5 * (x1 + x2))
        s_l = simpson(x0, x1, f0, fl, f1)
        s_r = simpson(x1, x2, f1, fr, f2)
        return recurse(x0, x2, f0, f1, f2, s, fl, fr, s_l, s_r, tol, depth)

    return recurse(
        a, b, fa, fm, fb, whole, f_lq, f_rq, s_left, s_right, tol, q.max_subdivisions
    )


def find_root(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12
) -> float:
    """Root of f on the bracket [lo, hi] via Brent's method.

    Requires a sign change (f(lo) * f(hi) <= 0). `tol` is relative to the
    bracket scale (floored at 1). Deterministic for a given f and bracket.
    """
    lo = float(lo)
    hi = float(hi)
    if not lo < hi:
        raise ValueError(f"invalid bracket [{lo}, {hi}]")
    flo = float(f(lo))
    fhi = float(f(hi))
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ValueError(
            f"no sign change on bracket [{lo}, {hi}]: f(lo)={flo!r}, f(hi)={fhi!r}"
        )
    xtol = tol * max(1.0, abs(lo), abs(hi))
    return float(
        brentq(f, lo, hi, xtol=xtol, rtol=max(tol, 4.0 * _EPS), maxiter=200)
    )


@dataclass(frozen=True)
class FourierSeries:
    """Real trigonometric series a0/2 + sum_n a_n cos(n w t) + b_n sin(n w t).

    `a` and `b` hold the harmonics n = 1..n_max; a0 is twice the mean of the
    signal so that evaluate() starts from a0/2.
    """

    a0: float
    a: np.ndarray
    b: np.ndarray
    omega_d: float

    def __post_init__(self):
        object.__setattr__(self, "a", np.atleast_1d(np.asarray(self.a, dtype=float)))
        object.__setattr__(self, "b", np.atleast_1d(np.asarray(self.b, dtype=float)))
        if self.a.shape != self.b.shape:
            raise ValueError(
                f"cosine/sine coefficient lists differ in length: "
                f"{self.a.shape} vs {self.b.shape}"
            )
        if not self.omega_d > 0.0:
            raise ValueError(f"omega_d must be positive, got {self.omega_d}")
        self.a.setflags(write=False)
        self.b.setflags(write=False)

    @property
    def n_max(self) -> int:
        return int(self.a.size)

    @property
    def harmonic_power(self) -> float:
        """Sum over harmonics of a_n^2 + b_n^2 (DC excluded)."""
        return float(np.sum(self.a**2 + self.b**2))

    def evaluate(self, t):
        """Evaluate the series at time(s) t."""
        t = np.asarray(t, dtype=float)
        n = np.arange(1, self.n_max + 1)
        phase = np.multiply.outer(t, n) * self.omega_d
        out = 0.5 * self.a0 + np.cos(phase) @ self.a + np.sin(phase) @ self.b
        return float(out) if out.ndim == 0 else out


def _sample_periodic(z, t: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(z(t), dtype=float)
    except (TypeError, ValueError):
        vals = None
    if vals is None or vals.shape != t.shape:
        vals = np.array([float(z(ti)) for ti in t])
    if not np.all(np.isfinite(vals)):
        raise ValueError("periodic signal returned non-finite samples")
    return vals


def fourier_decompose(
    z: Callable, omega_d: float, n_max: int, samples: int = 4096
) -> FourierSeries:
    """Extract the trigonometric coefficients of a 2*pi/omega_d-periodic z(t).

    Uses the composite trapezoid rule on a uniform grid over one period,
    which is spectrally accurate for smooth periodic signals. Emits
    AliasingWarning when the top requested harmonic still carries more than
    1% of the total harmonic power.
    """
    if not omega_d > 0.0:
        raise ValueError(f"omega_d must be positive, got {omega_d}")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    if samples < max(8 * n_max, 2):
        raise ValueError(
            f"samples={samples} too small for n_max={n_max}; need at least {8 * n_max}"
        )
    period = 2.0 * np.pi / omega_d
    t = np.arange(samples) * (period / samples)
    vals = _sample_periodic(z, t)

    a0 = 2.0 * float(np.mean(vals))
    if n_max == 0:
        return FourierSeries(a0=a0, a=np.empty(0), b=np.empty(0), omega_d=omega_d)

    n = np.arange(1, n_max + 1)
    phase = np.multiply.outer(n, t) * omega_d
    a = 2.0 * (np.cos(phase) @ vals) / samples
    b = 2.0 * (np.sin(phase) @ vals) / samples

    power = a**2 + b**2
    total = float(np.sum(power))
    if total > 0.0 and power[-1] > 0.01 * total:
        warnings.warn(
            f"harmonic n={n_max} still carries "
            f"{100.0 * power[-1] / total:.2f}% of the harmonic power; "
            "the requested truncation may alias",
            AliasingWarning,
            stacklevel=2,
        )
    return FourierSeries(a0=a0, a=a, b=b, omega_d=float(omega_d))
