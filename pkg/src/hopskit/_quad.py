"""Adaptive quadrature helpers for spectral integrals.

All bath kernels reduce to integrals of the form

    (1/pi) * int f(w) * exp(-i w tau) dw

over a half line or a symmetric interval, where f may carry an
integrable power-law singularity ~ w**p (p > -1) at w = 0.  The
singular part is tamed by the substitution u = w**(p+1), which maps
the integrand to a bounded one; oscillatory tails use the cos/sin
weighted QUADPACK rules.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.integrate import quad

__all__ = [
    "spectrum_cutoff",
    "integrate_spectrum",
    "fourier_cos",
    "fourier_transform",
]

# Relative drop of the integrand below which the tail is truncated.
TAIL_RATIO = 1e-12


def spectrum_cutoff(spectrum: Callable[[float], float], omega_scale: float,
                    tail_ratio: float = TAIL_RATIO) -> float:
    """Smallest frequency beyond which ``spectrum`` is negligible.

    Scans a geometric grid seeded by ``omega_scale`` for the peak value,
    then walks outward until the spectrum has dropped below
    ``tail_ratio`` times the peak.
    """
    if omega_scale <= 0:
        raise ValueError("omega_scale must be positive")
    grid = omega_scale * np.geomspace(1e-4, 1e4, 257)
    values = np.array([spectrum(w) for w in grid])
    values = np.where(np.isfinite(values), values, 0.0)
    peak = values.max()
    if peak <= 0:
        raise ValueError("spectrum has no positive values on the scan grid")
    w = grid[int(np.argmax(values))]
    while spectrum(w) > tail_ratio * peak:
        w *= 1.25
        if w > 1e12 * omega_scale:
            raise ValueError("spectrum does not decay; cannot truncate tail")
    return w


def _quad_sing(f: Callable[[float], float], a: float, b: float,
               p: float) -> float:
    """int_a^b f(w) dw where f ~ w**p near 0 (singular endpoint at a=0)."""
    q = p + 1.0
    # u = w**q maps w**p dw -> du/q and regularizes the endpoint.
    def g(u: float) -> float:
        w = u ** (1.0 / q)
        return f(w) * w ** (1.0 - q) / q

    val, _ = quad(g, a ** q, b ** q, limit=200)
    return val


def integrate_spectrum(spectrum: Callable[[float], float], a: float, b: float,
                       zero_exponent: float | None = None) -> float:
    """int_a^b spectrum(w) dw with optional w**p singularity at w = 0.

    Supports intervals containing or touching 0; the singular piece is
    integrated with the regularizing substitution on each side.
    """
    if b <= a:
        return 0.0
    p = zero_exponent
    if p is None or p >= 0 or (a > 0) or (b < 0):
        val, _ = quad(spectrum, a, b, limit=200)
        return val
    total = 0.0
    if a < 0:
        total += _quad_sing(lambda w: spectrum(-w), 0.0, -a, p)
    if b > 0:
        total += _quad_sing(spectrum, 0.0, b, p)
    return total


def _half_line_transform(f: Callable[[float], float], tau: float,
                         omega_max: float,
                         zero_exponent: float | None) -> complex:
    """int_0^omega_max f(w) exp(-i w tau) dw, f possibly singular at 0."""
    p = zero_exponent
    split = 0.0
    re = im = 0.0
    if p is not None and p < 0:
        # Regularized panel around the singular endpoint.
        split = min(omega_max / 8.0, 1.0 / max(abs(tau), 1.0 / omega_max))
        re += _quad_sing(lambda w: f(w) * math.cos(w * tau), 0.0, split, p)
        im += _quad_sing(lambda w: f(w) * math.sin(w * tau), 0.0, split, p)
    if abs(tau) * (omega_max - split) > 4.0:
        r, _ = quad(f, split, omega_max, weight="cos", wvar=tau, limit=400)
        i, _ = quad(f, split, omega_max, weight="sin", wvar=tau, limit=400)
    else:
        r, _ = quad(lambda w: f(w) * math.cos(w * tau), split, omega_max,
                    limit=400)
        i, _ = quad(lambda w: f(w) * math.sin(w * tau), split, omega_max,
                    limit=400)
    return complex(re + r, -(im + i))


def fourier_transform(spectrum: Callable[[float], float], tau: float,
                      omega_max: float, omega_min: float = 0.0,
                      zero_exponent: float | None = None) -> complex:
    """(1/pi) int_{omega_min}^{omega_max} spectrum(w) exp(-i w tau) dw."""
    val = _half_line_transform(spectrum, tau, omega_max, zero_exponent)
    if omega_min < 0:
        val += np.conj(
            _half_line_transform(lambda w: spectrum(-w), tau, -omega_min,
                                 zero_exponent))
    elif omega_min > 0:
        val -= _half_line_transform(spectrum, tau, omega_min, None)
    return val / math.pi


def fourier_cos(spectrum: Callable[[float], float], tau: float,
                omega_max: float,
                zero_exponent: float | None = None) -> float:
    """(1/pi) int_0^omega_max spectrum(w) cos(w tau) dw."""
    p = zero_exponent
    split = 0.0
    acc = 0.0
    if p is not None and p < 0:
        split = min(omega_max / 8.0, 1.0 / max(abs(tau), 1.0 / omega_max))
        acc += _quad_sing(lambda w: spectrum(w) * math.cos(w * tau),
                          0.0, split, p)
    if abs(tau) * (omega_max - split) > 4.0:
        val, _ = quad(spectrum, split, omega_max, weight="cos", wvar=tau,
                      limit=400)
    else:
        val, _ = quad(lambda w: spectrum(w) * math.cos(w * tau),
                      split, omega_max, limit=400)
    return (acc + val) / math.pi
