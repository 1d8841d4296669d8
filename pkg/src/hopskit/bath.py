"""Ohmic-family spectral densities and exact bath correlation kernels.

The spectral density is

    J(w) = (pi/2) * alpha * omega_c**(1-s) * w**s * exp(-w/omega_c)

with s > 0.  At zero temperature the correlation kernel has the closed
form

    alpha(tau) = alpha * omega_c**2 * Gamma(s+1) / (2 * (1 + i omega_c tau)**(s+1))

and at inverse temperature beta it splits into the zero-temperature part
plus a real, symmetric thermal contribution driven by the Bose
occupation nbar(beta w) = 1/(exp(beta w) - 1).

Divergent limits (the w -> 0 value of the occupation-weighted spectra
for s < 1) are reported as ``math.inf`` rather than raised, since the
master-equation module builds its case distinction on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._quad import fourier_cos, spectrum_cutoff

__all__ = ["OhmicSpectralDensity", "nbar"]


def nbar(x: float) -> float:
    """Bose occupation 1/(e^x - 1); inf at x = 0, 0 at x = inf."""
    if x == math.inf:
        return 0.0
    if x <= 0:
        if x == 0:
            return math.inf
        raise ValueError("occupation argument must be nonnegative")
    if x > 700:
        return 0.0
    return 1.0 / math.expm1(x)


@dataclass(frozen=True)
class OhmicSpectralDensity:
    """Sub-/super-Ohmic spectral density with exponential cutoff.

    s: low-frequency power-law exponent (> 0)
    omega_c: cutoff frequency (> 0)
    alpha: dimensionless coupling strength (>= 0)
    """

    s: float
    omega_c: float
    alpha: float

    def __post_init__(self) -> None:
        if self.s <= 0:
            raise ValueError("s must be positive")
        if self.omega_c <= 0:
            raise ValueError("omega_c must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")

    # -- spectra ---------------------------------------------------------

    def value(self, omega):
        """J(omega) for omega >= 0."""
        w = np.asarray(omega, dtype=float)
        if np.any(w < 0):
            raise ValueError("spectral density is defined for omega >= 0")
        out = (0.5 * math.pi * self.alpha * self.omega_c ** (1.0 - self.s)
               * w ** self.s * np.exp(-w / self.omega_c))
        return float(out) if np.isscalar(omega) else out

    def thermal_spectrum(self, beta: float, omega: float) -> float:
        """nbar(beta w) * J(w): the spectrum of the thermal noise force.

        At w = 0 the finite limit is returned for s >= 1 and ``inf`` for
        s < 1 (integrable divergence; the noise generator integrates
        across it).
        """
        if beta <= 0:
            raise ValueError("beta must be positive")
        if omega < 0:
            raise ValueError("omega must be nonnegative")
        if omega == 0:
            return self._zero_frequency_limit(beta)
        if beta == math.inf:
            return 0.0
        return nbar(beta * omega) * self.value(omega)

    def pseudo_sd(self, beta: float, omega: float) -> float:
        """J(w)/(1 - exp(-beta w)), oddly extended via J(-w) := -J(w).

        Defined for all real w; at w = 0 returns the s-dependent limit
        (0 for s > 1, pi*alpha/(2 beta) for s = 1, ``inf`` for s < 1).
        """
        if beta <= 0:
            raise ValueError("beta must be positive")
        if omega == 0:
            return self._zero_frequency_limit(beta)
        if omega > 0:
            if beta == math.inf:
                return self.value(omega)
            return self.value(omega) / -math.expm1(-beta * omega)
        if beta == math.inf or beta * (-omega) > 700:
            return 0.0
        return -self.value(-omega) / -math.expm1(-beta * omega)

    def _zero_frequency_limit(self, beta: float) -> float:
        # J(w)/(beta w) as w -> 0, shared by pseudo_sd and thermal_spectrum.
        if beta == math.inf:
            return 0.0
        if self.s > 1:
            return 0.0
        if self.s == 1:
            return 0.5 * math.pi * self.alpha / beta
        return math.inf

    # -- time-domain kernels ---------------------------------------------

    def bcf_zero_temp(self, tau):
        """Zero-temperature kernel (1/pi) int J(w) e^{-i w tau} dw.

        Closed form, valid for any real tau (hermitian in tau).
        """
        t = np.asarray(tau, dtype=float)
        pref = 0.5 * self.alpha * self.omega_c ** 2 * math.gamma(self.s + 1.0)
        out = pref * (1.0 + 1j * self.omega_c * t) ** (-(self.s + 1.0))
        return complex(out) if np.isscalar(tau) else out

    def thermal_contribution(self, beta: float, tau: float) -> float:
        """(2/pi) int nbar(beta w) J(w) cos(w tau) dw by quadrature.

        This is the (real) temperature-dependent part of the full
        kernel, equal to the autocorrelation of the classical thermal
        force for a Hermitian coupling operator.
        """
        if beta <= 0:
            raise ValueError("beta must be positive")
        if beta == math.inf:
            return 0.0
        f = lambda w: 2.0 * nbar(beta * w) * self.value(w)
        wmax = spectrum_cutoff(f, min(self.omega_c, 1.0 / beta))
        return fourier_cos(f, tau, wmax, zero_exponent=self.s - 1.0)

    def bcf_full_temp(self, beta: float, tau: float) -> complex:
        """Full thermal kernel: zero-temperature part + thermal part."""
        if beta <= 0:
            raise ValueError("beta must be positive")
        return self.bcf_zero_temp(tau) + self.thermal_contribution(beta, tau)

    def classical_kernel(self, beta: float, tau: float) -> float:
        """(1/pi) int J(w) coth(beta w / 2) cos(w tau) dw.

        The real part of the full thermal kernel; the target fitted in
        the high-temperature (classical-noise) variant.
        """
        return self.bcf_zero_temp(tau).real + self.thermal_contribution(
            beta, tau)

    def tail_frequency(self) -> float:
        """Frequency beyond which J has dropped below 1e-12 of its peak."""
        return spectrum_cutoff(self.value, self.omega_c)
