"""Stationary complex Gaussian processes with prescribed autocorrelation.

A nonnegative spectrum S(w) on [w0, w1] is sampled on an equidistant
grid w_k = w0 + k*dw.  The process

    z(t) = sum_k sqrt(p_k / pi) * Y_k * exp(-i w_k t),   p_k ~ S(w_k) dw

with i.i.d. standard complex Gaussian Y_k then has autocorrelation
<z(t) z*(s)> equal to the Riemann-sum approximation of
(1/pi) int S(w) exp(-i w (t-s)) dw, and <z z> = 0.  On the time grid
t_l = l*dt with n*dw*dt = 2*pi the samples are one FFT away; between
grid points a cubic spline is used.

Both error sources (Riemann sum in dw, interpolation in dt) are
controlled by the maximum absolute deviation from an adaptive-quadrature
reference of the autocorrelation: dw and dt are halved independently
until both are below ``abstol``.

Spectra with an integrable power-law divergence at w = 0 (sub-Ohmic
thermal spectra ~ w**(s-1)) are handled by assigning the panels nearest
to zero their exact integrated power instead of the midpoint value.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from ._quad import fourier_transform, integrate_spectrum, spectrum_cutoff

__all__ = [
    "NoisePlan",
    "StochasticProcess",
    "PlanError",
    "plan_noise",
    "sample_process",
    "dump_binary",
    "load_binary",
]

_SINGULAR_PANELS = 16
_CHECK_POINTS = 257


class PlanError(RuntimeError):
    """Tolerance not reachable within the node budget."""

    def __init__(self, message: str, riemann_error: float,
                 interp_error: float):
        super().__init__(message)
        self.riemann_error = riemann_error
        self.interp_error = interp_error


@dataclass(frozen=True)
class NoisePlan:
    """Frequency/time discretization for one spectrum.

    The arrays carry everything needed for sampling, so plans are cheap
    to ship to worker processes (no callables retained).
    """

    omega_0: float
    d_omega: float
    n: int
    d_t: float
    t_max: float
    abstol: float
    powers: np.ndarray        # integrated spectral power per node (a_k * S_k)
    omega_cut: float
    n_grid: int               # retained time samples, (n_grid-1)*d_t >= t_max
    riemann_error: float
    interp_error: float
    spectrum_label: str = ""

    @property
    def amplitudes(self) -> np.ndarray:
        return np.sqrt(self.powers / math.pi)

    @property
    def times(self) -> np.ndarray:
        return self.d_t * np.arange(self.n_grid)

    def reconstruction(self, tau) -> np.ndarray:
        """Autocorrelation implied by the discretized spectrum."""
        t = np.atleast_1d(np.asarray(tau, dtype=float))
        out = np.zeros(t.size, dtype=complex)
        nodes = self.omega_0 + self.d_omega * np.arange(self.n)
        step = max(1, 2 ** 22 // max(t.size, 1))
        for lo in range(0, self.n, step):
            hi = min(lo + step, self.n)
            out += (self.powers[lo:hi, None] / math.pi
                    * np.exp(-1j * np.outer(nodes[lo:hi], t))).sum(axis=0)
        return out if np.ndim(tau) else complex(out[0])

    def _grid_autocorr(self, offset: float = 0.0) -> np.ndarray:
        """Reconstruction at t_l + offset for l < n_grid, via one FFT."""
        phase = np.exp(-1j * (self.omega_0 + self.d_omega * np.arange(self.n))
                       * offset)
        vals = np.fft.fft(self.powers * phase / math.pi)[:self.n_grid]
        t = self.times + offset
        return np.exp(-1j * self.omega_0 * t) * vals


def _node_powers(spectrum: Callable[[float], float], omega_0: float,
                 d_omega: float, n: int,
                 zero_exponent: float | None) -> np.ndarray:
    nodes = omega_0 + d_omega * np.arange(n)
    powers = np.empty(n)
    for k, w in enumerate(nodes):
        if w < 0 and omega_0 >= 0:
            powers[k] = 0.0
            continue
        powers[k] = d_omega * spectrum(w)
    if zero_exponent is not None and zero_exponent < 0:
        near = np.nonzero(np.abs(nodes) <= _SINGULAR_PANELS * d_omega)[0]
        for k in near:
            lo = nodes[k] - 0.5 * d_omega
            hi = nodes[k] + 0.5 * d_omega
            if omega_0 >= 0:
                lo = max(lo, 0.0)
            powers[k] = integrate_spectrum(spectrum, lo, hi,
                                           zero_exponent=zero_exponent)
    return powers


def plan_noise(spectrum: Callable[[float], float], t_max: float,
               abstol: float, *, zero_exponent: float | None = None,
               symmetric: bool = False, omega_scale: float | None = None,
               node_budget: int = 2 ** 24,
               spectrum_label: str = "") -> NoisePlan:
    """Choose (w0, dw, n, dt) so that autocorrelation and interpolation
    errors both stay below ``abstol`` on [0, t_max].

    spectrum: nonnegative function; support [0, inf) or, with
        ``symmetric=True``, all of R (e.g. pseudo spectral densities).
    zero_exponent: power p of an integrable w**p divergence at w = 0.
    """
    if abstol <= 0:
        raise ValueError("abstol must be positive")
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    scale = omega_scale if omega_scale is not None else 1.0
    cut = spectrum_cutoff(spectrum, scale)
    if symmetric:
        cut_neg = spectrum_cutoff(lambda w: spectrum(-w), scale)
        omega_left = -cut_neg
    else:
        omega_left = 0.0
    span = cut - omega_left

    tau_check = np.linspace(0.0, t_max, _CHECK_POINTS)
    ref = np.array([
        fourier_transform(spectrum, t, cut, omega_min=omega_left,
                          zero_exponent=zero_exponent)
        for t in tau_check
    ])

    d_omega = span / 256.0
    d_t = min(2.0 * math.pi / span, t_max / 16.0)
    riemann_err = interp_err = math.inf
    for _ in range(60):
        n = int(math.ceil(max(2.0 * math.pi / (d_omega * d_t),
                              t_max / d_t + 1.0)))
        if n > node_budget:
            raise PlanError(
                f"node budget {node_budget} exceeded (needs n={n}); "
                f"achieved errors {riemann_err:.3e} / {interp_err:.3e}",
                riemann_err, interp_err)
        d_omega_eff = 2.0 * math.pi / (n * d_t)
        powers = _node_powers(spectrum, omega_left, d_omega_eff, n,
                              zero_exponent)
        n_grid = int(math.ceil(t_max / d_t)) + 1
        plan = NoisePlan(omega_0=omega_left, d_omega=d_omega_eff, n=n,
                         d_t=d_t, t_max=t_max, abstol=abstol, powers=powers,
                         omega_cut=cut, n_grid=n_grid, riemann_error=0.0,
                         interp_error=0.0, spectrum_label=spectrum_label)
        recon = plan.reconstruction(tau_check)
        riemann_err = float(np.abs(recon - ref).max())

        at_nodes = plan._grid_autocorr()
        at_mid = plan._grid_autocorr(0.5 * d_t)
        spline = CubicSpline(plan.times, at_nodes)
        interp_err = float(
            np.abs(spline(plan.times[:-1] + 0.5 * d_t) - at_mid[:-1]).max())

        if riemann_err <= abstol and interp_err <= abstol:
            return NoisePlan(omega_0=omega_left, d_omega=d_omega_eff, n=n,
                             d_t=d_t, t_max=t_max, abstol=abstol,
                             powers=powers, omega_cut=cut, n_grid=n_grid,
                             riemann_error=riemann_err,
                             interp_error=interp_err,
                             spectrum_label=spectrum_label)
        if riemann_err > abstol:
            d_omega /= 2.0
        if interp_err > abstol:
            d_t /= 2.0
    raise PlanError("refinement loop did not converge", riemann_err,
                    interp_err)


class StochasticProcess:
    """One realization on the plan's time grid with spline evaluation."""

    def __init__(self, plan: NoisePlan, values: np.ndarray, seed):
        self.plan = plan
        self.values = values
        self.seed = seed
        self._spline = CubicSpline(plan.times, values)
        self.t_end = plan.times[-1]

    def __call__(self, t):
        return self.evaluate(t)

    def evaluate(self, t):
        """Spline value; exact at grid nodes.  Domain [0, (n_grid-1)*dt]."""
        tt = np.asarray(t, dtype=float)
        if np.any(tt < 0) or np.any(tt > self.t_end * (1 + 1e-12)):
            raise ValueError(f"time outside process domain [0, {self.t_end}]")
        out = self._spline(tt)
        return complex(out[()]) if np.isscalar(t) else out

    def spline_coefficients(self) -> tuple[np.ndarray, np.ndarray]:
        """(breakpoints, coefficient matrix) of the cubic interpolant."""
        return self._spline.x, self._spline.c


def sample_process(plan: NoisePlan, seed) -> StochasticProcess:
    """Draw one realization; deterministic in (plan, seed).

    seed may be an int or a tuple of ints (fed to numpy SeedSequence so
    distinct seeds give independent streams).
    """
    rng = np.random.default_rng(seed)
    re = rng.standard_normal(plan.n)
    im = rng.standard_normal(plan.n)
    y = (re + 1j * im) / math.sqrt(2.0)
    z = np.fft.fft(plan.amplitudes * y)[:plan.n_grid]
    if plan.omega_0 != 0.0:
        z = np.exp(-1j * plan.omega_0 * plan.times) * z
    return StochasticProcess(plan, z, seed)


def dump_binary(process: StochasticProcess, path) -> None:
    """n, dt, seed as little-endian 64-bit header, then (Re, Im) pairs."""
    seed = process.seed if isinstance(process.seed, int) else -1
    with open(path, "wb") as fh:
        fh.write(struct.pack("<qdq", process.values.size, process.plan.d_t,
                             seed))
        inter = np.empty(2 * process.values.size)
        inter[0::2] = process.values.real
        inter[1::2] = process.values.imag
        fh.write(inter.astype("<f8").tobytes())


def load_binary(path) -> tuple[np.ndarray, float, int]:
    """Returns (complex values, dt, seed) from a binary dump."""
    with open(path, "rb") as fh:
        n, d_t, seed = struct.unpack("<qdq", fh.read(24))
        raw = np.frombuffer(fh.read(16 * n), dtype="<f8")
    return raw[0::2] + 1j * raw[1::2], d_t, seed
