"""Exponential-sum approximation of correlation kernels.

Fits a sampled kernel a(tau) on a uniform grid over [0, tau0] by

    a_apx(tau) = sum_j g_j * exp(-w_j * tau),   Re w_j > 0,

minimizing the relative p-norm difference |a_apx - a|_p / |a|_p with a
multi-start local optimizer.  High p emphasizes the worst region of the
interval; p > 2 is handled by iteratively reweighted least squares on
the stacked real/imaginary residuals.  The positivity constraint on the
decay rates is built into the parametrization w = exp(u) + i*v.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

__all__ = [
    "ExponentialBCF",
    "FitReport",
    "FitConvergenceError",
    "fit_bcf",
    "fit_error",
]

_IRLS_ITERATIONS = 8
_U_CLIP = 50.0


class FitConvergenceError(RuntimeError):
    """All restarts failed; carries the best fit found, if any."""

    def __init__(self, message: str, best=None, report=None):
        super().__init__(message)
        self.best = best
        self.report = report


@dataclass(frozen=True)
class ExponentialBCF:
    """Kernel represented as a sum of complex exponentials."""

    g: np.ndarray  # complex amplitudes
    w: np.ndarray  # complex rates, Re w > 0

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.g, dtype=complex))
        w = np.atleast_1d(np.asarray(self.w, dtype=complex))
        if g.shape != w.shape or g.ndim != 1 or g.size < 1:
            raise ValueError("g and w must be 1-d arrays of equal length >= 1")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "w", w)
        if np.any(w.real <= 0):
            raise ValueError("every rate must have positive real part")

    @property
    def n_terms(self) -> int:
        return self.g.size

    def evaluate(self, tau):
        """sum_j g_j exp(-w_j tau) for tau >= 0."""
        t = np.asarray(tau, dtype=float)
        out = np.sum(self.g[:, None] * np.exp(-np.outer(self.w, t)), axis=0)
        return complex(out[()]) if np.isscalar(tau) else out

    def reconstruct_sd(self, omega):
        """Re sum_j g_j / (w_j - i omega): the spectral density implied
        by the exponential kernel (half-line Fourier transform)."""
        w = np.asarray(omega, dtype=float)
        val = np.sum(self.g[:, None] / (self.w[:, None] - 1j * w), axis=0).real
        return float(val[()]) if np.isscalar(omega) else val

    # -- text serialization ------------------------------------------------

    def to_text(self, p: float, tau0: float, max_rel_err: float) -> str:
        lines = [f"{self.n_terms} {p:.16e} {tau0:.16e} {max_rel_err:.16e}"]
        for gj, wj in zip(self.g, self.w):
            lines.append(f"{gj.real:.16e} {gj.imag:.16e} "
                         f"{wj.real:.16e} {wj.imag:.16e}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> tuple["ExponentialBCF", dict]:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        n, p, tau0, err = lines[0].split()
        n = int(n)
        terms = np.array([[float(v) for v in ln.split()]
                          for ln in lines[1:1 + n]])
        if terms.shape != (n, 4):
            raise ValueError("malformed fit file")
        meta = {"p": float(p), "tau0": float(tau0), "max_rel_err": float(err)}
        return cls(terms[:, 0] + 1j * terms[:, 1],
                   terms[:, 2] + 1j * terms[:, 3]), meta


@dataclass(frozen=True)
class FitReport:
    tau0: float
    p: float
    rel_p_error: float
    max_rel_error: float
    restarts_used: int
    grid_points: int
    seed: int
    best_restart: int = field(default=-1)


def _unpack(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = x.size // 4
    g = x[:n] + 1j * x[n:2 * n]
    w = np.exp(np.clip(x[2 * n:3 * n], -_U_CLIP, _U_CLIP)) + 1j * x[3 * n:]
    return g, w


def _pack(g: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.concatenate([g.real, g.imag, np.log(w.real), w.imag])


def _model(x: np.ndarray, tau: np.ndarray) -> np.ndarray:
    g, w = _unpack(x)
    return np.sum(g[:, None] * np.exp(-np.outer(w, tau)), axis=0)


def _residuals(x: np.ndarray, tau: np.ndarray, target: np.ndarray,
               sqw: np.ndarray) -> np.ndarray:
    r = (_model(x, tau) - target) * sqw
    return np.concatenate([r.real, r.imag])


def _jacobian(x: np.ndarray, tau: np.ndarray, target: np.ndarray,
              sqw: np.ndarray) -> np.ndarray:
    n = x.size // 4
    g, w = _unpack(x)
    e = np.exp(-np.outer(w, tau))               # (n, m)
    dg = e                                      # d/d Re g
    du = -g[:, None] * tau[None, :] * e * w.real[:, None]  # d/d u, chain exp(u)
    dv = -1j * g[:, None] * tau[None, :] * e    # d/d Im w
    cols = np.empty((4 * n, tau.size), dtype=complex)
    cols[:n] = dg
    cols[n:2 * n] = 1j * dg
    cols[2 * n:3 * n] = du
    cols[3 * n:] = dv
    cols *= sqw[None, :]
    return np.concatenate([cols.real, cols.imag], axis=1).T


def _p_norm(r: np.ndarray, p: float) -> float:
    a = np.abs(r)
    m = a.max()
    if m == 0:
        return 0.0
    return m * float(np.sum((a / m) ** p)) ** (1.0 / p)


def _single_restart(args) -> tuple[float, float, np.ndarray] | None:
    """One random start followed by IRLS refinement.

    Returns (rel_p_error, max_rel_error, params) or None on failure.
    """
    (idx, seed, tau, target, p, omega_hi, tau0) = args
    rng = np.random.default_rng((seed, idx))
    n = omega_hi.size  # omega_hi carries one entry per term
    scale = max(abs(target[0]), np.abs(target).max() / 10.0)
    g0 = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * scale / n
    w_re = np.exp(rng.uniform(math.log(1.0 / tau0), np.log(omega_hi)))
    w_im = rng.uniform(-omega_hi, omega_hi)
    x = _pack(g0, w_re + 1j * w_im)

    target_pn = _p_norm(target, p)
    target_max = np.abs(target).max()
    sqw = np.ones_like(tau)
    best = None
    iterations = _IRLS_ITERATIONS if p > 2 else 1
    for _ in range(iterations):
        try:
            sol = least_squares(_residuals, x, jac=_jacobian,
                                args=(tau, target, sqw), method="lm",
                                max_nfev=600)
        except Exception:
            return best
        x = sol.x
        r = _model(x, tau) - target
        if not np.all(np.isfinite(r)):
            return best
        rel_p = _p_norm(r, p) / target_pn
        max_rel = np.abs(r).max() / target_max
        if best is None or rel_p < best[0]:
            best = (rel_p, max_rel, x.copy())
        if p <= 2:
            break
        weights = np.abs(r)
        wmax = weights.max()
        if wmax == 0:
            break
        sqw = ((weights / wmax) ** ((p - 2.0) / 2.0)).clip(1e-8, None)
    return best


def fit_bcf(target: np.ndarray, tau0: float, n_terms: int, p: float = 10.0,
            restarts: int = 64, seed: int = 0, omega_scale: float | None = None,
            workers: int = 1) -> tuple[ExponentialBCF, FitReport]:
    """Best-of-restarts exponential fit of a kernel sampled on [0, tau0].

    target: complex samples on the uniform grid linspace(0, tau0, len(target))
    p: norm order of the objective (>= 1)
    omega_scale: upper edge for random rate initialization; defaults to
        the grid Nyquist frequency.

    Ties between restarts are broken by lower max relative error, then
    lower restart index, so the result is reproducible regardless of the
    number of workers.
    """
    target = np.asarray(target, dtype=complex)
    if n_terms < 1 or p < 1:
        raise ValueError("need n_terms >= 1 and p >= 1")
    if target.size < 10 * 2 * n_terms:
        raise ValueError("grid must have at least 10 * 2 * n_terms points")
    tau = np.linspace(0.0, tau0, target.size)
    dt = tau[1] - tau[0]
    hi = omega_scale if omega_scale is not None else math.pi / dt
    omega_hi = np.full(n_terms, float(hi))

    jobs = [(i, seed, tau, target, p, omega_hi, tau0) for i in range(restarts)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_single_restart, jobs, chunksize=1))
    else:
        results = [_single_restart(j) for j in jobs]

    best_idx = -1
    best = None
    for i, res in enumerate(results):
        if res is None:
            continue
        if best is None or (res[0], res[1]) < (best[0], best[1]):
            best = res
            best_idx = i
    if best is None:
        raise FitConvergenceError("no restart produced a finite fit")

    g, w = _unpack(best[2])
    fit = ExponentialBCF(g, w)
    rel_p, max_rel = fit_error(fit, target, tau0, p)
    report = FitReport(tau0=tau0, p=p, rel_p_error=rel_p,
                       max_rel_error=max_rel, restarts_used=restarts,
                       grid_points=target.size, seed=seed,
                       best_restart=best_idx)
    return fit, report


def fit_error(fit: ExponentialBCF, target: np.ndarray, tau0: float,
              p: float) -> tuple[float, float]:
    """(relative p-norm error, max relative error) on the fit grid.

    The p-norm error uses the global ratio |a_apx - a|_p / |a|_p; the
    max error is pointwise |a_apx - a| / max |a| so it stays defined
    where the kernel crosses zero.
    """
    target = np.asarray(target, dtype=complex)
    if target.size == 0:
        raise ValueError("empty target grid")
    tau = np.linspace(0.0, tau0, target.size)
    r = fit.evaluate(tau) - target
    return (_p_norm(r, p) / _p_norm(target, p),
            float(np.abs(r).max() / np.abs(target).max()))
