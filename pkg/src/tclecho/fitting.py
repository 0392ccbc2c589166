"""Stretched-exponential fits ``A exp(-(t/T2)^beta)`` of echo decays."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import FitError
from .tcl_engine import EchoSeries

BETA_BOUNDS = (0.3, 4.0)
COARSE_BETAS = np.linspace(0.5, 3.0, 26)


@dataclass(frozen=True)
class FitResult:
    T2: float  # s
    beta: float
    amplitude: float
    residual_rms: float

    def as_text(self) -> str:
        return (
            f"T2_us = {self.T2 * 1e6:.9g}\n"
            f"beta = {self.beta:.9g}\n"
            f"amplitude = {self.amplitude:.9g}\n"
            f"residual_rms = {self.residual_rms:.9g}\n"
        )


def stretched_exp(t, T2, beta, amplitude=1.0):
    return amplitude * np.exp(-((np.asarray(t, dtype=float) / T2) ** beta))


def _one_over_e_time(t, v, A):
    target = A / np.e
    below = np.nonzero(v <= target)[0]
    if below.size and below[0] > 0:
        i = below[0]
        # linear interpolation between the bracketing samples
        return t[i - 1] + (target - v[i - 1]) * (t[i] - t[i - 1]) / (v[i] - v[i - 1])
    # no crossing on the grid: extrapolate a pure exponential through the last point
    last = max(v[-1], 1e-300)
    return t[-1] / max(np.log(A / last), 1e-12)


def fit_stretched_exp(series: EchoSeries | None = None, *, times=None, values=None) -> FitResult:
    """Least-squares stretched-exponential fit.

    Starts from the 1/e crossing time and the best ``beta`` on a coarse grid
    over [0.5, 3], then refines all three parameters with a trust-region
    solver (``xtol = 1e-8``, at most 500 evaluations).
    """
    if series is not None:
        times, values = series.times, series.values
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.size < 8 or t.shape != v.shape:
        raise FitError("need at least 8 points with matching times and values")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
        raise FitError("non-finite data")
    scale = max(np.max(np.abs(v)), 1e-300)
    if np.ptp(v) <= 1e-12 * scale:
        raise FitError("constant series, nothing to fit")
    A0 = float(v[np.argmin(t)]) if t.min() == 0 else float(np.max(v))
    if A0 <= 0 or np.min(v) > A0 * (1 - 1e-3):
        raise FitError("series shows no decay")

    T0 = float(_one_over_e_time(t, v, A0))
    if not (np.isfinite(T0) and T0 > 0):
        raise FitError("could not initialise T2")
    sse = [np.sum((stretched_exp(t, T0, b, A0) - v) ** 2) for b in COARSE_BETAS]
    beta0 = float(COARSE_BETAS[int(np.argmin(sse))])

    x = t / T0

    def resid(p):
        A, logT, beta = p
        return A * np.exp(-((x / np.exp(logT)) ** beta)) - v

    sol = least_squares(
        resid,
        x0=[A0, 0.0, beta0],
        bounds=([0.0, -np.inf, BETA_BOUNDS[0]], [np.inf, np.inf, BETA_BOUNDS[1]]),
        xtol=1e-8,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=500,
        method="trf",
    )
    A, logT, beta = sol.x
    T2 = T0 * float(np.exp(logT))
    if not (T2 > 0 and np.isfinite(T2)):
        raise FitError("fit diverged")
    rms = float(np.sqrt(np.mean(sol.fun**2)))
    return FitResult(T2=T2, beta=float(beta), amplitude=float(A), residual_rms=rms)
