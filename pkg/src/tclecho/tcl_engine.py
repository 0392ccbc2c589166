"""
Closed-form TCL2 and TCL4 Hahn-echo envelopes in the pair-product form.

Time convention
---------------
The time argument ``t`` of every function here is the free-evolution delay
between the pi/2 and pi pulses; the echo is read out at ``2 t``. With this
reading the closed form ``1 - alpha^2 sin^4((t/4) sqrt(delta^2 + b^2))`` is
exactly what the dense propagator of :mod:`tclecho.exact_engine` produces for
a single pair, and the pair correlation-function integral of
:mod:`tclecho.hetero_engine` lands on the TCL2 exponent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, GridMismatchError
from .spin_model import PairParams

_CHUNK = 4096


@dataclass(frozen=True)
class EchoProtocol:
    """Time grid and initial electron coherence for a single-pulse Hahn echo."""

    times: np.ndarray
    initial_coherence: complex = 0.5
    pulse_fraction: float = field(default=0.5, init=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1:
            raise DomainError("times must be one-dimensional")
        if t.size and t[0] < 0:
            raise DomainError("times must start at t >= 0")
        if np.any(np.diff(t) <= 0):
            raise DomainError("times must be strictly increasing")
        object.__setattr__(self, "times", t)

    @classmethod
    def linspace(cls, horizon: float, points: int = 512, initial_coherence: complex = 0.5):
        if horizon <= 0 or points < 2:
            raise DomainError("need horizon > 0 and at least 2 points")
        return cls(np.linspace(0.0, horizon, points), initial_coherence)


@dataclass(frozen=True)
class EchoSeries:
    """Normalised coherence ``|rho01(t)| / |rho01(0)|`` on a time grid."""

    times: np.ndarray
    values: np.ndarray
    method: str

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape:
            raise GridMismatchError(f"times {t.shape} and values {v.shape} differ")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "method", self.method.upper())

    def __len__(self):
        return len(self.times)


def _phase(delta, b, t):
    return np.multiply.outer(0.25 * np.hypot(delta, b), t)


def w_tcl2(pair: PairParams, t):
    """TCL2 decay exponent ``alpha^2 sin^4((t/4) sqrt(delta^2 + b^2))`` of one pair."""
    x = 0.25 * np.hypot(pair.delta, pair.b) * np.asarray(t, dtype=float)
    return pair.alpha_sq * np.sin(x) ** 4


def w_tcl4_exponent(pair: PairParams, t):
    """Fourth-order exponent ``4 c^2 sin^4 x + 12 c^4 sin^8 x`` with ``c = b delta / (b^2 + delta^2)``."""
    x = 0.25 * np.hypot(pair.delta, pair.b) * np.asarray(t, dtype=float)
    c2 = pair.alpha_sq / 4.0
    s4 = np.sin(x) ** 4
    return 4.0 * c2 * s4 + 12.0 * c2**2 * s4**2


def _as_arrays(pairs):
    if isinstance(pairs, tuple) and len(pairs) == 2 and not isinstance(pairs[0], PairParams):
        delta, b = (np.asarray(a, dtype=float) for a in pairs)
        return delta, b
    delta = np.fromiter((p.delta for p in pairs), dtype=float, count=len(pairs))
    b = np.fromiter((p.b for p in pairs), dtype=float, count=len(pairs))
    return delta, b


def total_exponent(pairs, times, order: str = "TCL2") -> np.ndarray:
    """Sum of per-pair exponents on a time grid.

    ``pairs`` is a list of :class:`PairParams` or a ``(delta, b)`` array tuple.
    Pairs are processed in fixed-size chunks so memory stays bounded for
    large baths.
    """
    order = order.upper()
    if order not in ("TCL2", "TCL4"):
        raise DomainError(f"order must be TCL2 or TCL4, got {order!r}")
    times = np.asarray(times, dtype=float)
    delta, b = _as_arrays(pairs)
    denom = delta**2 + b**2
    ok = denom > 0
    c2 = np.zeros_like(delta)
    c2[ok] = (delta[ok] * b[ok] / denom[ok]) ** 2
    total = np.zeros_like(times)
    for start in range(0, len(delta), _CHUNK):
        sl = slice(start, start + _CHUNK)
        s4 = np.sin(_phase(delta[sl], b[sl], times)) ** 4
        w = 4.0 * c2[sl, None] * s4
        if order == "TCL4":
            w += 12.0 * c2[sl, None] ** 2 * s4**2
        total += w.sum(axis=0)
    return total


def echo_envelope(pairs, protocol: EchoProtocol, order: str = "TCL2", extra_w=None) -> EchoSeries:
    """Pair-product echo envelope ``exp(-sum_pairs W)``.

    Parameters
    ----------
    pairs : list of PairParams or (delta, b) arrays
    protocol : EchoProtocol
    order : {"TCL2", "TCL4"}
    extra_w : array_like, optional
        Additional per-time exponent (e.g. heteronuclear pairs, see
        :func:`add_external_w`).
    """
    w = total_exponent(pairs, protocol.times, order)
    if extra_w is not None:
        w = add_external_w(w, extra_w)
    return EchoSeries(protocol.times, np.exp(-w), order.upper())


def coherence(series: EchoSeries, protocol: EchoProtocol) -> np.ndarray:
    """Unnormalised off-diagonal element ``rho01(0) * envelope``."""
    return protocol.initial_coherence * series.values


def revival_time(pair: PairParams) -> float:
    """First ``t > 0`` where the pair exponent returns to zero, ``4 pi / sqrt(delta^2 + b^2)``."""
    rate = np.hypot(pair.delta, pair.b)
    if rate == 0:
        raise DomainError("pair with delta = b = 0 has no finite revival")
    return 4.0 * np.pi / rate


def add_external_w(exponents, extra) -> np.ndarray:
    exponents = np.asarray(exponents, dtype=float)
    extra = np.asarray(extra, dtype=float)
    if exponents.shape != extra.shape:
        raise GridMismatchError(f"exponent grids differ: {exponents.shape} vs {extra.shape}")
    return exponents + extra
