"""
Heteronuclear pair contributions to the echo exponent.

For two nuclei with different Larmor frequencies (and possibly ``I > 1/2``),
the second-order exponent is the pulse-filtered double time integral of the
hyperfine-field correlation ``C(s) = <V(s) V(0)>``, where
``V = A_1 Iz_1 + A_2 Iz_2`` evolves under the pair Hamiltonian and the
average is over the maximally mixed pair state.

Expanding ``V`` in the eigenbasis of the pair Hamiltonian turns every
frequency component ``w_mn`` into a closed-form integral::

    W(t) = 1/(2 D) sum_mn |V_mn|^2 * 16 sin^4(w_mn t / 2) / w_mn^2

with ``t`` the pulse delay (echo at ``2 t``), matching the time convention of
:mod:`tclecho.tcl_engine`. For two spin-1/2 nuclei with equal Larmor
frequencies this reduces exactly to the TCL2 pair exponent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import constants as C
from .errors import DimensionError, DomainError
from .spin_model import FieldConfig, NuclearSpin, dipolar_coupling, spin_matrices

MAX_PAIR_DIM = 64


@dataclass(frozen=True)
class HeteroPair:
    spin1: NuclearSpin
    spin2: NuclearSpin
    b: float
    field: FieldConfig

    def __post_init__(self):
        if self.spin1.multiplicity * self.spin2.multiplicity > MAX_PAIR_DIM:
            raise DimensionError(
                f"pair dimension {self.spin1.multiplicity * self.spin2.multiplicity} exceeds {MAX_PAIR_DIM}"
            )

    @classmethod
    def from_spins(cls, spin1: NuclearSpin, spin2: NuclearSpin, field: FieldConfig) -> "HeteroPair":
        return cls(spin1, spin2, dipolar_coupling(spin1, spin2), field)

    @property
    def larmor_mismatch(self) -> float:
        return self.field.larmor(self.spin1.gamma) - self.field.larmor(self.spin2.gamma)


def hetero_hamiltonian(pair: HeteroPair, *, larmor_mismatch: float | None = None) -> np.ndarray:
    """Secular pair Hamiltonian with hyperfine mean-field shifts.

    ``(w1 + A1/2) Iz1 + (w2 + A2/2) Iz2 + b (Iz1 Iz2 - 1/4 (I1+ I2- + I1- I2+))``

    Only the Larmor difference matters for the dynamics, so the common part is
    dropped: ``w2`` is taken as zero and ``w1`` as the mismatch (overridable
    through ``larmor_mismatch``).
    """
    z1, p1, m1 = spin_matrices(pair.spin1.spin_I)
    z2, p2, m2 = spin_matrices(pair.spin2.spin_I)
    e1, e2 = np.eye(len(z1)), np.eye(len(z2))
    Z1, Z2 = np.kron(z1, e2), np.kron(e1, z2)
    dw = pair.larmor_mismatch if larmor_mismatch is None else larmor_mismatch
    ff = np.kron(p1, m2) + np.kron(m1, p2)
    return (
        (dw + 0.5 * pair.spin1.A_zz) * Z1
        + 0.5 * pair.spin2.A_zz * Z2
        + pair.b * (Z1 @ Z2 - 0.25 * ff)
    )


def _spectrum(pair: HeteroPair, larmor_mismatch=None):
    H = hetero_hamiltonian(pair, larmor_mismatch=larmor_mismatch)
    z1 = spin_matrices(pair.spin1.spin_I)[0]
    z2 = spin_matrices(pair.spin2.spin_I)[0]
    V = pair.spin1.A_zz * np.kron(z1, np.eye(len(z2))) + pair.spin2.A_zz * np.kron(np.eye(len(z1)), z2)
    lam, E = np.linalg.eigh(H)
    Vm = E.conj().T @ V @ E
    omega = lam[:, None] - lam[None, :]
    weight = np.abs(Vm) ** 2 / (2.0 * len(lam))
    # drop static components; the echo filter vanishes at zero frequency
    keep = np.abs(omega) > 1e-12 * max(1.0, np.abs(lam).max())
    return omega[keep], weight[keep]


def w_hetero(pair: HeteroPair, t, *, larmor_mismatch: float | None = None):
    """Second-order echo exponent of a (possibly heteronuclear) pair at delay ``t``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be >= 0")
    omega, weight = _spectrum(pair, larmor_mismatch)
    if omega.size == 0:
        return np.zeros_like(t)
    filt = 16.0 * np.sin(0.5 * np.multiply.outer(t, omega)) ** 4 / omega**2
    return filt @ weight


def max_w_hetero(pair: HeteroPair, horizon: float, points: int = 4001, *, larmor_mismatch=None) -> float:
    """Largest exponent on ``[0, horizon]``.

    A uniform grid is augmented with the first peak time ``pi / |w|`` of every
    frequency component, where each filter term reaches its maximum.
    """
    omega, _ = _spectrum(pair, larmor_mismatch)
    grid = np.linspace(0.0, horizon, points)
    peaks = np.pi / np.abs(omega) if omega.size else np.zeros(0)
    peaks = peaks[peaks <= horizon]
    t = np.unique(np.concatenate([grid, peaks]))
    return float(np.max(w_hetero(pair, t, larmor_mismatch=larmor_mismatch)))


@dataclass(frozen=True)
class HeteroTableParams:
    """Representative geometry for the heteronuclear table."""

    B0: float = 0.35
    r: float = 3.0  # Angstrom
    theta: float = 0.0  # rad, internuclear vector vs z
    A_hetero: float = 1e5  # rad/s
    A_partner: float = 0.0  # rad/s
    partner: str = "1H"
    horizon: float = 100e-6  # s


@dataclass(frozen=True)
class HeteroRow:
    isotope: str
    spin_I: float
    max_w: float
    order: float

    @property
    def exponent(self) -> int:
        return int(np.log10(self.order)) if self.order > 0 else -999


def table1_report(isotopes, params: HeteroTableParams = HeteroTableParams()) -> list[HeteroRow]:
    """Max-over-time heteronuclear exponent for each isotope paired with ``params.partner``."""
    field = FieldConfig(B0=params.B0)
    rows = []
    for tag in isotopes:
        iso = C.lookup_isotope(tag)
        pos = params.r * np.array([np.sin(params.theta), 0.0, np.cos(params.theta)])
        heavy = NuclearSpin.from_isotope(0, iso.symbol, (0.0, 0.0, 0.0), A_zz=params.A_hetero)
        light = NuclearSpin.from_isotope(1, params.partner, tuple(pos), A_zz=params.A_partner)
        pair = HeteroPair.from_spins(heavy, light, field)
        w = max_w_hetero(pair, params.horizon)
        order = float(10.0 ** np.floor(np.log10(w))) if w > 0 else 0.0
        rows.append(HeteroRow(iso.symbol, iso.spin_I, w, order))
    return rows


def hetero_exponent(spin_pairs, field: FieldConfig, times) -> np.ndarray:
    """Summed ``w_hetero`` over heteronuclear spin pairs on a time grid."""
    total = np.zeros_like(np.asarray(times, dtype=float))
    for k, l in spin_pairs:
        a, b = (k, l) if k.spin_I >= l.spin_I else (l, k)
        total += w_hetero(HeteroPair.from_spins(a, b, field), times)
    return total
