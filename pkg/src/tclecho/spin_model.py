"""
Spins, couplings and per-pair decoherence parameters.

Units
-----
Couplings and frequencies are angular (rad s^-1), times are in seconds.
Positions are given in Angstrom and converted to metres only inside the
coupling formulas.

Dipolar sign convention
-----------------------
``b_kl = -(mu0/4pi) gamma_k gamma_l hbar (1 - 3 cos^2 theta) / r^3`` with theta
the angle between the internuclear vector and the field (z) axis. Only
``|b|`` relative to ``|delta|`` enters the pair amplitude and frequency, so
decay curves do not depend on this choice.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import constants as C
from .errors import DomainError


@dataclass(frozen=True)
class FieldConfig:
    """Static field along z and the electron gyromagnetic ratio."""

    B0: float = 0.35
    gamma_e: float = C.GAMMA_E

    def __post_init__(self):
        if not (np.isfinite(self.B0) and self.B0 > 0):
            raise DomainError(f"B0 must be positive, got {self.B0}")

    @property
    def omega_e(self) -> float:
        return self.gamma_e * self.B0

    def larmor(self, gamma: float) -> float:
        return gamma * self.B0


@dataclass(frozen=True)
class NuclearSpin:
    """A nucleus with its hyperfine zz-coupling to the electron.

    Parameters
    ----------
    id : int
        Integer label, unique within a spin set.
    isotope : str
        Tag such as ``"1H"`` or ``"51V"``.
    spin_I : float
        Spin quantum number, a positive multiple of 1/2.
    gamma : float
        Gyromagnetic ratio (rad s^-1 T^-1).
    position : array_like
        Cartesian position in Angstrom.
    A_zz : float
        Hyperfine zz-component (rad s^-1).
    """

    id: int
    isotope: str
    spin_I: float
    gamma: float
    position: tuple[float, float, float]
    A_zz: float = 0.0

    def __post_init__(self):
        twice = Fraction(self.spin_I).limit_denominator(4) * 2
        if twice.denominator != 1 or twice < 1:
            raise DomainError(f"spin_I must be a positive multiple of 1/2, got {self.spin_I}")
        pos = tuple(float(x) for x in self.position)
        if len(pos) != 3 or not all(np.isfinite(pos)):
            raise DomainError(f"position must be a finite 3-vector, got {self.position}")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "spin_I", float(self.spin_I))

    @classmethod
    def from_isotope(cls, id: int, isotope: str, position, A_zz: float = 0.0) -> "NuclearSpin":
        iso = C.lookup_isotope(isotope)
        return cls(id, iso.symbol, iso.spin_I, iso.gamma, position, A_zz)

    @property
    def multiplicity(self) -> int:
        return int(round(2 * self.spin_I)) + 1


@dataclass(frozen=True)
class PairParams:
    """Echo parameters of one nuclear pair.

    ``freq`` follows the closed-form convention ``sqrt(delta^2 + b^2) / 4``.
    ``ids`` records which spins formed the pair, if known.
    """

    delta: float
    b: float
    alpha_sq: float
    freq: float
    ids: tuple[int, int] | None = field(default=None, compare=True)

    @classmethod
    def from_couplings(cls, delta: float, b: float, ids=None) -> "PairParams":
        return cls(float(delta), float(b), pair_amplitude(delta, b), pair_frequency(delta, b), ids)


def pair_delta(A_k: float, A_l: float) -> float:
    """Hyperfine difference ``A_k - A_l``."""
    return A_k - A_l


def dipolar_coupling(k: NuclearSpin, l: NuclearSpin) -> float:
    """Secular nuclear-nuclear dipolar coupling ``b_kl`` in rad s^-1."""
    return _dipolar(np.subtract(l.position, k.position), k.gamma, l.gamma)


def _dipolar(rvec, gamma_k, gamma_l):
    rvec = np.asarray(rvec, dtype=float)
    r = np.linalg.norm(rvec, axis=-1)
    if np.any(r == 0):
        raise DomainError("coincident spin positions")
    cos2 = (rvec[..., 2] / r) ** 2
    r_m = r * C.ANGSTROM
    return -C.MU0_OVER_4PI * gamma_k * gamma_l * C.HBAR * (1.0 - 3.0 * cos2) / r_m**3


def pair_amplitude(delta, b):
    """Modulation depth ``(2 delta b / (delta^2 + b^2))^2``; zero when either vanishes."""
    delta = np.asarray(delta, dtype=float)
    b = np.asarray(b, dtype=float)
    denom = delta**2 + b**2
    with np.errstate(invalid="ignore", divide="ignore"):
        a = np.where(denom > 0, (2.0 * delta * b / np.where(denom > 0, denom, 1.0)) ** 2, 0.0)
    # rounding can push the |delta| == |b| case a hair above one
    a = np.minimum(a, 1.0)
    return float(a) if a.ndim == 0 else a


def pair_frequency(delta, b):
    f = 0.25 * np.hypot(delta, b)
    return float(f) if np.ndim(f) == 0 else f


def is_homonuclear(k: NuclearSpin, l: NuclearSpin) -> bool:
    return C.normalize_isotope(k.isotope) == C.normalize_isotope(l.isotope)


def pair_arrays(spins: Sequence[NuclearSpin]):
    """Vectorised pair table for all homonuclear pairs.

    Returns
    -------
    ids : ndarray, shape (n_pairs, 2)
    delta, b : ndarray, shape (n_pairs,)
    """
    spins = sorted(spins, key=lambda s: s.id)
    ids = [s.id for s in spins]
    if len(set(ids)) != len(ids):
        raise DomainError("spin ids must be unique")
    by_iso: dict[str, list[NuclearSpin]] = {}
    for s in spins:
        by_iso.setdefault(C.normalize_isotope(s.isotope), []).append(s)

    id_chunks, d_chunks, b_chunks = [], [], []
    for group in by_iso.values():
        if len(group) < 2:
            continue
        pos = np.array([s.position for s in group])
        A = np.array([s.A_zz for s in group])
        gam = np.array([s.gamma for s in group])
        gid = np.array([s.id for s in group])
        iu, ju = np.triu_indices(len(group), k=1)
        id_chunks.append(np.column_stack([gid[iu], gid[ju]]))
        d_chunks.append(A[iu] - A[ju])
        b_chunks.append(_dipolar(pos[ju] - pos[iu], gam[iu], gam[ju]))
    if not id_chunks:
        return np.zeros((0, 2), dtype=int), np.zeros(0), np.zeros(0)
    pid = np.concatenate(id_chunks)
    delta = np.concatenate(d_chunks)
    b = np.concatenate(b_chunks)
    order = np.lexsort((pid[:, 1], pid[:, 0]))
    return pid[order], delta[order], b[order]


def build_pairs(spins: Sequence[NuclearSpin]) -> list[PairParams]:
    """One :class:`PairParams` per unordered homonuclear pair, ordered by id.

    Pairs of different isotopes are left out; see
    :func:`heteronuclear_pairs` and :mod:`tclecho.hetero_engine` for those.
    """
    if len(spins) < 2:
        return []
    pid, delta, b = pair_arrays(spins)
    alpha = pair_amplitude(delta, b)
    freq = pair_frequency(delta, b)
    return [
        PairParams(float(d), float(bb), float(a), float(f), (int(i), int(j)))
        for (i, j), d, bb, a, f in zip(pid, delta, b, alpha, freq)
    ]


def heteronuclear_pairs(spins: Sequence[NuclearSpin]) -> list[tuple[NuclearSpin, NuclearSpin]]:
    spins = sorted(spins, key=lambda s: s.id)
    return [(k, l) for k, l in itertools.combinations(spins, 2) if not is_homonuclear(k, l)]


def spin_matrices(spin_I: float):
    """``(Iz, I+, I-)`` for a single spin in the ``|m = I, ..., -I>`` basis."""
    m = np.arange(spin_I, -spin_I - 0.5, -1.0)
    d = len(m)
    Iz = np.diag(m)
    Ip = np.zeros((d, d))
    for i in range(1, d):
        Ip[i - 1, i] = np.sqrt(spin_I * (spin_I + 1) - m[i] * (m[i] + 1))
    return Iz, Ip, Ip.T.copy()
