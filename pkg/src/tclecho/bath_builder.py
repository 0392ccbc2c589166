"""
Random proton bath around a solute.

The solute sits at the centre of a cube (default 40 A edge) filled with a
deuterated solvent. Residual protons are counted from the solvent density and
isotopic purity, placed uniformly at random, and coupled to the electron by
the point-dipole formula.

Random numbers come from numpy's PCG64 bit generator seeded with
``config.seed``. Candidates are drawn in fixed batches of ``_BATCH`` points
and accepted in order, so a larger bath drawn with the same seed always
starts with the smaller one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import constants as C
from .errors import BathGenerationError, ConfigError, DomainError
from .spin_model import NuclearSpin

_BATCH = 256


@dataclass(frozen=True)
class BathConfig:
    """Solvent box parameters.

    Defaults describe DMF-d7 at 99 % isotopic purity. ``counter_ion_boost``
    multiplies the residual-proton fraction to stand in for protonated
    counter-ions.
    """

    edge: float = 40.0  # A
    solvent_density: float = 0.95  # g/cm^3
    solvent_molar_mass: float = 80.0  # g/mol
    h_sites_per_molecule: int = 7
    protonation_fraction: float = 0.01
    counter_ion_boost: float = 2.0
    exclusion_radius: float = 6.0  # A
    min_separation: float = 1.0  # A
    seed: int = 0
    max_attempts_per_spin: int = 1000

    def __post_init__(self):
        if not self.edge > 0:
            raise ConfigError("edge must be positive")
        if not 0.0 <= self.protonation_fraction <= 1.0:
            raise ConfigError("protonation_fraction must lie in [0, 1]")
        if self.counter_ion_boost < 0:
            raise ConfigError("counter_ion_boost must be non-negative")
        if not 0.0 <= self.exclusion_radius < self.edge / 2:
            raise ConfigError("exclusion_radius must be in [0, edge/2)")
        if self.solvent_density < 0 or self.solvent_molar_mass <= 0 or self.h_sites_per_molecule < 0:
            raise ConfigError("solvent density, molar mass and site count must be physical")

    @property
    def effective_fraction(self) -> float:
        return min(1.0, self.protonation_fraction * self.counter_ion_boost)


def site_count(config: BathConfig) -> int:
    """Number of residual protons in the cube."""
    volume_cm3 = (config.edge * 1e-8) ** 3
    molecules = config.solvent_density / config.solvent_molar_mass * C.AVOGADRO * volume_cm3
    return int(round(molecules * config.h_sites_per_molecule * config.effective_fraction))


def point_dipole_Azz(electron_position, nucleus_position, gamma_n: float | None = None, gamma_e: float = C.GAMMA_E):
    """Point-dipole hyperfine ``(mu0/4pi) g_e g_n hbar (3 cos^2 theta - 1) / r^3`` in rad s^-1.

    Accepts a single nucleus position or an ``(n, 3)`` array.
    """
    if gamma_n is None:
        gamma_n = C.ISOTOPES["1H"].gamma
    rvec = np.asarray(nucleus_position, dtype=float) - np.asarray(electron_position, dtype=float)
    r = np.linalg.norm(rvec, axis=-1)
    if np.any(r == 0):
        raise DomainError("nucleus coincides with the electron")
    cos2 = (rvec[..., 2] / r) ** 2
    A = C.MU0_OVER_4PI * gamma_e * gamma_n * C.HBAR * (3.0 * cos2 - 1.0) / (r * C.ANGSTROM) ** 3
    return float(A) if np.ndim(A) == 0 else A


def sample_positions(config: BathConfig, n: int, electron_position=(0.0, 0.0, 0.0)) -> np.ndarray:
    """``n`` accepted positions (A) in the cube centred at the origin."""
    e = np.asarray(electron_position, dtype=float)
    half = config.edge / 2
    if np.any(np.abs(e) > half):
        raise DomainError("electron position lies outside the cube")
    rng = np.random.Generator(np.random.PCG64(config.seed))
    out = np.empty((n, 3))
    count = 0
    attempts = 0
    budget = max(1, n) * config.max_attempts_per_spin
    excl2 = config.exclusion_radius**2
    sep2 = config.min_separation**2
    while count < n:
        batch = rng.uniform(-half, half, size=(_BATCH, 3))
        for p in batch:
            attempts += 1
            if attempts > budget:
                raise BathGenerationError(
                    f"placed {count} of {n} spins after {budget} attempts; bath too dense for the exclusion rules"
                )
            if np.sum((p - e) ** 2) < excl2:
                continue
            if count and np.min(np.sum((out[:count] - p) ** 2, axis=1)) < sep2:
                continue
            out[count] = p
            count += 1
            if count == n:
                break
    return out


def generate_bath(
    config: BathConfig,
    electron_position=(0.0, 0.0, 0.0),
    *,
    start_id: int = 0,
    gamma_e: float = C.GAMMA_E,
) -> list[NuclearSpin]:
    """Residual solvent protons with point-dipole hyperfine couplings."""
    n = site_count(config)
    pos = sample_positions(config, n, electron_position)
    if n == 0:
        return []
    A = np.atleast_1d(point_dipole_Azz(electron_position, pos, gamma_e=gamma_e))
    return [
        NuclearSpin.from_isotope(start_id + i, "1H", tuple(p), A_zz=float(a))
        for i, (p, a) in enumerate(zip(pos, A))
    ]
