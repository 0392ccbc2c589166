"""
Physical constants and the isotope table.

All gyromagnetic ratios are in rad s^-1 T^-1. The isotope table can be
overridden at run time through :func:`override_isotope`, which the config
loader uses for ``[constants]`` entries.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError

HBAR = 1.054571817e-34  # J s
MU0_OVER_4PI = 1e-7  # T m / A
AVOGADRO = 6.02214076e23  # 1/mol
GAMMA_E = -1.76085963e11  # rad s^-1 T^-1, free electron

ANGSTROM = 1e-10  # m


@dataclass(frozen=True)
class Isotope:
    symbol: str
    spin_I: float
    gamma: float


_DEFAULT_ISOTOPES = {
    "1H": Isotope("1H", 0.5, 2.6752218744e8),
    "2D": Isotope("2D", 1.0, 4.10663e7),
    "13C": Isotope("13C", 0.5, 6.728284e7),
    "14N": Isotope("14N", 1.0, 1.9337792e7),
    "15N": Isotope("15N", 0.5, -2.71261804e7),
    "31P": Isotope("31P", 0.5, 1.0839e8),
    "51V": Isotope("51V", 3.5, 7.0455e7),
    "55Mn": Isotope("55Mn", 2.5, 6.6453e7),
    "63Cu": Isotope("63Cu", 1.5, 7.1118e7),
}

_ALIASES = {"2H": "2D", "D": "2D", "H": "1H"}

ISOTOPES: dict[str, Isotope] = dict(_DEFAULT_ISOTOPES)


def normalize_isotope(tag: str) -> str:
    """Canonical isotope key, e.g. ``"1h"`` -> ``"1H"``, ``"2H"`` -> ``"2D"``."""
    tag = tag.strip()
    digits = "".join(ch for ch in tag if ch.isdigit())
    letters = "".join(ch for ch in tag if ch.isalpha())
    if not letters:
        raise KeyError(tag)
    canon = digits + letters[0].upper() + letters[1:].lower()
    return _ALIASES.get(canon, canon)


def lookup_isotope(tag: str) -> Isotope:
    try:
        key = normalize_isotope(tag)
        return ISOTOPES[key]
    except KeyError:
        raise ConfigError(f"unknown isotope {tag!r}") from None


def override_isotope(tag: str, *, gamma: float | None = None, spin_I: float | None = None) -> None:
    key = normalize_isotope(tag)
    base = ISOTOPES.get(key)
    if base is None:
        if gamma is None or spin_I is None:
            raise ConfigError(f"new isotope {tag!r} needs both gamma and spin_I")
        ISOTOPES[key] = Isotope(key, float(spin_I), float(gamma))
        return
    ISOTOPES[key] = Isotope(
        key,
        base.spin_I if spin_I is None else float(spin_I),
        base.gamma if gamma is None else float(gamma),
    )


def reset_isotopes() -> None:
    ISOTOPES.clear()
    ISOTOPES.update(_DEFAULT_ISOTOPES)
