"""
Readers and writers for the on-disk formats.

Formats
-------
XYZ geometry
    line 1 atom count, line 2 comment, then ``element x y z`` rows (A).
Hyperfine CSV
    header ``index,isotope,azz,azz_unit``; ``index`` is the 0-based atom row
    in the XYZ file, ``azz_unit`` is ``rad_s`` or ``MHz`` (``MHz`` means
    ``A / 2 pi`` and is multiplied by ``2 pi 1e6``).
Spin CSV
    header ``id,isotope,x,y,z,azz_rad_s``; shared by bath output and echo input.
Series CSV
    header ``time_us,coherence,method``.

Every writer goes through a temporary file in the target directory followed
by an atomic rename.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
import os
import tempfile
import dataclasses
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import constants as C
from .bath_builder import BathConfig
from .errors import ConfigError, ParseError
from .spin_model import FieldConfig, NuclearSpin, PairParams
from .tcl_engine import EchoSeries

SERIES_HEADER = ["time_us", "coherence", "method"]
SPIN_HEADER = ["id", "isotope", "x", "y", "z", "azz_rad_s"]
HYPERFINE_HEADER = ["index", "isotope", "azz", "azz_unit"]


@dataclass(frozen=True)
class Atom:
    element: str
    position: tuple[float, float, float]


def atomic_write(path, text: str) -> None:
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _read_lines(path) -> list[str]:
    try:
        with open(path, newline="") as fh:
            return fh.read().splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", path) from exc


def _float(tok: str, path, line: int, what: str) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"{what} {tok!r} is not a number", path, line) from None
    if not math.isfinite(v):
        raise ParseError(f"{what} {tok!r} is not finite", path, line)
    return v


def _normalize_element(sym: str) -> str:
    return sym[:1].upper() + sym[1:].lower()


def parse_xyz(path) -> list[Atom]:
    lines = _read_lines(path)
    if not lines or not lines[0].strip():
        raise ParseError("empty file or missing atom count", path, 1)
    try:
        count = int(lines[0].strip())
    except ValueError:
        raise ParseError(f"atom count {lines[0].strip()!r} is not an integer", path, 1) from None
    if count < 0:
        raise ParseError("negative atom count", path, 1)
    if len(lines) < 2:
        raise ParseError("missing comment line", path, 1)
    atoms = []
    for i in range(count):
        lineno = i + 3
        if lineno > len(lines):
            raise ParseError(f"expected {count} atom rows but the file ends after line {len(lines)}", path, len(lines))
        tok = lines[lineno - 1].split()
        if len(tok) != 4:
            raise ParseError(f"expected 'element x y z', got {len(tok)} fields", path, lineno)
        if not tok[0].isalpha():
            raise ParseError(f"bad element symbol {tok[0]!r}", path, lineno)
        xyz = tuple(_float(t, path, lineno, "coordinate") for t in tok[1:])
        atoms.append(Atom(_normalize_element(tok[0]), xyz))
    for j in range(count + 2, len(lines)):
        if lines[j].strip():
            raise ParseError("unexpected content after the last atom row", path, j + 1)
    return atoms


def _check_header(lines, expected, path):
    if not lines:
        raise ParseError("empty file", path, 1)
    got = [h.strip() for h in next(csv.reader([lines[0]]))]
    if got != expected:
        raise ParseError(f"header must be {','.join(expected)}, got {lines[0]!r}", path, 1)


def _rows(lines, width, path):
    for lineno, row in enumerate(csv.reader(lines[1:]), start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != width:
            raise ParseError(f"expected {width} fields, got {len(row)}", path, lineno)
        yield lineno, [c.strip() for c in row]


def _element_of(isotope: str) -> str:
    key = C.normalize_isotope(isotope)
    letters = "".join(ch for ch in key if ch.isalpha())
    return "H" if letters == "D" else letters


def parse_hyperfine_csv(path, atoms: list[Atom]) -> list[NuclearSpin]:
    """Nuclear spins from a hyperfine table joined with XYZ positions."""
    lines = _read_lines(path)
    _check_header(lines, HYPERFINE_HEADER, path)
    spins = []
    seen = set()
    for lineno, (idx, iso, azz, unit) in _rows(lines, 4, path):
        try:
            index = int(idx)
        except ValueError:
            raise ParseError(f"index {idx!r} is not an integer", path, lineno) from None
        if index in seen:
            raise ParseError(f"duplicate index {index}", path, lineno)
        seen.add(index)
        if not 0 <= index < len(atoms):
            raise ParseError(f"index {index} outside the {len(atoms)} geometry atoms", path, lineno)
        try:
            isotope = C.lookup_isotope(iso)
        except ConfigError:
            raise ParseError(f"unknown isotope {iso!r}", path, lineno) from None
        if _element_of(isotope.symbol) != atoms[index].element:
            raise ParseError(
                f"isotope {iso} does not match element {atoms[index].element} of atom {index}", path, lineno
            )
        value = _float(azz, path, lineno, "azz")
        if unit == "rad_s":
            a = value
        elif unit == "MHz":
            a = 2.0 * math.pi * 1e6 * value
        else:
            raise ParseError(f"unknown azz_unit {unit!r} (rad_s or MHz)", path, lineno)
        spins.append(NuclearSpin(index, isotope.symbol, isotope.spin_I, isotope.gamma, atoms[index].position, a))
    return spins


def spins_text(spins) -> str:
    rows = [
        [s.id, s.isotope, repr(s.position[0]), repr(s.position[1]), repr(s.position[2]), repr(float(s.A_zz))]
        for s in spins
    ]
    return _csv_text(SPIN_HEADER, rows)


def write_spins_csv(spins, path) -> None:
    atomic_write(path, spins_text(spins))


def read_spins_csv(path) -> list[NuclearSpin]:
    lines = _read_lines(path)
    _check_header(lines, SPIN_HEADER, path)
    spins, seen = [], set()
    for lineno, (sid, iso, x, y, z, azz) in _rows(lines, 6, path):
        try:
            ident = int(sid)
        except ValueError:
            raise ParseError(f"id {sid!r} is not an integer", path, lineno) from None
        if ident in seen:
            raise ParseError(f"duplicate id {ident}", path, lineno)
        seen.add(ident)
        try:
            isotope = C.lookup_isotope(iso)
        except ConfigError:
            raise ParseError(f"unknown isotope {iso!r}", path, lineno) from None
        pos = tuple(_float(v, path, lineno, "coordinate") for v in (x, y, z))
        a = _float(azz, path, lineno, "azz_rad_s")
        spins.append(NuclearSpin(ident, isotope.symbol, isotope.spin_I, isotope.gamma, pos, a))
    return spins


def series_text(series: EchoSeries) -> str:
    rows = [[f"{t * 1e6:.9g}", repr(float(v)), series.method] for t, v in zip(series.times, series.values)]
    return _csv_text(SERIES_HEADER, rows)


def emit_series_csv(series: EchoSeries, path) -> None:
    """Write ``time_us,coherence,method`` rows; time with 9 significant digits."""
    atomic_write(path, series_text(series))


def read_series_csv(path) -> EchoSeries:
    lines = _read_lines(path)
    _check_header(lines, SERIES_HEADER, path)
    t, v, methods = [], [], set()
    for lineno, (tu, c, m) in _rows(lines, 3, path):
        t.append(_float(tu, path, lineno, "time_us") * 1e-6)
        v.append(_float(c, path, lineno, "coherence"))
        methods.add(m.upper())
    if len(methods) > 1:
        raise ParseError(f"mixed methods {sorted(methods)} in one series", path)
    return EchoSeries(np.array(t), np.array(v), methods.pop() if methods else "EXACT")


PAIRS_HEADER = ["k", "l", "delta_rad_s", "b_rad_s", "alpha_sq", "freq_rad_s"]


def pairs_text(pairs: list[PairParams]) -> str:
    rows = [
        [*(p.ids if p.ids else ("", "")), repr(p.delta), repr(p.b), repr(p.alpha_sq), repr(p.freq)]
        for p in pairs
    ]
    return _csv_text(PAIRS_HEADER, rows)


def table_text(header, rows) -> str:
    return _csv_text(header, rows)


# --------------------------------------------------------------------- config


@dataclass
class RunConfig:
    field: FieldConfig = dataclasses.field(default_factory=FieldConfig)
    geometry: Path | None = None
    hyperfine: Path | None = None
    bath: Path | None = None
    horizon_us: float = 20.0
    points: int = 512
    order: str = "TCL2"
    include_hetero: bool = False
    output: Path | None = None
    seed: int = 0
    bath_config: BathConfig = dataclasses.field(default_factory=BathConfig)
    electron_position: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def validate(self) -> "RunConfig":
        if not self.horizon_us > 0:
            raise ConfigError("horizon must be positive")
        if self.points < 2:
            raise ConfigError("grid needs at least 2 points")
        if self.order.upper() not in ("TCL2", "TCL4"):
            raise ConfigError(f"order must be tcl2 or tcl4, got {self.order!r}")
        for name in ("geometry", "hyperfine", "bath"):
            p = getattr(self, name)
            if p is not None and not Path(p).is_file():
                raise ConfigError(f"{name} file {p} does not exist")
        return self


def _parse_vector(text: str) -> tuple[float, float, float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != 3:
        raise ConfigError(f"expected three coordinates, got {text!r}")
    return tuple(float(p) for p in parts)


def load_config(path=None, env=None) -> RunConfig:
    """Read an INI-style config; ``SPIN_SEED`` in the environment overrides the seed.

    Sections: ``[field]`` (B0, gamma_e), ``[run]`` (geometry, hyperfine, bath,
    horizon_us, points, order, include_hetero, output, seed), ``[bath]``
    (any :class:`BathConfig` field plus ``electron = x, y, z``) and
    ``[constants]`` with keys like ``1H.gamma`` or ``51V.spin_I``.
    """
    env = os.environ if env is None else env
    cfg = RunConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        base = Path(path).parent
        try:
            cfg = _apply_config(parser, cfg, base)
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{path}: {exc}") from exc
    if env.get("SPIN_SEED"):
        try:
            cfg.seed = int(env["SPIN_SEED"])
        except ValueError:
            raise ConfigError(f"SPIN_SEED must be an integer, got {env['SPIN_SEED']!r}") from None
    cfg.bath_config = replace(cfg.bath_config, seed=cfg.seed)
    return cfg


def _apply_config(parser, cfg: RunConfig, base: Path) -> RunConfig:
    if parser.has_section("field"):
        sec = parser["field"]
        cfg.field = FieldConfig(
            B0=sec.getfloat("B0", cfg.field.B0), gamma_e=sec.getfloat("gamma_e", cfg.field.gamma_e)
        )
    if parser.has_section("run"):
        sec = parser["run"]
        for name in ("geometry", "hyperfine", "bath", "output"):
            if name in sec:
                p = Path(sec[name])
                setattr(cfg, name, p if p.is_absolute() else base / p)
        cfg.horizon_us = sec.getfloat("horizon_us", cfg.horizon_us)
        cfg.points = sec.getint("points", cfg.points)
        cfg.order = sec.get("order", cfg.order).upper()
        cfg.include_hetero = sec.getboolean("include_hetero", cfg.include_hetero)
        cfg.seed = sec.getint("seed", cfg.seed)
    if parser.has_section("bath"):
        sec = parser["bath"]
        kw = {}
        for f in fields(BathConfig):
            if f.name in sec and f.name != "seed":
                kw[f.name] = int(sec[f.name]) if f.type in ("int", int) else float(sec[f.name])
        cfg.bath_config = replace(cfg.bath_config, **kw)
        if "electron" in sec:
            cfg.electron_position = _parse_vector(sec["electron"])
    if parser.has_section("constants"):
        for key, value in parser["constants"].items():
            iso, _, prop = key.rpartition(".")
            if prop.lower() == "gamma":
                C.override_isotope(iso, gamma=float(value))
            elif prop.lower() == "spin_i":
                C.override_isotope(iso, spin_I=float(value))
            else:
                raise ConfigError(f"unknown constants key {key!r}")
    return cfg
