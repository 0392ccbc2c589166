import math

import numpy as np
import pytest

from tclecho import ConfigError, ParseError
from tclecho import constants as C
from tclecho.fileio import (
    Atom,
    atomic_write,
    emit_series_csv,
    load_config,
    pairs_text,
    parse_hyperfine_csv,
    parse_xyz,
    read_series_csv,
    read_spins_csv,
    write_spins_csv,
)
from tclecho.spin_model import NuclearSpin, build_pairs
from tclecho.tcl_engine import EchoSeries

XYZ = "3\nwater plus\nO 0.0 0.0 0.0\nH 0.76 0.59 0.0\nh -0.76 0.59 0.0\n"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_parse_xyz(tmp_path):
    atoms = parse_xyz(write(tmp_path, "w.xyz", XYZ))
    assert atoms == [Atom("O", (0.0, 0.0, 0.0)), Atom("H", (0.76, 0.59, 0.0)), Atom("H", (-0.76, 0.59, 0.0))]


@pytest.mark.parametrize(
    "text,line",
    [
        ("", 1),
        ("three\nc\n", 1),
        ("3\nc\nO 0 0 0\nH 1 0 0\n", 4),
        ("2\nc\nO 0 0 0\nH 1 x 0\n", 4),
        ("2\nc\nO 0 0 0\nH 1 0\n", 4),
        ("1\nc\nO 0 0 0\nH 1 0 0\n", 4),
    ],
)
def test_parse_xyz_errors_carry_line(tmp_path, text, line):
    with pytest.raises(ParseError) as exc:
        parse_xyz(write(tmp_path, "bad.xyz", text))
    assert exc.value.line == line
    assert "bad.xyz" in str(exc.value)


def test_missing_file_is_parse_error(tmp_path):
    with pytest.raises(ParseError):
        parse_xyz(tmp_path / "nope.xyz")


def hyperfine(tmp_path, body):
    atoms = [Atom("O", (0, 0, 0))] + [Atom("H", (float(i), 0, 0)) for i in range(1, 4)] + [Atom("V", (0, 0, 1.0))]
    return parse_hyperfine_csv(write(tmp_path, "hf.csv", "index,isotope,azz,azz_unit\n" + body), atoms)


def test_hyperfine_units(tmp_path):
    spins = hyperfine(tmp_path, "3,1H,1.0,MHz\n1,1H,-2500.5,rad_s\n4,51V,-480,MHz\n2,D,10,rad_s\n")
    assert spins[0].A_zz == pytest.approx(6.283185307179586e6, rel=1e-15)
    assert spins[0].position == (3.0, 0, 0) and spins[0].id == 3
    assert spins[1].A_zz == -2500.5
    assert spins[2].isotope == "51V" and spins[2].spin_I == 3.5
    assert spins[3].isotope == "2D" and spins[3].spin_I == 1.0


@pytest.mark.parametrize(
    "body,line",
    [
        ("1,1H,1.0,MHz\n1,1H,2.0,MHz\n", 3),
        ("1,1H,1.0,kHz\n", 2),
        ("1,13C,1.0,MHz\n", 2),
        ("9,1H,1.0,MHz\n", 2),
        ("1,1H,abc,MHz\n", 2),
        ("1,Xx,1.0,MHz\n", 2),
        ("1,1H,1.0\n", 2),
    ],
)
def test_hyperfine_errors(tmp_path, body, line):
    with pytest.raises(ParseError) as exc:
        hyperfine(tmp_path, body)
    assert exc.value.line == line


def test_hyperfine_header_checked(tmp_path):
    with pytest.raises(ParseError):
        parse_hyperfine_csv(write(tmp_path, "hf.csv", "idx,iso,a,u\n"), [])


def test_series_roundtrip(tmp_path):
    t = np.linspace(0, 2e-5, 512)
    s = EchoSeries(t, np.exp(-((t / 1e-5) ** 2)) * (1 + 1e-13 * np.pi), "TCL4")
    path = tmp_path / "s.csv"
    emit_series_csv(s, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 513 and lines[0] == "time_us,coherence,method"
    assert lines[-1].split(",")[0] == "20"
    back = read_series_csv(path)
    assert back.method == "TCL4"
    np.testing.assert_array_equal(back.values, s.values)
    np.testing.assert_allclose(back.times, t, rtol=1e-8, atol=1e-20)  # 9 significant digits


def test_empty_series(tmp_path):
    path = tmp_path / "e.csv"
    emit_series_csv(EchoSeries(np.zeros(0), np.zeros(0), "TCL2"), path)
    assert path.read_text() == "time_us,coherence,method\n"


def test_spins_roundtrip(tmp_path, rng):
    spins = [
        NuclearSpin.from_isotope(i, iso, tuple(rng.normal(0, 5, 3)), A_zz=float(rng.normal(0, 1e5)))
        for i, iso in enumerate(["1H", "2D", "51V", "1H"])
    ]
    path = tmp_path / "spins.csv"
    write_spins_csv(spins, path)
    assert read_spins_csv(path) == spins
    write(tmp_path, "dup.csv", path.read_text() + "0,1H,0,0,0,1\n")
    with pytest.raises(ParseError):
        read_spins_csv(tmp_path / "dup.csv")


def test_pairs_text_columns():
    spins = [NuclearSpin.from_isotope(i, "1H", (float(i), 0, 0), A_zz=1e4 * i) for i in range(3)]
    lines = pairs_text(build_pairs(spins)).splitlines()
    assert lines[0] == "k,l,delta_rad_s,b_rad_s,alpha_sq,freq_rad_s"
    assert len(lines) == 4


def test_atomic_write_replaces(tmp_path):
    p = tmp_path / "out.txt"
    atomic_write(p, "one")
    atomic_write(p, "two")
    assert p.read_text() == "two"
    assert [f.name for f in tmp_path.iterdir()] == ["out.txt"]


def test_config_loading(tmp_path):
    write(tmp_path, "m.xyz", XYZ)
    cfg_path = write(
        tmp_path,
        "run.ini",
        "[field]\nB0 = 1.2\n[run]\ngeometry = m.xyz\nhorizon_us = 50\npoints = 64\norder = tcl4\nseed = 9\n"
        "[bath]\nedge = 30\nprotonation_fraction = 0.05\nelectron = 1, 2, 3\n"
        "[constants]\n1H.gamma = 2.5e8\n51V.spin_I = 3.5\n",
    )
    cfg = load_config(cfg_path, env={})
    assert cfg.field.B0 == 1.2
    assert cfg.geometry == tmp_path / "m.xyz"
    assert (cfg.horizon_us, cfg.points, cfg.order, cfg.seed) == (50.0, 64, "TCL4", 9)
    assert cfg.bath_config.edge == 30.0 and cfg.bath_config.seed == 9
    assert cfg.electron_position == (1.0, 2.0, 3.0)
    assert C.lookup_isotope("1H").gamma == 2.5e8
    assert load_config(cfg_path, env={"SPIN_SEED": "42"}).bath_config.seed == 42


def test_config_defaults_and_errors(tmp_path):
    cfg = load_config(None, env={})
    assert cfg.points == 512 and cfg.seed == 0 and cfg.field.B0 == 0.35
    with pytest.raises(ConfigError):
        load_config(None, env={"SPIN_SEED": "x"})
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "b.ini", "[run]\npoints = many\n"), env={})
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini", env={})
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "c.ini", "[run]\norder = tcl4\nhorizon_us = -1\n"), env={}).validate()


def test_mhz_factor_is_two_pi():
    assert 2 * math.pi * 1e6 == pytest.approx(6.2832e6, rel=1e-5)
