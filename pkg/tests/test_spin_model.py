import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tclecho import DomainError
from tclecho.spin_model import (
    FieldConfig,
    NuclearSpin,
    PairParams,
    build_pairs,
    dipolar_coupling,
    heteronuclear_pairs,
    pair_amplitude,
    pair_delta,
    pair_frequency,
    spin_matrices,
)

MAGIC = math.acos(1 / math.sqrt(3))
finite = st.floats(-1e7, 1e7, allow_nan=False)
nonzero = finite.filter(lambda x: abs(x) > 1e-3)


def proton(i, pos, A=0.0):
    return NuclearSpin.from_isotope(i, "1H", pos, A_zz=A)


def test_pair_delta_examples():
    assert pair_delta(5.0e5, 2.0e5) == 3.0e5
    assert pair_delta(1.7e4, 1.7e4) == 0
    assert pair_delta(0, 4.0e5) == -4.0e5


@given(finite, finite)
def test_pair_delta_antisymmetric(a, b):
    assert pair_delta(a, b) == -pair_delta(b, a)


def test_dipolar_two_protons_along_field():
    # (mu0/4pi) gamma_H^2 hbar * 2 / (2 A)^3 evaluated by hand
    b = dipolar_coupling(proton(0, (0, 0, 0)), proton(1, (0, 0, 2.0)))
    assert b == pytest.approx(188684.307906308, rel=1e-12)


def test_dipolar_magic_angle_vanishes():
    r = 2.5
    pos = (r * math.sin(MAGIC), 0.0, r * math.cos(MAGIC))
    assert abs(dipolar_coupling(proton(0, (0, 0, 0)), proton(1, pos))) < 1e-9


def test_dipolar_cubic_law_and_symmetry():
    k = proton(0, (0.3, -0.2, 0.1))
    l1 = proton(1, (1.3, 0.8, 2.1))
    b1 = dipolar_coupling(k, l1)
    assert dipolar_coupling(l1, k) == b1
    d = np.subtract(l1.position, k.position)
    l2 = proton(2, tuple(np.add(k.position, 2 * d)))
    assert dipolar_coupling(k, l2) == pytest.approx(b1 / 8, rel=1e-12)


def test_dipolar_coincident_raises():
    with pytest.raises(DomainError):
        dipolar_coupling(proton(0, (1, 1, 1)), proton(1, (1, 1, 1)))


@pytest.mark.parametrize(
    "delta,b,expected",
    [(2.0e5, 2.0e5, 1.0), (1.0e5, 0.0, 0.0), (3.0, 4.0, 0.9216), (0.0, 5.0, 0.0), (0.0, 0.0, 0.0)],
)
def test_pair_amplitude_examples(delta, b, expected):
    assert pair_amplitude(delta, b) == pytest.approx(expected, abs=1e-15)


@given(nonzero, nonzero)
def test_pair_amplitude_symmetries(d, b):
    a = pair_amplitude(d, b)
    assert 0.0 <= a <= 1.0
    assert a == pytest.approx(pair_amplitude(b, d), abs=1e-12)
    assert a == pytest.approx(pair_amplitude(-d, b), abs=1e-12)


@given(nonzero, st.floats(0.01, 100))
def test_pair_amplitude_maximum_only_at_equal_magnitude(d, ratio):
    a = pair_amplitude(d, d * ratio)
    if abs(ratio - 1) > 1e-6:
        assert a < 1.0
    assert pair_amplitude(d, -d) == pytest.approx(1.0, abs=1e-15)


def test_pair_frequency_examples():
    assert pair_frequency(3, 4) == 1.25
    assert pair_frequency(0, 2) == 0.5
    assert pair_frequency(6e4, 8e4) == pytest.approx(2 * pair_frequency(3e4, 4e4))


@given(finite, finite)
def test_pair_frequency_bounds(d, b):
    f = pair_frequency(d, b)
    assert f >= abs(b) / 4 - 1e-9 and f >= abs(d) / 4 - 1e-9


def test_pair_params_invariants():
    p = PairParams.from_couplings(0.0, 0.0)
    assert p.alpha_sq == 0 and p.freq == 0
    p = PairParams.from_couplings(1e4, -3e4)
    assert 0 <= p.alpha_sq <= 1 and p.freq > 0


def test_nuclear_spin_validation():
    with pytest.raises(DomainError):
        NuclearSpin(0, "1H", 0.3, 1.0, (0, 0, 0))
    with pytest.raises(DomainError):
        NuclearSpin(0, "1H", 0.5, 1.0, (0, float("nan"), 0))
    s = NuclearSpin.from_isotope(3, "51V", (0, 0, 0))
    assert s.spin_I == 3.5 and s.multiplicity == 8


def test_field_config():
    f = FieldConfig(B0=0.35)
    assert f.omega_e == pytest.approx(-1.76085963e11 * 0.35)
    with pytest.raises(DomainError):
        FieldConfig(B0=0.0)


def _spins(n, seed=0):
    rng = np.random.default_rng(seed)
    return [proton(i, tuple(rng.uniform(-8, 8, 3)), A=rng.normal(0, 1e5)) for i in range(n)]


def test_build_pairs_counts():
    assert len(build_pairs(_spins(2))) == 1
    assert len(build_pairs(_spins(7))) == 21
    assert build_pairs(_spins(1)) == []
    mixed = _spins(3) + [NuclearSpin.from_isotope(99, "51V", (0, 0, 0.5))]
    assert len(build_pairs(mixed)) == 3
    assert len(heteronuclear_pairs(mixed)) == 3


def test_build_pairs_ordering_and_values():
    spins = _spins(5, seed=3)
    pairs = build_pairs(spins)
    assert [p.ids for p in pairs] == list(itertools.combinations(range(5), 2))
    by_id = {s.id: s for s in spins}
    for p in pairs:
        k, l = (by_id[i] for i in p.ids)
        assert p.delta == pytest.approx(k.A_zz - l.A_zz)
        assert p.b == pytest.approx(dipolar_coupling(k, l), rel=1e-12)
        assert p.alpha_sq == pytest.approx(pair_amplitude(p.delta, p.b))


@settings(max_examples=25)
@given(st.permutations(list(range(6))))
def test_build_pairs_permutation_invariant(perm):
    spins = _spins(6, seed=11)
    ref = build_pairs(spins)
    assert build_pairs([spins[i] for i in perm]) == ref


def test_duplicate_ids_rejected():
    with pytest.raises(DomainError):
        build_pairs([proton(1, (0, 0, 0)), proton(1, (0, 0, 3))])


@pytest.mark.parametrize("I", [0.5, 1.0, 1.5, 3.5])
def test_spin_matrices_commutation(I):
    Iz, Ip, Im = spin_matrices(I)
    assert np.allclose(Iz @ Ip - Ip @ Iz, Ip)
    assert np.allclose(Ip @ Im - Im @ Ip, 2 * Iz)
    casimir = Iz @ Iz + 0.5 * (Ip @ Im + Im @ Ip)
    assert np.allclose(casimir, I * (I + 1) * np.eye(len(Iz)))
