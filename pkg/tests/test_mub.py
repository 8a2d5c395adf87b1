"""Tests for construction, certification, and serialization of basis sets."""

import math

import numpy as np
import pytest

from qraclab.errors import (
    DimensionMismatchError,
    NonUnitaryError,
    NotPrimePowerError,
    ParseError,
    UnbiasednessError,
)
from qraclab.gf import GaloisField, factor_prime_power
from qraclab.mub import (
    Basis,
    MubSet,
    certify_mub_set,
    check_unbiased,
    galois_mubs,
    load_bases,
    save_bases,
)

RNG = np.random.default_rng(20240818)

PRIME_POWERS_16 = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16]


# -- Basis / MubSet containers ----------------------------------------------


def test_basis_is_readonly_and_square():
    b = Basis(np.eye(3), label="x")
    assert b.dim == 3
    assert np.array_equal(b.state(1), np.array([0, 1, 0], dtype=complex))
    with pytest.raises(ValueError):
        b.matrix[0, 0] = 5.0
    with pytest.raises(DimensionMismatchError):
        Basis(np.zeros((2, 3)))


def test_mubset_sequence_protocol(mubs):
    ms = mubs(3)
    assert isinstance(ms, MubSet)
    assert len(ms) == 4
    assert ms[0].label == "galois:0"
    assert ms[3].label == "galois:3"
    assert ms.construction == "galois"


# -- unbiasedness measure ----------------------------------------------------


@pytest.mark.parametrize("d", [2, 3, 5, 9])
def test_check_unbiased_self_overlap(d):
    # A basis against itself: unit diagonal overlaps deviate by
    # 1 - 1/sqrt(d), zero off-diagonal ones by 1/sqrt(d).
    b = Basis(np.eye(d))
    expect = max(1 - 1 / math.sqrt(d), 1 / math.sqrt(d))
    assert check_unbiased(b, b) == pytest.approx(expect, abs=1e-15)


def test_check_unbiased_fourier_pair():
    d = 3
    f = np.exp(2j * np.pi * np.outer(np.arange(d), np.arange(d)) / d) / math.sqrt(d)
    assert check_unbiased(np.eye(d), f) < 1e-12


def test_check_unbiased_random_pair_is_biased():
    d = 5
    z = RNG.normal(size=(d, d)) + 1j * RNG.normal(size=(d, d))
    q = np.linalg.qr(z)[0]
    assert check_unbiased(np.eye(d), q) > 1e-3


def test_check_unbiased_shape_mismatch():
    with pytest.raises(DimensionMismatchError):
        check_unbiased(np.eye(2), np.eye(3))


# -- certification -----------------------------------------------------------


def test_certify_rejects_non_unitary():
    with pytest.raises(NonUnitaryError):
        certify_mub_set([Basis(2 * np.eye(2)), Basis(np.eye(2))])


def test_certify_rejects_biased_family(mubs):
    ms = mubs(3)
    doctored = [ms[0], ms[1], Basis(np.eye(3), label="dup")]
    with pytest.raises(UnbiasednessError):
        certify_mub_set(doctored)


def test_certify_rejects_mixed_dimension():
    with pytest.raises(DimensionMismatchError):
        certify_mub_set([Basis(np.eye(2)), Basis(np.eye(3))])
    with pytest.raises(DimensionMismatchError):
        certify_mub_set([])


# -- construction, odd characteristic ----------------------------------------


@pytest.mark.parametrize("d", [3, 5, 7, 11, 13])
def test_prime_dimension_quadratic_phases(d):
    # For prime d basis mu (mu >= 1) must be the quadratic-phase matrix
    # with amplitude j of state i equal to omega^((mu-1) j^2 + i j)/sqrt(d).
    ms = galois_mubs(d)
    j = np.arange(d)
    omega = np.exp(2j * np.pi / d)
    for mu in range(1, d + 1):
        a = mu - 1
        expect = omega ** ((a * j[:, None] ** 2 + j[None, :] * j[:, None]) % d)
        expect = expect / math.sqrt(d)
        assert np.max(np.abs(ms[mu].matrix - expect)) < 1e-12


def test_prime_power_trace_phases():
    # d = 9: amplitudes follow omega_3^tr(a j^2 + i j) with field elements
    # enumerated little endian in base 3.
    d = 9
    ms = galois_mubs(d)
    f = GaloisField(3, 2)
    omega = np.exp(2j * np.pi / 3)
    for mu in [1, 2, 5, 9]:
        a = f.element(mu - 1)
        m = ms[mu].matrix
        for i in range(d):
            ei = f.element(i)
            for j in range(d):
                ej = f.element(j)
                t = f.trace(f.add(f.mul(a, f.mul(ej, ej)), f.mul(ei, ej)))
                expect = omega ** t / math.sqrt(d)
                assert abs(m[j, i] - expect) < 1e-12


# -- construction, characteristic 2 -------------------------------------------


def test_dim_two_bases_pinned():
    ms = galois_mubs(2)
    s = 1 / math.sqrt(2)
    assert np.max(np.abs(ms[0].matrix - np.eye(2))) == 0.0
    assert np.max(np.abs(ms[1].matrix - np.array([[s, s], [s, -s]]))) < 1e-15
    assert np.max(np.abs(ms[2].matrix - np.array([[s, s], [1j * s, -1j * s]]))) < 1e-15


@pytest.mark.parametrize("d", [2, 4, 8, 16])
def test_even_characteristic_fourth_roots(d):
    # Every amplitude of the non-computational bases is a fourth root of
    # unity over sqrt(d).
    ms = galois_mubs(d)
    roots = np.array([1, 1j, -1, -1j]) / math.sqrt(d)
    for mu in range(1, d + 1):
        m = ms[mu].matrix
        dist = np.min(np.abs(m[:, :, None] - roots[None, None, :]), axis=2)
        assert np.max(dist) < 1e-12


# -- certification of the full families ---------------------------------------


@pytest.mark.parametrize("d", PRIME_POWERS_16)
def test_full_family_certified(d, mubs):
    ms = mubs(d)
    assert ms.dim == d
    assert len(ms) == d + 1
    assert ms.max_deviation <= 1e-10
    # Independent recheck of every pair.
    worst = 0.0
    for i in range(d + 1):
        for j in range(i + 1, d + 1):
            worst = max(worst, check_unbiased(ms[i], ms[j]))
    assert worst <= 1e-10
    assert worst == ms.max_deviation


@pytest.mark.parametrize("d", [6, 10, 12, 15])
def test_composite_dimension_rejected(d):
    with pytest.raises(NotPrimePowerError):
        galois_mubs(d)
    with pytest.raises(NotPrimePowerError):
        factor_prime_power(d)


def test_construction_is_deterministic():
    a = galois_mubs(9)
    b = galois_mubs(9)
    for x, y in zip(a.bases, b.bases):
        assert np.array_equal(x.matrix, y.matrix)


# -- serialization ------------------------------------------------------------


@pytest.mark.parametrize("d", [2, 3, 4, 5, 9])
def test_save_load_round_trip_bitwise(d, mubs, tmp_path):
    ms = mubs(d)
    path = tmp_path / f"bases{d}.json"
    save_bases(ms, str(path))
    loaded = load_bases(str(path))
    assert len(loaded) == len(ms)
    for orig, back in zip(ms.bases, loaded):
        assert np.array_equal(orig.matrix, back.matrix)


def test_save_plain_list(tmp_path):
    path = tmp_path / "pair.json"
    f = np.exp(2j * np.pi * np.outer(np.arange(3), np.arange(3)) / 3) / math.sqrt(3)
    save_bases([Basis(np.eye(3)), Basis(f)], str(path))
    loaded = load_bases(str(path))
    assert len(loaded) == 2
    assert np.max(np.abs(loaded[1].matrix - f)) == 0.0


def test_load_rejects_malformed_files(tmp_path):
    p = tmp_path / "bad.json"

    p.write_text("{ not json", encoding="utf-8")
    with pytest.raises(ParseError):
        load_bases(str(p))

    p.write_text("[1, 2, 3]\n", encoding="utf-8")
    with pytest.raises(ParseError):
        load_bases(str(p))

    p.write_text('{"dim": 2, "construction": "x"}\n', encoding="utf-8")
    with pytest.raises(ParseError):
        load_bases(str(p))

    p.write_text('{"dim": 2, "bases": [[[[1,0]],[[0,0],[1,0]]]]}\n', encoding="utf-8")
    with pytest.raises(ParseError):
        load_bases(str(p))


def test_load_rejects_non_unitary(tmp_path):
    p = tmp_path / "nonunitary.json"
    doc = '{"dim": 2, "bases": [[[[1,0],[0,0]],[[1,0],[0,0]]]]}\n'
    p.write_text(doc, encoding="utf-8")
    with pytest.raises(NonUnitaryError):
        load_bases(str(p))
