"""Character arithmetic against brute-force tables."""

import cmath
from math import gcd

import pytest

from eiszeros import characters as ch
from eiszeros.errors import ParameterError


def brute_values(chi):
    return [ch.evaluate(chi, n) for n in range(chi.modulus)]


def test_build_group_trivial():
    assert ch.build_group(1).generators == ()


def test_build_group_q5_smallest_primitive_root():
    # brute force: 2 is the smallest primitive root mod 5
    g = ch.build_group(5)
    assert g.generators == ((2, 4),)


def test_build_group_q8_standard_pair():
    g = ch.build_group(8)
    assert g.generators == ((7, 2), (5, 2))
    # the pair really generates (Z/8Z)*
    seen = {pow(7, a, 8) * pow(5, b, 8) % 8 for a in range(2) for b in range(2)}
    assert seen == {1, 3, 5, 7}


def test_evaluate_chi5():
    chi = ch.character_by_index(5, 1)
    assert ch.evaluate(chi, 2) == 1j
    assert ch.evaluate(chi, 1) == 1
    # 4 = 2^2, so chi(4) = i^2 exactly
    assert ch.evaluate(chi, 4) == -1
    assert ch.evaluate(chi, 10) == 0


def test_evaluate_full_multiplication_table():
    chi = ch.character_by_index(5, 1)
    for a in range(1, 6):
        for b in range(1, 6):
            assert ch.evaluate(chi, a * b) == pytest.approx(
                ch.evaluate(chi, a) * ch.evaluate(chi, b), abs=1e-15
            )


def test_parity():
    legendre3 = ch.character_by_index(3, 1)
    assert ch.parity(legendre3) == -1
    assert ch.parity(ch.principal_character(5)) == 1
    assert ch.parity(ch.character_by_index(5, 1)) == -1


def test_conductor_and_primitivity():
    chi5 = ch.character_by_index(5, 1)
    assert ch.conductor(chi5) == 5 and ch.is_primitive(chi5)
    assert ch.conductor(ch.principal_character(6)) == 1
    assert not ch.is_primitive(ch.principal_character(6))
    # character mod 9 induced from the nontrivial character mod 3:
    # exponent 3 against the order-6 generator gives chi(2) = -1
    chi9 = ch.character(9, (3,))
    legendre3 = ch.character_by_index(3, 1)
    for n in range(9):
        if gcd(n, 3) == 1:
            assert ch.evaluate(chi9, n) == ch.evaluate(legendre3, n)
    assert ch.conductor(chi9) == 3


def test_conjugate_multiply():
    chi = ch.character_by_index(5, 1)
    assert ch.evaluate(ch.conjugate(chi), 2) == -1j
    prod = ch.multiply(chi, ch.conjugate(chi))
    assert prod.exponents == (0,)
    leg = ch.character_by_index(3, 1)
    assert ch.multiply(leg, leg).exponents == (0,)


def test_multiply_modulus_mismatch():
    with pytest.raises(ParameterError):
        ch.multiply(ch.principal_character(3), ch.principal_character(5))


def test_crt_factor_recovers_components():
    leg3 = ch.character_by_index(3, 1)
    chi5 = ch.character_by_index(5, 1)
    chi15 = ch.crt_compose(leg3, chi5)
    f3, f5 = ch.crt_factor(chi15, 3, 5)
    assert brute_values(f3) == brute_values(leg3)
    assert brute_values(f5) == brute_values(chi5)
    # round trip
    back = ch.crt_compose(f3, f5)
    assert brute_values(back) == brute_values(chi15)


def test_crt_factor_trivial_split():
    chi = ch.character_by_index(5, 2)
    full, one = ch.crt_factor(chi, 5, 1)
    assert full.exponents == chi.exponents
    assert one.modulus == 1
    p15 = ch.principal_character(15)
    a, b = ch.crt_factor(p15, 3, 5)
    assert a.exponents == (0,) and b.exponents == (0,)


def test_crt_factor_rejects_bad_split():
    chi = ch.principal_character(12)
    with pytest.raises(ParameterError):
        ch.crt_factor(chi, 2, 6)  # not coprime
    with pytest.raises(ParameterError):
        ch.crt_factor(chi, 5, 3)  # not a factorization


@pytest.mark.parametrize("q", [5, 8, 12, 45, 97])
def test_complete_multiplicativity(q):
    for chi in ch.enumerate_characters(q)[: min(8, len(ch.enumerate_characters(q)))]:
        vals = brute_values(chi)
        for a in range(1, q + 1):
            for b in range(1, q + 1):
                lhs = vals[(a * b) % q]
                rhs = vals[a % q] * vals[b % q]
                assert abs(lhs - rhs) < 1e-12
        for n in range(q):
            assert (vals[n] == 0) == (gcd(n, q) > 1)
            if vals[n] != 0:
                assert abs(abs(vals[n]) - 1.0) < 1e-15


def _moebius(n):
    out, m = 1, n
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            out = -out
        p += 1
    if m > 1:
        out = -out
    return out


@pytest.mark.parametrize("q", list(range(2, 101)))
def test_primitive_count_formula(q):
    count = sum(1 for chi in ch.enumerate_characters(q) if ch.is_primitive(chi))
    expected = sum(
        _moebius(q // f) * ch.euler_phi(f) for f in range(1, q + 1) if q % f == 0
    )
    assert count == expected


def test_parity_is_multiplicative():
    for q in (5, 8, 15):
        chars_q = ch.enumerate_characters(q)
        for a in chars_q[:4]:
            for b in chars_q[:4]:
                assert ch.parity(ch.multiply(a, b)) == ch.parity(a) * ch.parity(b)


def test_character_index_round_trip():
    for q in (5, 8, 24):
        for idx, chi in enumerate(ch.enumerate_characters(q)):
            assert ch.character_index(chi) == idx
            assert ch.character_by_index(q, idx).exponents == chi.exponents


def test_values_are_exact_roots_of_unity():
    chi = ch.character_by_index(5, 1)
    # the four values hit exactly the fourth roots of unity
    assert {ch.evaluate(chi, n) for n in (1, 2, 3, 4)} == {1, 1j, -1j, -1}


def test_build_group_rejects_zero():
    with pytest.raises(ParameterError):
        ch.build_group(0)
