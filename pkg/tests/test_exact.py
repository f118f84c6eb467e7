"""Tests for exact scalar arithmetic (rationals and cyclotomic integwers over Q).

Expected values for the cyclotomic polynomials are frozen from an
independent numeric oracle (product of (x - root) over primitive roots,
computed with numpy and rounded), kept here so the recursion in the
package is never its own referee.
"""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from symframes.exact import (
    Cyclotomic,
    cyclotomic_polynomial,
    euler_phi,
    zeta,
    conj,
    promote,
    demote,
    parse_scalar,
    format_scalar,
    to_complex,
)


def phi_oracle(L):
    """Independent cyclotomic polynomial: multiply out the primitive roots."""
    roots = [np.exp(2j * np.pi * k / L) for k in range(1, L + 1) if math.gcd(k, L) == 1]
    coeffs = np.poly(roots)  # descending, complex
    out = [round(c.real) for c in coeffs[::-1]]
    assert max(abs(c.real - round(c.real)) + abs(c.imag) for c in coeffs) < 1e-8
    return out


# frozen from phi_oracle at test-writing time
PHI_12 = [1, 0, -1, 0, 1]  # x^4 - x^2 + 1
PHI_1 = [-1, 1]
PHI_2 = [1, 1]
PHI_3 = [1, 1, 1]
PHI_4 = [1, 0, 1]
PHI_6 = [1, -1, 1]


def test_cyclotomic_polynomial_small():
    assert cyclotomic_polynomial(1) == tuple(PHI_1)
    assert cyclotomic_polynomial(2) == tuple(PHI_2)
    assert cyclotomic_polynomial(3) == tuple(PHI_3)
    assert cyclotomic_polynomial(4) == tuple(PHI_4)
    assert cyclotomic_polynomial(6) == tuple(PHI_6)
    assert cyclotomic_polynomial(12) == tuple(PHI_12)


def test_cyclotomic_polynomial_matches_oracle():
    for L in range(1, 31):
        assert list(cyclotomic_polynomial(L)) == phi_oracle(L), L


def test_euler_phi():
    for L in range(1, 40):
        expected = sum(1 for k in range(1, L + 1) if math.gcd(k, L) == 1)
        assert euler_phi(L) == expected


def test_zeta_demotes_small_conductors():
    assert zeta(1) == Fraction(1)
    assert zeta(2) == Fraction(-1)
    z3 = zeta(3)
    assert isinstance(z3, Cyclotomic)
    assert z3.conductor == 3


def test_zeta_power_relations():
    z = zeta(5)
    assert z**5 == Fraction(1)
    assert z**0 == Fraction(1)
    # sum of all 5th roots of unity vanishes
    assert sum(z**k for k in range(5)) == Fraction(0)


def test_conj_identity_from_worked_example():
    # (1 + zeta_3)(1 + conj(zeta_3)) = 1, since zeta_3^2 + zeta_3 = -1
    a = 1 + zeta(3)
    assert a * conj(a) == Fraction(1)


def test_conj_fixes_rationals_and_norms():
    assert conj(Fraction(3, 7)) == Fraction(3, 7)
    rng = random.Random(7)
    for _ in range(25):
        L = rng.choice([3, 4, 5, 7, 8, 9, 12])
        a = _random_cyclotomic(rng, L)
        norm = a * conj(a)
        assert conj(norm) == norm  # real, so fixed by conjugation
        z = to_complex(norm)
        assert abs(z.imag) < 1e-9


def test_inverse_worked_example():
    # (1 + zeta_4)^(-1) = (1 - zeta_4)/2, i.e. 1/(1+i) = (1-i)/2
    a = 1 + zeta(4)
    inv = 1 / a
    assert inv == (1 - zeta(4)) / 2
    assert a * inv == Fraction(1)


def test_division_and_field_axioms_random():
    rng = random.Random(2024)
    for _ in range(60):
        L = rng.choice([3, 4, 5, 8, 12])
        a = _random_cyclotomic(rng, L)
        b = _random_cyclotomic(rng, L)
        c = _random_cyclotomic(rng, L)
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        if b != Fraction(0):
            q = a / b
            assert q * b == a


def test_mixed_conductor_arithmetic():
    # zeta_4 * zeta_3 is a primitive 12th root: (zeta_4*zeta_3)^12 = 1 but no smaller power
    w = zeta(4) * zeta(3)
    assert w**12 == Fraction(1)
    assert w**6 != Fraction(1)
    # float cross-check
    assert abs(to_complex(w) - np.exp(2j * np.pi * (1 / 4 + 1 / 3))) < 1e-9


def test_promote_worked_example():
    # zeta_3 seen in conductor 12 is zeta_12^4
    a = promote(zeta(3), 12)
    assert isinstance(a, Cyclotomic)
    assert a.conductor == 12
    assert a == zeta(12) ** 4
    assert a**3 == Fraction(1)


def test_promote_then_demote_is_identity():
    rng = random.Random(11)
    for _ in range(30):
        L = rng.choice([3, 4, 6, 8])
        mult = rng.choice([2, 3, 4])
        a = _random_cyclotomic(rng, L)
        up = promote(a, L * mult)
        down = demote(up, L)
        assert down == a


def test_demote_rejects_values_outside_subfield():
    with pytest.raises(ValueError):
        demote(zeta(12), 4)


def test_auto_demotion_to_rational():
    a = zeta(3)
    b = -1 - zeta(3)  # this is zeta_3^2
    s = a + b + 1  # zeta + zeta^2 + 1 = 0
    assert isinstance(s, Fraction)
    assert s == 0
    prod = zeta(4) * zeta(4)  # = -1
    assert isinstance(prod, Fraction) and prod == -1


def test_serialization_round_trip():
    cases = [
        Fraction(3, 4),
        Fraction(-7, 2),
        Fraction(5),
        zeta(12),
        zeta(8) / 2 - 3,
        (1 + zeta(5)) / Fraction(7, 3),
    ]
    for x in cases:
        s = format_scalar(x)
        y = parse_scalar(s)
        assert x == y
        assert format_scalar(y) == s  # canonical form is stable


def test_serialization_formats():
    assert format_scalar(Fraction(3, 4)) == "3/4"
    assert format_scalar(Fraction(-5)) == "-5"
    assert parse_scalar("zeta(12):[0,1,0,0]") == zeta(12)
    assert format_scalar(zeta(12)) == "zeta(12):[0,1,0,0]"
    assert parse_scalar("1/3") == Fraction(1, 3)


def test_parse_rejects_garbage():
    for bad in ["", "zeta(12):[0,1]", "1/0", "zeta(0):[1]", "x+1"]:
        with pytest.raises((ValueError, ZeroDivisionError)):
            parse_scalar(bad)


def test_to_complex_agrees_with_numpy():
    rng = random.Random(5)
    for _ in range(20):
        L = rng.choice([3, 5, 8, 12])
        a = _random_cyclotomic(rng, L)
        want = sum(
            float(c) * np.exp(2j * np.pi * j / L) for j, c in enumerate(a.coeffs)
        )
        assert abs(to_complex(a) - want) < 1e-9


def _random_cyclotomic(rng, L):
    n = euler_phi(L)
    coeffs = [Fraction(rng.randint(-4, 4), rng.randint(1, 5)) for _ in range(n)]
    val = sum(c * zeta(L) ** j for j, c in enumerate(coeffs))
    return val


def test_random_cyclotomic_builder_sanity():
    # the helper above should produce honest conductor-L elements most of the time
    rng = random.Random(1)
    seen_cyclo = 0
    for _ in range(10):
        a = _random_cyclotomic(rng, 5)
        if isinstance(a, Cyclotomic):
            seen_cyclo += 1
    assert seen_cyclo >= 8
