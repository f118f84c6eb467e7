"""Tests for the Laurent polynomial algebra, moments and polyphase machinery."""

import random
from fractions import Fraction

import pytest

from symframes.exact import Cyclotomic, conj, zeta
from symframes.fixtures import load_mask_table
from symframes.lattice import DigitSystem, default_digits
from symframes.laurent import (
    LaurentPoly,
    format_table,
    lower_set,
    mi_binom,
    mi_leq,
    parse_table,
    polyphase_merge,
    polyphase_split,
    vec_pow,
)

HAT = LaurentPoly(1, {(-1,): Fraction(1, 4), (0,): Fraction(1, 2), (1,): Fraction(1, 4)})


def _random_poly(rng, d, allow_cyclo=False):
    n = rng.randint(1, 6)
    terms = {}
    for _ in range(n):
        k = tuple(rng.randint(-3, 3) for _ in range(d))
        v = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        if allow_cyclo and rng.random() < 0.3:
            v = v + Fraction(rng.randint(-2, 2)) * zeta(4)
        terms[k] = terms.get(k, 0) + v
    return LaurentPoly(d, terms)


def test_zero_coefficients_are_dropped():
    t = LaurentPoly(2, {(0, 0): Fraction(0), (1, 0): Fraction(1)})
    assert t.support() == [(1, 0)]
    u = t - t
    assert u.is_zero()
    assert len(u) == 0


def test_lower_set_graded_lex():
    assert lower_set(2, 2) == [(0, 0), (0, 1), (1, 0)]
    assert lower_set(3, 2) == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    assert lower_set(2, 1) == [(0,), (1,)]
    assert len(lower_set(4, 3)) == 20  # C(3+3,3)


def test_mi_helpers():
    assert mi_binom((2, 1), (1, 1)) == 2
    assert mi_leq((1, 0), (2, 1))
    assert not mi_leq((3, 0), (2, 1))
    assert vec_pow((Fraction(1, 2), 3), (2, 1)) == Fraction(3, 4)
    assert vec_pow((0, 5), (0, 0)) == 1


def test_moment_examples():
    one = LaurentPoly.one(2)
    assert one.moment((0, 0)) == 1
    t = LaurentPoly.delta(2, (3, -2))
    assert t.moment((2, 1)) == 9 * (-2)
    assert HAT.moment((2,)) == Fraction(1, 2)


def test_dilated_moment_examples():
    one = LaurentPoly.one(2)
    assert one.dilated_moment(((2, 0), (0, 2)), (1, 0)) == 0
    assert HAT.dilated_moment(((2,),), (1,)) == 0
    # the hat mask is interpolatory with sum rule 2: lambda_alpha = delta
    assert HAT.dilated_moment(((2,),), (0,)) == 1


def test_modulate():
    t = _random_poly(random.Random(0), 2)
    assert t.modulate((0, 0)) == t
    d = LaurentPoly.delta(2, (0, 0))
    assert d.modulate((2, -1)) == LaurentPoly.delta(2, (2, -1))
    # worked example: coefficients (1,1) at {0,1}, a=1, beta=1
    u = LaurentPoly(1, {(0,): Fraction(1), (1,): Fraction(1)})
    assert u.modulate((1,)).moment((1,)) == 3


def test_modulate_binomial_moment_identity():
    # moment_beta(e^{2 pi i (a,.)} t) = sum_{alpha <= beta} C(beta,alpha) a^(beta-alpha) moment_alpha(t)
    rng = random.Random(42)
    for _ in range(40):
        d = rng.choice([1, 2, 3])
        t = _random_poly(rng, d)
        a = tuple(rng.randint(-2, 2) for _ in range(d))
        for beta in lower_set(5 - d, d):
            lhs = t.modulate(a).moment(beta)
            rhs = Fraction(0)
            for alpha in lower_set(sum(beta) + 1, d):
                if mi_leq(alpha, beta):
                    diff = tuple(b - x for b, x in zip(beta, alpha))
                    rhs += mi_binom(beta, alpha) * vec_pow(a, diff) * t.moment(alpha)
            assert lhs == rhs


def test_substitute_linear():
    rng = random.Random(7)
    t = _random_poly(rng, 2)
    I = ((1, 0), (0, 1))
    assert t.substitute_linear(I) == t
    A = ((1, 1), (0, 1))
    Ainv = ((1, -1), (0, 1))
    assert t.substitute_linear(A).substitute_linear(Ainv) == t
    with pytest.raises(ValueError):
        t.substitute_linear(((2, 0), (0, 1)))


def test_substitute_is_ring_homomorphism():
    rng = random.Random(11)
    A = ((0, 1), (-1, 1))
    for _ in range(20):
        t = _random_poly(rng, 2, allow_cyclo=True)
        u = _random_poly(rng, 2, allow_cyclo=True)
        assert (t * u).substitute_linear(A) == t.substitute_linear(A) * u.substitute_linear(A)


def test_substitute_chain_rule_at_zero():
    # moment_beta(t(A* .)) = sum_k h_k (A k)^beta, which expands into moments
    # of t of the same total degree; check against direct expansion
    rng = random.Random(13)
    A = ((1, -1), (1, 0))
    for _ in range(10):
        t = _random_poly(rng, 2)
        for beta in lower_set(4, 2):
            lhs = t.substitute_linear(A).moment(beta)
            rhs = Fraction(0)
            for k, v in t.terms():
                Ak = tuple(sum(A[i][j] * k[j] for j in range(2)) for i in range(2))
                rhs += v * vec_pow(Ak, beta)
            assert lhs == rhs


def test_conjugate_reflect():
    assert HAT.conjugate_reflect() == HAT  # real and point-symmetric
    d = LaurentPoly.delta(2, (1, -2))
    assert d.conjugate_reflect() == LaurentPoly.delta(2, (-1, 2))
    z = LaurentPoly(1, {(0,): zeta(4)})
    assert z.conjugate_reflect() == LaurentPoly(1, {(0,): -zeta(4)})


def test_conjugate_reflect_product_is_real_symmetric():
    rng = random.Random(17)
    for _ in range(20):
        t = _random_poly(rng, 2, allow_cyclo=True)
        sq = t * t.conjugate_reflect()
        for k, v in sq.terms():
            mirror = sq.coeff(tuple(-x for x in k))
            assert conj(v) == mirror
        # value at any rational point is real: equals its own conjugate
        val = sq.evaluate_rational((Fraction(1, 3), Fraction(1, 4)))
        assert conj(val) == val


def test_polyphase_split_hat():
    ds = default_digits(((2,),))
    row = polyphase_split(HAT, ds)
    assert row.components[0] == LaurentPoly.one(1)  # interpolatory
    assert row.components[1] == LaurentPoly(1, {(0,): Fraction(1, 2), (-1,): Fraction(1, 2)})


def test_polyphase_split_example1_entry():
    m0 = load_mask_table("ex1_m0")
    ds = DigitSystem(((2, -1), (1, 1)), ((0, 0), (0, 1), (0, -1)))
    row = polyphase_split(m0, ds)
    assert row.components[0] == LaurentPoly.one(2)
    assert row.components[1].coeff((0, 0)) == Fraction(4, 9)  # 3 * 4/27


def test_polyphase_merge_trivial_rows():
    ds = default_digits(((2, 0), (0, 2)))
    ones = tuple(LaurentPoly.one(2) for _ in range(4))
    t = polyphase_merge(type(polyphase_split(LaurentPoly.one(2), ds))(ds, ones))
    want = LaurentPoly(2, {s: Fraction(1, 4) for s in ds.digits})
    assert t == want
    row0 = (LaurentPoly.one(2),) + tuple(LaurentPoly(2) for _ in range(3))
    t0 = polyphase_merge(type(polyphase_split(LaurentPoly.one(2), ds))(ds, row0))
    assert t0 == LaurentPoly(2, {(0, 0): Fraction(1, 4)})


def test_polyphase_roundtrip_random():
    rng = random.Random(23)
    dilations = [((2,),), ((2, 0), (0, 2)), ((2, -1), (1, 1)), ((3, 0), (0, 2)),
                 ((1, 1), (1, -1))]
    for _ in range(200):
        M = rng.choice(dilations)
        ds = default_digits(M)
        # occasionally shift digits off the default representatives
        if rng.random() < 0.3:
            d = ds.dimension
            shifted = [ds.digits[0]]
            for s in ds.digits[1:]:
                r = tuple(rng.randint(-1, 1) for _ in range(d))
                Mr = tuple(sum(M[i][j] * r[j] for j in range(d)) for i in range(d))
                shifted.append(tuple(a + b for a, b in zip(s, Mr)))
            ds = DigitSystem(M, shifted)
        t = _random_poly(rng, ds.dimension, allow_cyclo=True)
        assert polyphase_merge(polyphase_split(t, ds)) == t


def test_table_parse_example1():
    m0 = load_mask_table("ex1_m0")
    assert m0.coeff((0, 0)) == Fraction(1, 3)
    assert m0.coeff((0, 1)) == Fraction(4, 27)
    assert m0.coeff((2, 2)) == Fraction(-1, 27)
    assert m0.coeff((-2, -2)) == Fraction(-1, 27)
    assert m0.coeff((2, 0)) == Fraction(-1, 27)
    assert m0.moment((0, 0)) == 1
    assert len(m0) == 13


def test_table_roundtrip():
    rng = random.Random(31)
    for _ in range(25):
        t = _random_poly(rng, 2)
        assert parse_table(format_table(t)) == t
    # zero polynomial still renders an anchored cell
    assert parse_table(format_table(LaurentPoly(2))) == LaurentPoly(2)


def test_table_errors():
    with pytest.raises(ValueError):
        parse_table("1/2 1/2\n1/2")  # ragged
    with pytest.raises(ValueError):
        parse_table("1 2\n3 4")  # no anchor
    with pytest.raises(ValueError):
        parse_table("[1] [2]")  # two anchors
    with pytest.raises(ValueError):
        format_table(LaurentPoly(1, {(0,): Fraction(1)}))


def test_json_roundtrip():
    rng = random.Random(37)
    for _ in range(25):
        t = _random_poly(rng, rng.choice([1, 2, 3]), allow_cyclo=True)
        assert LaurentPoly.from_json(t.to_json()) == t
    s = LaurentPoly(2, {(1, 0): Fraction(1, 3)}).to_json()
    assert '"dim":2' in s.replace(" ", "")


def test_evaluate_rational_matches_complex():
    rng = random.Random(41)
    for _ in range(20):
        t = _random_poly(rng, 2, allow_cyclo=True)
        xi = (Fraction(rng.randint(0, 5), 6), Fraction(rng.randint(0, 3), 4))
        exact = t.evaluate_rational(xi)
        from symframes.exact import to_complex
        approx = t.evaluate_complex((float(xi[0]), float(xi[1])))
        assert abs(to_complex(exact) - approx) < 1e-9


def test_mul_matches_slow_reference():
    rng = random.Random(43)
    for _ in range(30):
        t = _random_poly(rng, 2)
        u = _random_poly(rng, 2)
        prod = t * u
        ref = {}
        for k1, v1 in t.terms():
            for k2, v2 in u.terms():
                k = (k1[0] + k2[0], k1[1] + k2[1])
                ref[k] = ref.get(k, Fraction(0)) + v1 * v2
        ref = {k: v for k, v in ref.items() if v != 0}
        assert dict(prod.terms()) == ref


def test_upsample():
    from fractions import Fraction
    t = LaurentPoly(2, {(1, 0): Fraction(2), (0, -1): Fraction(3)})
    M = ((2, -1), (1, 1))
    up = t.upsample(M)
    assert up == LaurentPoly(2, {(2, 1): Fraction(2), (1, -1): Fraction(3)})
    # merging is literally sum_k delta(s_k) * nu_k(M* xi) / m
    ds = default_digits(M)
    row = polyphase_split(t, ds)
    acc = LaurentPoly(2)
    for s, comp in zip(ds.digits, row.components):
        acc = acc + comp.upsample(M).modulate(s)
    assert acc.scale(Fraction(1, ds.m)) == t
