import cmath
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stokesdiag.cyclo import (
    MAX_ORDER,
    CycNum,
    OrderCapError,
    cyclotomic_polynomial,
    embed,
    euler_phi,
    root_of_unity,
)


def poly_eval_cyc(poly, v):
    """Evaluate an integer polynomial (low degree first) at a CycNum."""
    acc = CycNum.rational(0)
    power = CycNum.rational(1)
    for c in poly:
        if c:
            acc = acc + power * c
        power = power * v
    return acc


# ---------------------------------------------------------------------------
# cyclotomic_polynomial
#
# Phi_12 is frozen from an independent derivation: divide x^12 - 1 by
# Phi_1 Phi_2 Phi_3 Phi_4 Phi_6 = (x-1)(x+1)(x^2+x+1)(x^2+1)(x^2-x+1),
# whose product is x^8 + x^6 - x^2 - 1, and long division gives x^4 - x^2 + 1.
# ---------------------------------------------------------------------------


def test_cyclotomic_base_cases():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(2) == (1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)


def test_cyclotomic_12():
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)


def test_cyclotomic_degree_and_product():
    # deg Phi_n = phi(n), and the product over all d | n reassembles x^n - 1
    for n in (6, 8, 9, 10, 15, 24):
        assert len(cyclotomic_polynomial(n)) == euler_phi(n) + 1
    n = 12
    prod = [Fraction(1)]
    for d in (1, 2, 3, 4, 6, 12):
        phi_d = [Fraction(c) for c in cyclotomic_polynomial(d)]
        out = [Fraction(0)] * (len(prod) + len(phi_d) - 1)
        for i, a in enumerate(prod):
            for j, b in enumerate(phi_d):
                out[i + j] += a * b
        prod = out
    expect = [Fraction(-1)] + [Fraction(0)] * 11 + [Fraction(1)]
    assert prod == expect


def test_cyclotomic_vanishes_at_primitive_root():
    for n in range(1, 25):
        z = root_of_unity(n, 1)
        assert poly_eval_cyc(cyclotomic_polynomial(n), z).is_zero()


# ---------------------------------------------------------------------------
# embed
# ---------------------------------------------------------------------------


def test_embed_rational_fixed():
    v = CycNum.rational(Fraction(1, 2))
    w = embed(v, 4)
    assert w.order == 4
    assert w.coeffs == (Fraction(1, 2), Fraction(0))
    assert w == v


def test_embed_zeta2_is_minus_one():
    w = embed(root_of_unity(2, 1), 4)
    assert w.order == 4
    assert w.coeffs == (Fraction(-1), Fraction(0))


def test_embed_zeta3_into_12():
    # zeta_3 = zeta_12^4, and x^4 = x^2 - 1 mod Phi_12
    w = embed(root_of_unity(3, 1), 12)
    assert w.order == 12
    assert w.coeffs == (Fraction(-1), Fraction(0), Fraction(1), Fraction(0))
    assert w == root_of_unity(3, 1)


def test_embed_rejects_non_divisor():
    with pytest.raises(ValueError):
        embed(root_of_unity(3, 1), 8)


# ---------------------------------------------------------------------------
# field operations
# ---------------------------------------------------------------------------


def test_i_squared():
    i = root_of_unity(4, 1)
    assert i * i == -1


def test_inverse_of_zeta3():
    z = root_of_unity(3, 1)
    assert z.inverse() == z * z
    assert z.inverse() == CycNum(3, (-1, -1))


def test_product_one_plus_i_one_minus_i():
    i = root_of_unity(4, 1)
    assert (1 + i) * (1 - i) == 2


def test_root_of_unity_reduction():
    assert root_of_unity(2, 1) == -1
    assert root_of_unity(4, 2) == -1
    assert root_of_unity(3, 1) == CycNum(3, (0, 1))


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        CycNum.rational(0).inverse()


def test_order_cap():
    with pytest.raises(OrderCapError):
        root_of_unity(MAX_ORDER + 1, 1)
    # 16 and 27 are individually fine but their lcm is 432 > 360
    with pytest.raises(OrderCapError):
        root_of_unity(16, 1) + root_of_unity(27, 1)


def test_canonicalization_descends():
    # zeta_12^3 is i; the canonical form lives at order 4
    v = root_of_unity(12, 3)
    assert v.canonical().order == 4
    assert v == root_of_unity(4, 1)
    assert hash(v) == hash(root_of_unity(4, 1))
    # zeta_6 = -zeta_3^2 lives at order 3
    assert root_of_unity(6, 1).canonical().order == 3


def test_sort_key_total_order():
    vals = [root_of_unity(3, 1), CycNum.rational(2), root_of_unity(4, 1), CycNum.rational(-1)]
    ordered = sorted(vals, key=CycNum.sort_key)
    assert ordered[0] == -1 and ordered[1] == 2
    # rationals (order 1) sort before any irrational cyclotomic
    assert ordered[2].canonical().order > 1


def test_str_round_trip_forms():
    assert str(CycNum.rational(Fraction(-3, 2))) == "-3/2"
    assert str(root_of_unity(4, 1)) == "i"
    assert str(root_of_unity(3, 2)) == "-1 - zeta(3)"
    assert str(CycNum.rational(0)) == "0"


# ---------------------------------------------------------------------------
# property tests over Q(zeta_12)
# ---------------------------------------------------------------------------

rationals = st.fractions(min_value=-40, max_value=40, max_denominator=8)


@st.composite
def cyc12(draw):
    coeffs = draw(st.lists(rationals, min_size=4, max_size=4))
    return CycNum(12, tuple(coeffs), _reduced=True)


@given(cyc12(), cyc12())
@settings(max_examples=200, deadline=None)
def test_add_sub_cancel(a, b):
    assert (a + b) - b == a


@given(cyc12())
@settings(max_examples=200, deadline=None)
def test_mul_inverse(a):
    if not a.is_zero():
        assert a * a.inverse() == 1


@given(cyc12(), cyc12())
@settings(max_examples=100, deadline=None)
def test_embedding_commutes(a, b):
    ea, eb = embed(a, 24), embed(b, 24)
    assert embed(a + b, 24) == ea + eb
    assert embed(a * b, 24) == ea * eb
    assert embed(a - b, 24) == ea - eb


@given(cyc12(), cyc12(), cyc12())
@settings(max_examples=100, deadline=None)
def test_ring_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a


def test_roots_of_unity_have_exact_order():
    for n in range(1, 25):
        for k in range(1, n):
            assert root_of_unity(n, k) ** n == 1


def test_numeric_embedding_matches():
    v = CycNum(12, (Fraction(1, 2), Fraction(-2), Fraction(0), Fraction(3)), _reduced=True)
    z = cmath.exp(2j * cmath.pi / 12)
    expect = 0.5 - 2 * z + 3 * z**3
    assert abs(v.to_complex() - expect) < 1e-12


def test_pow_negative():
    z = root_of_unity(12, 5)
    assert z**-1 == z**11
    assert z**-3 == (z**3).inverse()
