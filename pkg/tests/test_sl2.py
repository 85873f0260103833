import cmath
import random
from fractions import Fraction

import pytest

from stokesdiag.cyclo import CycNum, root_of_unity
from stokesdiag.expalg import INF, PointP1, circle_of, normalize
from stokesdiag.formal import (
    JordanClass,
    LocalEntry,
    ModifiedFormalData,
    rank_of,
)
from stokesdiag.puiseux import semigroup_gaps
from stokesdiag.randomgen import (
    check_fourier_rank,
    random_cycnum,
    random_steep_factor,
)
from stokesdiag.sl2 import (
    CircleSkeleton,
    ElementaryOp,
    FourierSphereCoeff,
    SL2Matrix,
    apply_sl2,
    classify_type,
    factor_sl2,
    fourier_circle,
    fourier_formal,
    fourier_rank,
    homography,
    legendre_skeleton,
    normalize_to_infinity,
    numeric_legendre,
    scale,
    sends_to_finite,
    slope2_coefficient,
    twist,
)

R = CycNum.rational
H = Fraction(1, 2)


def fac(point, *terms):
    pairs = []
    for e, c in terms:
        pairs.append((Fraction(e), c if isinstance(c, CycNum) else R(c)))
    return normalize(point, pairs)


def crc(point, *terms):
    return circle_of(fac(point, *terms))


# ---------------------------------------------------------------------------
# classification and elementary operations


def test_classify_table():
    assert classify_type(fac(INF, (1, 3))) == 1
    assert classify_type(normalize(INF, ())) == 1
    assert classify_type(fac(INF, (1, 1), (H, 1))) == 2
    assert classify_type(fac(INF, (H, 1))) == 2
    assert classify_type(fac(INF, (2, 1))) == 3
    assert classify_type(fac(INF, (Fraction(3, 2), 1))) == 3
    assert classify_type(fac(PointP1.finite(R(2)), (1, 1))) == 4
    assert classify_type(circle_of(normalize(PointP1.finite(R(2)), ())) ) == 5


def test_twist_adds_half_lambda_z_squared():
    q = fac(INF, (H, 1))
    out = twist(q, 2)
    assert out == fac(INF, (2, 1), (H, 1))
    # cancelling an existing z^2 term leaves the residual behind
    back = twist(out, -2)
    assert back == q
    # finite points are untouched
    p = fac(PointP1.finite(R(1)), (1, 1))
    assert twist(p, 5) is p


def test_scale_exact_when_root_exists():
    q = fac(INF, (H, 1), (Fraction(3, 2), 2))
    out = scale(q, 4)
    # 4^(1/2) = 2: coefficients pick up 2^numerator
    assert out == fac(INF, (Fraction(3, 2), 16), (H, 2))
    neg = scale(fac(INF, (H, 1)), -1)
    i = root_of_unity(4, 1)
    assert neg == normalize(INF, [(H, i)])


def test_scale_moves_finite_points_and_inverts_exponents():
    q = fac(PointP1.finite(R(6)), (1, 2))
    out = scale(q, 3)
    assert out.point == PointP1.finite(R(2))
    assert out == normalize(out.point, [(Fraction(1), R(Fraction(2, 3)))])


def test_scale_numeric_fallback_keeps_invariants():
    q = fac(INF, (H, 1), (Fraction(3, 2), 1))
    out = scale(q, 2)  # sqrt(2) is not reachable by the easy root search
    assert isinstance(out, CircleSkeleton)
    assert (out.point, out.ram, out.irr) == (INF, 2, 3)
    assert out.support == frozenset({H, Fraction(3, 2)})
    got = dict(out.coeffs)
    assert abs(got[Fraction(3, 2)] - 2 ** 1.5) < 1e-12
    assert abs(got[H] - 2 ** 0.5) < 1e-12


def test_factor_sl2_upper_triangular():
    mat = SL2Matrix(R(2), R(3), R(0), R(H))
    ops = factor_sl2(mat)
    assert ops == [ElementaryOp.scaling(R(H)), ElementaryOp.twist(R(Fraction(3, 2)))]
    assert ops[0].matrix * ops[1].matrix == mat


def test_factor_sl2_fourier_reduces_to_single_letter():
    ops = factor_sl2(SL2Matrix.fourier())
    kinds = [op.kind for op in ops]
    assert kinds == ["twist", "fourier", "scaling", "twist"]
    assert ops[0].param.is_zero() and ops[3].param.is_zero()
    assert ops[2].param == R(1)


def test_factor_sl2_recomposes_random_matrices():
    rng = random.Random(7)
    done = 0
    while done < 60:
        a, b, c = (random_cycnum(rng) for _ in range(3))
        if c.is_zero():
            if a.is_zero():
                continue
            d = a.inverse()
        else:
            if a.is_zero():
                a = R(1)
            d = (R(1) + b * c) / a
        try:
            mat = SL2Matrix(a, b, c, d)
        except (ValueError, ZeroDivisionError):
            continue
        prod = SL2Matrix.identity()
        for op in factor_sl2(mat):
            prod = prod * op.matrix
        assert prod == mat
        done += 1


def test_homography_examples_and_round_trip():
    assert homography(FourierSphereCoeff.of(R(5)), SL2Matrix.twist(R(2))).value == R(7)
    assert homography(FourierSphereCoeff.of(R(0)), SL2Matrix.fourier()).is_infinity
    assert homography(FourierSphereCoeff.infinity(), SL2Matrix.fourier()).value == R(0)
    s = SL2Matrix.scaling(R(2))
    assert homography(FourierSphereCoeff.of(R(8)), s).value == R(2)
    rng = random.Random(3)
    for _ in range(40):
        lam = FourierSphereCoeff.of(random_cycnum(rng))
        b = random_cycnum(rng)
        c = random_cycnum(rng)
        a = R(1)
        d = (R(1) + b * c) / a
        mat = SL2Matrix(a, b, c, d)
        assert homography(homography(lam, mat), mat.inverse()) == lam


# ---------------------------------------------------------------------------
# the Legendre transform of circles


def _monomial_image_lead(b: complex, al: int, be: int) -> complex:
    """Closed form for q = b z^(al/be): the image leading coefficient is
    (1-m)/m * (b m)^(-be/(al-be)) with m = al/be, principal branch."""
    m = al / be
    return (1 - m) / m * cmath.exp(-cmath.log(b * m) * be / (al - be))


def test_numeric_legendre_monomial_closed_form():
    out = numeric_legendre(fac(INF, (Fraction(5, 2), 1)), 3)
    assert len(out) == 1
    e, c = out[0]
    assert e == Fraction(5, 3)
    want = -(Fraction(3, 5)) * (2 / 5) ** (2 / 3)
    assert abs(c - float(want)) < 1e-9 * abs(want)
    assert abs(c - _monomial_image_lead(1, 5, 2)) < 1e-12


def test_numeric_legendre_random_monomials_match_closed_form():
    rng = random.Random(11)
    for _ in range(30):
        be = rng.randint(1, 3)
        al = rng.randint(be + 1, 9)
        from math import gcd

        g = gcd(al, be)
        al, be = al // g, be // g
        if al <= be:
            continue
        b = random_cycnum(rng, nonzero=True)
        out = numeric_legendre(fac(INF, (Fraction(al, be), b)), 1)
        want = _monomial_image_lead(b.to_complex(), al, be)
        assert abs(out[0][0] - Fraction(al, al - be)) == 0
        assert abs(out[0][1] - want) < 1e-9 * max(1.0, abs(want))


def test_numeric_legendre_quadratic_is_exact_quarter():
    out = numeric_legendre(fac(INF, (2, 1)), 2)
    assert out == [(Fraction(2), pytest.approx(-0.25))]
    sk = legendre_skeleton(crc(INF, (2, 1)))
    assert sk.exact_factor == fac(INF, (2, Fraction(-1, 4)))
    # the sphere coefficient of the image follows the homography under F
    lam = slope2_coefficient(crc(INF, (2, 1)))
    lam_img = homography(lam, SL2Matrix.fourier())
    assert slope2_coefficient(circle_of(sk.exact_factor)) == lam_img


def test_numeric_legendre_rejects_bad_input():
    with pytest.raises(ValueError):
        numeric_legendre(fac(INF, (2, 1)), 0)
    with pytest.raises(ValueError):
        numeric_legendre(fac(INF, (1, 1)), 1)
    with pytest.raises(ValueError):
        numeric_legendre(fac(PointP1.finite(R(0)), (1, 1)), 1)


def test_support_stays_in_the_difference_semigroup():
    rng = random.Random(23)
    for _ in range(40):
        q = random_steep_factor(rng)
        sk = legendre_skeleton(circle_of(q))
        if sk.exact_factor is not None:
            continue
        nums = [a for a, _ in circle_of(q).representative.monomials]
        allowed = {
            Fraction(nums[0] - g, sk.ram)
            for g in semigroup_gaps(nums)
            if g < nums[0]
        }
        assert sk.support <= allowed
        got = dict(sk.coeffs)
        # exponents coming from a single generator carry a nonzero coefficient
        for a in nums:
            e = Fraction(a, sk.ram)
            assert e in got and abs(got[e]) > 1e-10


def test_type_table_invariants():
    # 5 -> 1
    sk = legendre_skeleton(circle_of(normalize(PointP1.finite(R(3)), ())))
    assert sk.exact_factor == fac(INF, (1, -3))
    # 1 -> 5
    sk = legendre_skeleton(crc(INF, (1, 4)))
    assert sk.point == PointP1.finite(R(-4)) and sk.exact_factor.is_tame
    # tame at infinity -> tame at 0
    sk = legendre_skeleton(circle_of(normalize(INF, ())))
    assert sk.point == PointP1.finite(R(0)) and sk.exact_factor.is_tame
    # 4 -> 2: ram alpha + beta, sub-linear irregularity alpha, linear -a
    q = fac(PointP1.finite(R(2)), (Fraction(3, 2), 1))
    sk = legendre_skeleton(circle_of(q))
    assert (sk.point, sk.ram, sk.irr) == (INF, 5, 3)
    assert sk.linear_exact == R(-2) and sk.sphere_exact == R(0)
    assert max(sk.support) == Fraction(3, 5)
    # 2 -> 4: ram beta - alpha, irregularity alpha, at minus the linear coeff
    q = fac(INF, (1, 5), (Fraction(1, 3), 1))
    sk = legendre_skeleton(circle_of(q))
    assert (sk.point, sk.ram, sk.irr) == (PointP1.finite(R(-5)), 2, 1)
    assert sk.support == frozenset({H})
    # 3 -> 3: ram alpha - beta, irregularity alpha
    q = fac(INF, (Fraction(5, 2), 1))
    sk = legendre_skeleton(circle_of(q))
    assert (sk.point, sk.ram, sk.irr) == (INF, 3, 5)


def test_double_transform_restores_invariants():
    from stokesdiag.sl2 import _fourier_image_circle

    cases = [
        crc(PointP1.finite(R(1)), (1, H)),
        crc(INF, (Fraction(5, 2), 1)),
        crc(INF, (1, -2)),
        circle_of(normalize(PointP1.finite(R(-3)), ())),
    ]
    for c in cases:
        img1, _ = _fourier_image_circle(c)
        img2, _ = _fourier_image_circle(img1)
        assert img2.point == c.point
        assert img2.ram == c.ram
        assert img2.irr == c.irr
    # pures and tames come back on the nose
    for c in cases[2:]:
        img1, _ = _fourier_image_circle(c)
        img2, _ = _fourier_image_circle(img1)
        assert img2 == c


def test_quadratic_double_transform_is_pullback():
    # F^2 on a slope-2 circle flips the sign of the linear term
    c = crc(INF, (2, 1), (1, 3))
    sk1, _ = fourier_circle(c)
    sk2, _ = fourier_circle(circle_of(sk1.exact_factor))
    assert sk2.exact_factor == fac(INF, (2, 1), (1, -3))


def test_fourier_circle_signs():
    assert fourier_circle(crc(PointP1.finite(R(0)), (1, H)))[1] == -1
    assert fourier_circle(crc(PointP1.finite(R(0)), (2, H)))[1] == 1
    assert fourier_circle(crc(INF, (Fraction(5, 2), 1)))[1] == -1
    assert fourier_circle(crc(INF, (1, 2)))[1] == 1
    assert fourier_circle(circle_of(normalize(PointP1.finite(R(4)), ())))[1] == 1


# ---------------------------------------------------------------------------
# the sphere, sends_to_finite, apply_sl2


def test_slope2_coefficient_examples():
    assert slope2_coefficient(crc(INF, (2, -3), (H, 1))).value == R(6)
    assert slope2_coefficient(crc(INF, (1, 1))).value == R(0)
    assert slope2_coefficient(crc(PointP1.finite(R(2)), (1, 1))).is_infinity


def test_sends_to_finite_examples():
    f = SL2Matrix.fourier()
    assert sends_to_finite(crc(INF, (2, 1), (1, 1)), f) is None
    assert sends_to_finite(crc(INF, (1, 5)), f) == PointP1.finite(R(-5))
    # steep residual never leaves infinity
    assert sends_to_finite(crc(INF, (Fraction(5, 2), 1)), f) is None
    assert sends_to_finite(crc(INF, (2, 1), (Fraction(3, 2), 1)), f) is None
    # T_2 then F kills the z^2 term of lam = 2 circles
    c = crc(INF, (2, -1), (1, 1))  # lam = 2, mu = 1
    mat = SL2Matrix.fourier() * SL2Matrix.twist(R(-2))
    assert sends_to_finite(c, mat) == PointP1.finite(R(-1))
    assert sends_to_finite(c, SL2Matrix.fourier()) is None


def test_sends_to_finite_matches_apply_pipeline():
    rng = random.Random(17)
    for _ in range(25):
        mu = random_cycnum(rng, nonzero=True)
        c = crc(INF, (1, mu))
        mon = JordanClass.of({2: [1]})
        m = ModifiedFormalData([(INF, (LocalEntry(c, 1, mon),))])
        b = random_cycnum(rng)
        cc = random_cycnum(rng)
        a = R(1)
        d = (R(1) + b * cc) / a
        mat = SL2Matrix(a, b, cc, d)
        target = sends_to_finite(c, mat)
        image = apply_sl2(m, mat)
        points = [p for p, _ in image.points]
        assert len(points) == 1
        if target is None:
            assert points[0].is_infinity
        else:
            assert points[0] == target


def test_apply_scaling_follows_matrix_convention():
    # S_nu sends the sphere coefficient to lam / nu^2 and finite points to
    # a * nu (the scale operation with parameter 1/nu)
    c = crc(INF, (2, -4))  # lam = 8
    mon = JordanClass.of({2: [1]})
    m = ModifiedFormalData([(INF, (LocalEntry(c, 1, mon),))])
    out = apply_sl2(m, SL2Matrix.scaling(R(2)))
    circle = out.infinity_entries()[0].circle
    assert slope2_coefficient(circle).value == R(2)

    fin = PointP1.finite(R(3))
    m2 = ModifiedFormalData([(fin, (LocalEntry(crc(fin, (1, 1)), 1, mon),))])
    out2 = apply_sl2(m2, SL2Matrix.scaling(R(2)))
    assert out2.points[0][0] == PointP1.finite(R(6))


def test_apply_twist_leaves_finite_entries_alone():
    fin = PointP1.finite(R(3))
    mon = JordanClass.of({2: [1]})
    m = ModifiedFormalData([(fin, (LocalEntry(crc(fin, (1, 1)), 1, mon),))])
    assert apply_sl2(m, SL2Matrix.twist(R(9))) == m


# ---------------------------------------------------------------------------
# whole data sets


def piii_data() -> ModifiedFormalData:
    zero = PointP1.finite(R(0))
    jc = JordanClass.of
    return ModifiedFormalData(
        [
            (
                INF,
                (
                    LocalEntry(crc(INF, (1, 1)), 1, jc({2: [1]})),
                    LocalEntry(crc(INF, (1, -1)), 1, jc({3: [1]})),
                ),
            ),
            (zero, (LocalEntry(crc(zero, (1, H)), 1, jc({5: [1]})),)),
        ]
    )


def test_fourier_rank_of_piii_is_two():
    assert fourier_rank(piii_data()) == 2


def test_fourier_formal_piii():
    img = fourier_formal(piii_data())
    assert rank_of(img) == 2
    pts = {str(p): es for p, es in img.points}
    assert set(pts) == {"-1", "1", "inf"}
    (sk_entry,) = pts["inf"]
    sk = sk_entry.circle
    assert isinstance(sk, CircleSkeleton)
    assert (sk.ram, sk.irr, sorted(sk.support)) == (2, 1, [H])
    # the finite irregular entry had odd irregularity: eigenvalue negated
    assert sk_entry.mon == JordanClass.of({-5: [1]})
    # tame images keep their classes
    assert pts["-1"][0].mon == JordanClass.of({2: [1]})
    assert pts["1"][0].mon == JordanClass.of({3: [1]})


def test_normalize_to_infinity_piii_uses_twist_one():
    mat, norm = normalize_to_infinity(piii_data())
    assert mat == SL2Matrix.fourier() * SL2Matrix.twist(R(1))
    assert all(p.is_infinity for p, _ in norm.points)
    spheres = set()
    for e in norm.infinity_entries():
        c = e.circle
        if isinstance(c, CircleSkeleton):
            spheres.add(str(c.sphere_exact))
        else:
            spheres.add(str(slope2_coefficient(c).value))
    assert spheres == {"-1", "0"}


def test_normalize_is_identity_at_infinity():
    mon = JordanClass.of({2: [1]})
    m = ModifiedFormalData([(INF, (LocalEntry(crc(INF, (1, 1)), 1, mon),))])
    mat, norm = normalize_to_infinity(m)
    assert mat == SL2Matrix.identity()
    assert norm is m


def test_fourier_rank_matches_image_rank_on_random_data():
    assert check_fourier_rank(60, seed=2) == []
