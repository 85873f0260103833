"""SL(2) action on exponential factors and the Fourier transform of data.

The Fourier transform moves formal data around P^1: circles at finite points
go to infinity, circles at infinity go to finite points or stay, following
the slope dial.  Images are exact where the transform stays inside the
cyclotomic field (tame circles, pure linear circles, factors with slope
exactly 2) and numeric skeletons otherwise, computed by the Newton kernel in
puiseux.  Arbitrary SL(2) elements factor into twists, scalings and at most
one Fourier letter; apply_sl2 composes those on whole data sets.

Convention: the sphere coefficient of a circle at infinity is lam with
q = -(lam/2) z^2 + lower order.  The matrices below act on lam by the plain
homography (a lam + b)/(c lam + d); this forces the matrix T_rho to act on
factors as q -> q - (rho/2) z^2 and the matrix S_nu as the scaling operation
with parameter 1/nu.  The standalone twist/scale functions take the
operation parameter, not the matrix one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cyclo import CycNum, OrderCapError, root_of_unity
from .expalg import (
    INF,
    Circle,
    ExpFactor,
    PointP1,
    circle_of,
    normalize,
)
from .formal import LocalEntry, ModifiedFormalData, compatible, rank_of
from .puiseux import legendre_numeric, semigroup_gaps

__all__ = [
    "SL2Matrix",
    "ElementaryOp",
    "FourierSphereCoeff",
    "CircleSkeleton",
    "classify_type",
    "twist",
    "scale",
    "legendre_skeleton",
    "numeric_legendre",
    "fourier_circle",
    "fourier_formal",
    "fourier_rank",
    "slope2_coefficient",
    "homography",
    "sends_to_finite",
    "factor_sl2",
    "apply_sl2",
    "normalize_to_infinity",
]

_ZERO = CycNum.rational(0)
_ONE = CycNum.rational(1)
_TWO = Fraction(2)


def _cyc(x) -> CycNum:
    if isinstance(x, CycNum):
        return x
    if isinstance(x, (int, Fraction)):
        return CycNum.rational(x)
    raise TypeError(f"expected an exact scalar, got {type(x).__name__}")


# ---------------------------------------------------------------------------
# matrices and elementary operations


@dataclass(frozen=True)
class SL2Matrix:
    a: CycNum
    b: CycNum
    c: CycNum
    d: CycNum

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, _cyc(getattr(self, name)))
        if self.a * self.d - self.b * self.c != _ONE:
            raise ValueError("matrix determinant must be exactly 1")

    @staticmethod
    def identity() -> "SL2Matrix":
        return SL2Matrix(_ONE, _ZERO, _ZERO, _ONE)

    @staticmethod
    def fourier() -> "SL2Matrix":
        return SL2Matrix(_ZERO, _ONE, -_ONE, _ZERO)

    @staticmethod
    def twist(lam) -> "SL2Matrix":
        return SL2Matrix(_ONE, _cyc(lam), _ZERO, _ONE)

    @staticmethod
    def scaling(lam) -> "SL2Matrix":
        lam = _cyc(lam)
        if lam.is_zero():
            raise ValueError("scaling parameter must be nonzero")
        return SL2Matrix(lam.inverse(), _ZERO, _ZERO, lam)

    def __mul__(self, other: "SL2Matrix") -> "SL2Matrix":
        return SL2Matrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "SL2Matrix":
        return SL2Matrix(self.d, -self.b, -self.c, self.a)

    def __str__(self) -> str:
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"

    __repr__ = __str__


@dataclass(frozen=True)
class ElementaryOp:
    """One letter of a factorized SL(2) element, named by its matrix."""

    kind: str  # "fourier" | "twist" | "scaling"
    param: CycNum | None = None

    @staticmethod
    def fourier() -> "ElementaryOp":
        return ElementaryOp("fourier")

    @staticmethod
    def twist(lam) -> "ElementaryOp":
        return ElementaryOp("twist", _cyc(lam))

    @staticmethod
    def scaling(lam) -> "ElementaryOp":
        lam = _cyc(lam)
        if lam.is_zero():
            raise ValueError("scaling parameter must be nonzero")
        return ElementaryOp("scaling", lam)

    @property
    def matrix(self) -> SL2Matrix:
        if self.kind == "fourier":
            return SL2Matrix.fourier()
        if self.kind == "twist":
            return SL2Matrix.twist(self.param)
        return SL2Matrix.scaling(self.param)

    def __str__(self) -> str:
        if self.kind == "fourier":
            return "F"
        tag = "T" if self.kind == "twist" else "S"
        return f"{tag}[{self.param}]"

    __repr__ = __str__


# ---------------------------------------------------------------------------
# the Fourier sphere


@dataclass(frozen=True)
class FourierSphereCoeff:
    """A point of the coefficient sphere: an exact value, or infinity.

    Circles at finite points of P^1 all sit at the sphere's infinity; a
    circle at infinity with factor q = -(lam/2) z^2 + lower sits at lam.
    """

    value: CycNum | None = None  # None encodes infinity

    @staticmethod
    def of(lam) -> "FourierSphereCoeff":
        return FourierSphereCoeff(_cyc(lam))

    @staticmethod
    def infinity() -> "FourierSphereCoeff":
        return FourierSphereCoeff(None)

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)

    __repr__ = __str__


def homography(lam: FourierSphereCoeff, mat: SL2Matrix) -> FourierSphereCoeff:
    """Projective action of mat on a sphere coefficient."""
    if lam.is_infinity:
        if mat.c.is_zero():
            return FourierSphereCoeff.infinity()
        return FourierSphereCoeff.of(mat.a / mat.c)
    den = mat.c * lam.value + mat.d
    if den.is_zero():
        return FourierSphereCoeff.infinity()
    return FourierSphereCoeff.of((mat.a * lam.value + mat.b) / den)


# ---------------------------------------------------------------------------
# circle skeletons


@dataclass(frozen=True)
class CircleSkeleton:
    """Invariants of a circle whose coefficients are not (all) exact.

    ``support`` lists the exponents of the underlying factor except that, for
    a circle at infinity with slope at most 1, the linear term is kept out of
    it and carried by ``linear_exact`` instead; ``irr`` then means the
    sub-linear irregularity, so that max(support) * ram == irr holds in every
    case.  ``coeffs`` is a numeric principal part for one member of the
    circle (conjugates rotate the coefficients), when available.
    ``sphere_exact`` and ``linear_exact`` record the z^2 and z coefficients
    when they are exactly known; None means not known exactly, not zero.
    ``exact_factor`` is set when the whole circle is exact after all, so
    callers can drop back to the exact layer.
    """

    point: PointP1
    ram: int
    irr: int
    support: frozenset[Fraction] = frozenset()
    coeffs: tuple[tuple[Fraction, complex], ...] | None = None
    exact_factor: ExpFactor | None = None
    sphere_exact: CycNum | None = None
    linear_exact: CycNum | None = None

    def __post_init__(self):
        if self.ram < 1:
            raise ValueError("ramification must be a positive integer")
        if self.irr < 0:
            raise ValueError("irregularity must be nonnegative")
        if self.support:
            if max(self.support) != Fraction(self.irr, self.ram):
                raise ValueError(
                    f"support maximum {max(self.support)} does not match "
                    f"irregularity {self.irr}/{self.ram}"
                )
        elif self.irr != 0:
            raise ValueError("nonzero irregularity requires a nonempty support")

    @property
    def slope(self) -> Fraction:
        return Fraction(self.irr, self.ram)

    @property
    def is_tame(self) -> bool:
        if self.irr != 0 or self.ram != 1 or self.support:
            return False
        return self.linear_exact is None or self.linear_exact.is_zero()

    def __str__(self) -> str:
        where = str(self.point)
        return f"skeleton(ram={self.ram}, irr={self.irr})@{where}"

    __repr__ = __str__


def _linear_coeff(q: ExpFactor) -> CycNum:
    for a, b in q.monomials:
        if a == q.ram:
            return b
    return _ZERO


def _square_coeff(q: ExpFactor) -> CycNum:
    for a, b in q.monomials:
        if a == 2 * q.ram:
            return b
    return _ZERO


def classify_type(c) -> int:
    """Position of a circle in the five-case Fourier table.

    1: at infinity, slope <= 1, pure (a multiple of z, possibly zero);
    2: at infinity, slope <= 1, with sub-linear content;
    3: at infinity, slope > 1;
    4: at a finite point, irregular;
    5: at a finite point, tame.
    """
    if isinstance(c, Circle):
        q = c.representative
    elif isinstance(c, ExpFactor):
        q = c
    elif isinstance(c, CircleSkeleton):
        if not c.point.is_infinity:
            return 5 if c.irr == 0 else 4
        if c.slope > 1:
            return 3
        return 2 if c.support else 1
    else:
        raise TypeError(f"cannot classify {type(c).__name__}")
    if not q.point.is_infinity:
        return 5 if q.is_tame else 4
    if q.slope > 1:
        return 3
    if q.is_tame or (len(q.monomials) == 1 and q.monomials[0][0] == q.ram):
        return 1
    return 2


# ---------------------------------------------------------------------------
# twist and scale on factors


def twist(q: ExpFactor, lam) -> ExpFactor:
    """Add (lam/2) z^2 to a factor at infinity; no effect at finite points."""
    lam = _cyc(lam)
    if not q.point.is_infinity or lam.is_zero():
        return q
    terms = {e: b for e, b in q.terms()}
    terms[_TWO] = terms.get(_TWO, _ZERO) + lam / CycNum.rational(2)
    pairs = [(e, b) for e, b in terms.items() if not b.is_zero()]
    pairs.sort(key=lambda p: p[0], reverse=True)
    return normalize(q.point, pairs)


def _nth_root_exact(x: CycNum, n: int) -> CycNum | None:
    """An n-th root of x inside the cyclotomic tower, when one is easy.

    Covers x = r * zeta^k with r rational whose numerator and denominator are
    perfect n-th powers (negative r handled through a 2n-th root of unity).
    Anything else returns None and callers fall back to numeric coefficients.
    """
    if n == 1:
        return x
    can = x.canonical()
    nz = [(i, c) for i, c in enumerate(can.coeffs) if c != 0]
    if len(nz) != 1:
        return None
    k, r = nz[0]
    neg = r < 0
    mag = -r if neg else r

    def iroot(m: int) -> int | None:
        if m == 0:
            return 0
        v = round(m ** (1.0 / n))
        for cand in (v - 1, v, v + 1):
            if cand >= 0 and cand**n == m:
                return cand
        return None

    p = iroot(mag.numerator)
    q = iroot(mag.denominator)
    if p is None or q is None:
        return None
    try:
        root = CycNum.rational(Fraction(p, q))
        if neg:
            root = root * root_of_unity(2 * n, 1)
        if k:
            root = root * root_of_unity(can.order * n, k)
    except OrderCapError:
        return None
    return root


def scale(q: ExpFactor, lam):
    """Image of a factor under the scaling operation with parameter lam.

    The point moves by a -> a/lam; coefficients pick up lam^(e) for each
    exponent e at infinity and lam^(-e) at finite points.  Returns an exact
    factor when the needed root of lam exists in the field, otherwise a
    numeric CircleSkeleton whose integer-exponent terms (the z^2 and z
    coefficients at infinity) stay exact in the annotations.
    """
    lam = _cyc(lam)
    if lam.is_zero():
        raise ValueError("scaling parameter must be nonzero")
    if q.point.is_infinity:
        point = q.point
        sign = 1
    else:
        point = PointP1.finite(_cyc(q.point.value) / lam)
        sign = -1
    if q.is_tame:
        return normalize(point, ())
    mu = _nth_root_exact(lam, q.ram)
    if mu is not None:
        pairs = [(Fraction(a, q.ram), b * mu ** (sign * a)) for a, b in q.monomials]
        return normalize(point, pairs)
    z = lam.to_complex()
    coeffs = [(Fraction(a, q.ram), b.to_complex() * z ** (sign * a / q.ram))
              for a, b in q.monomials]
    if not point.is_infinity:
        support = frozenset(e for e, _ in coeffs)
        return CircleSkeleton(point, q.ram, q.irr, support, tuple(coeffs))
    sphere = -CycNum.rational(2) * _square_coeff(q) * lam * lam
    lin = _linear_coeff(q) * lam
    if q.slope <= 1:
        # keep the linear term out of the support so irr means the
        # sub-linear irregularity, as for Fourier images of finite circles
        residual = [(e, c) for e, c in coeffs if e != 1]
        irr = max((a for a, _ in q.monomials if a != q.ram), default=0)
        return CircleSkeleton(point, q.ram, irr,
                              frozenset(e for e, _ in residual), tuple(residual),
                              sphere_exact=_ZERO, linear_exact=lin)
    support = frozenset(e for e, _ in coeffs)
    return CircleSkeleton(point, q.ram, q.irr, support, tuple(coeffs),
                          sphere_exact=sphere, linear_exact=lin)


# ---------------------------------------------------------------------------
# the Legendre transform of a single circle


def _image_support(numerators: list[int], new_ram: int) -> frozenset[Fraction]:
    alpha = numerators[0]
    gaps = semigroup_gaps(numerators)
    return frozenset(Fraction(alpha - g, new_ram) for g in gaps if g < alpha)


def _complex_monomials(q: ExpFactor) -> tuple[list[int], list[complex]]:
    return [a for a, _ in q.monomials], [b.to_complex() for _, b in q.monomials]


def legendre_skeleton(c: Circle) -> CircleSkeleton:
    """Invariants (and coefficients where available) of the Fourier image."""
    q = c.representative
    kind = classify_type(q)

    if kind == 5:
        a = _cyc(q.point.value)
        if a.is_zero():
            f = normalize(INF, ())
            return CircleSkeleton(INF, 1, 0, frozenset(), exact_factor=f,
                                  sphere_exact=_ZERO, linear_exact=_ZERO)
        f = normalize(INF, [(Fraction(1), -a)])
        return CircleSkeleton(INF, 1, 0, frozenset(), exact_factor=f,
                              sphere_exact=_ZERO, linear_exact=-a)

    if kind == 1:
        mu = _linear_coeff(q)
        target = PointP1.finite(-mu)
        f = normalize(target, ())
        return CircleSkeleton(target, 1, 0, frozenset(), exact_factor=f)

    if kind == 4:
        a = _cyc(q.point.value)
        nums, cos = _complex_monomials(q)
        new_ram = q.irr + q.ram
        support = _image_support(nums, new_ram)
        coeffs = tuple(legendre_numeric("finite", nums, q.ram, cos))
        return CircleSkeleton(INF, new_ram, q.irr, support, coeffs,
                              sphere_exact=_ZERO, linear_exact=-a)

    if kind == 2:
        mu = _linear_coeff(q)
        residual = [(a, b) for a, b in q.monomials if a != q.ram]
        nums = [a for a, _ in residual]
        new_ram = q.ram - nums[0]
        support = _image_support(nums, new_ram)
        target = PointP1.finite(-mu)
        return CircleSkeleton(target, new_ram, nums[0], support)

    # kind == 3
    if q.irr == 2 and q.ram == 1:
        # slope exactly 2: the transform is a change of quadratic, exact
        p = _square_coeff(q)
        mu = _linear_coeff(q)
        quarter = CycNum.rational(Fraction(-1, 4)) / p
        half = mu / (CycNum.rational(2) * p)
        pairs = [(Fraction(2), quarter)]
        if not half.is_zero():
            pairs.append((Fraction(1), half))
        f = normalize(INF, pairs)
        return CircleSkeleton(
            INF, 1, 2, frozenset(e for e, _ in f.terms()),
            exact_factor=f,
            sphere_exact=-CycNum.rational(2) * quarter,
            linear_exact=half,
        )
    nums, cos = _complex_monomials(q)
    new_ram = q.irr - q.ram
    support = _image_support(nums, new_ram)
    coeffs = tuple(legendre_numeric("inf", nums, q.ram, cos))
    sphere = _ZERO if Fraction(2) not in support else None
    lin = _ZERO if Fraction(1) not in support else None
    return CircleSkeleton(INF, new_ram, q.irr, support, coeffs,
                          sphere_exact=sphere, linear_exact=lin)


def numeric_legendre(q: ExpFactor, n_terms: int,
                     precision: float = 1e-11) -> list[tuple[Fraction, complex]]:
    """First n_terms of the principal part of the transform of a factor at
    infinity with slope > 1, exponents descending."""
    if n_terms <= 0:
        raise ValueError("n_terms must be positive")
    if not q.point.is_infinity or q.slope <= 1:
        raise ValueError("the expansion needs a factor at infinity with slope > 1")
    nums, cos = _complex_monomials(q)
    out = legendre_numeric("inf", nums, q.ram, cos, drop_tol=precision)
    return out[:n_terms]


def fourier_circle(c: Circle) -> tuple[CircleSkeleton, int]:
    """Image skeleton and the sign picked up by monodromy eigenvalues."""
    kind = classify_type(c)
    sign = -1 if kind in (2, 3, 4) and c.irr % 2 == 1 else 1
    return legendre_skeleton(c), sign


# ---------------------------------------------------------------------------
# Fourier transform of whole data sets


def _fourier_image_circle(circle):
    """Image of one circle (exact or skeleton) plus the eigenvalue sign."""
    if isinstance(circle, Circle):
        sk, sign = fourier_circle(circle)
        if sk.exact_factor is not None:
            return circle_of(sk.exact_factor), sign
        return sk, sign
    if isinstance(circle, CircleSkeleton):
        if circle.exact_factor is not None:
            return _fourier_image_circle(circle_of(circle.exact_factor))
        return _fourier_skeleton(circle)
    raise TypeError(f"cannot transform {type(circle).__name__}")


def _fourier_skeleton(sk: CircleSkeleton):
    """Fourier image of a numeric skeleton, where the data allows it."""
    if not sk.point.is_infinity:
        if sk.irr == 0:
            # tame at a finite point: exact after all
            return _fourier_image_circle(circle_of(normalize(sk.point, ())))
        if sk.coeffs is None:
            raise ValueError(
                "cannot transform a finite skeleton without numeric coefficients"
            )
        nums = [int(e * sk.ram) for e, _ in sk.coeffs]
        cos = [c for _, c in sk.coeffs]
        new_ram = sk.irr + sk.ram
        sign = -1 if sk.irr % 2 == 1 else 1
        out = CircleSkeleton(
            INF, new_ram, sk.irr, _image_support(nums, new_ram),
            tuple(legendre_numeric("finite", nums, sk.ram, cos)),
            sphere_exact=_ZERO,
            linear_exact=None if sk.point.value is None else -_cyc(sk.point.value),
        )
        return out, sign
    if sk.slope > 1:
        if sk.coeffs is None:
            raise ValueError(
                "cannot transform a skeleton at infinity without coefficients"
            )
        nums = [int(e * sk.ram) for e, _ in sk.coeffs]
        cos = [c for _, c in sk.coeffs]
        new_ram = sk.irr - sk.ram
        sign = -1 if sk.irr % 2 == 1 else 1
        sup = _image_support(nums, new_ram)
        return CircleSkeleton(
            INF, new_ram, sk.irr, sup,
            tuple(legendre_numeric("inf", nums, sk.ram, cos)),
            sphere_exact=_ZERO if Fraction(2) not in sup else None,
            linear_exact=_ZERO if Fraction(1) not in sup else None,
        ), sign
    # slope <= 1 at infinity: needs the linear coefficient to place the image
    if sk.linear_exact is None:
        raise ValueError("skeleton lacks the exact linear coefficient of its factor")
    target = PointP1.finite(-sk.linear_exact)
    if sk.irr == 0:
        # pure: exact tame image
        return circle_of(normalize(target, ())), 1
    nums = sorted({int(e * sk.ram) for e in sk.support}, reverse=True)
    new_ram = sk.ram - sk.irr
    # the irregularity of the underlying factor is ram when the linear term
    # is present, and just the sub-linear part when it is not
    irr_true = sk.irr if sk.linear_exact.is_zero() else sk.ram
    sign = -1 if irr_true % 2 == 1 else 1
    return CircleSkeleton(target, new_ram, sk.irr,
                          _image_support(nums, new_ram)), sign


def fourier_rank(mfd: ModifiedFormalData) -> int:
    """Rank of the Fourier image, straight from the local data."""
    total = 0
    for _, entries in mfd.finite_items():
        for e in entries:
            if e.is_tame:
                total += e.mult
            else:
                total += e.mult * (e.circle.irr + e.circle.ram)
    for e in mfd.infinity_entries():
        if e.circle.slope > 1:
            total += e.mult * (e.circle.irr - e.circle.ram)
    return total


_MINUS_ONE = CycNum.rational(-1)


def fourier_formal(mfd: ModifiedFormalData) -> ModifiedFormalData:
    """Transport modified formal data through the Fourier transform.

    Entries move one by one: circle to image circle, eigenvalues scaled by
    the parity sign, multiplicities unchanged.  Raises ValueError when the
    image fails the compatibility bound, since no actual connection has such
    data.
    """
    grouped: list[tuple[PointP1, list[LocalEntry]]] = []

    def bucket(point: PointP1) -> list[LocalEntry]:
        for p, items in grouped:
            if p == point:
                return items
        items: list[LocalEntry] = []
        grouped.append((point, items))
        return items

    for _, entries in mfd.points:
        for e in entries:
            image, sign = _fourier_image_circle(e.circle)
            mon = e.mon if sign == 1 else e.mon.scale_eigenvalues(_MINUS_ONE)
            bucket(image.point).append(LocalEntry(image, e.mult, mon))

    out = ModifiedFormalData([(p, tuple(items)) for p, items in grouped])
    if not compatible(out):
        raise ValueError("Fourier image violates the rank compatibility bound")
    expected = fourier_rank(mfd)
    if rank_of(out) != expected:
        raise AssertionError(
            f"image rank {rank_of(out)} does not match predicted {expected}"
        )
    return out


# ---------------------------------------------------------------------------
# sphere bookkeeping for exact circles


def slope2_coefficient(c) -> FourierSphereCoeff:
    """Sphere coordinate of a circle: infinity for finite points, else the
    lam with q = -(lam/2) z^2 + lower."""
    if isinstance(c, CircleSkeleton):
        if not c.point.is_infinity:
            return FourierSphereCoeff.infinity()
        if c.sphere_exact is not None:
            return FourierSphereCoeff.of(c.sphere_exact)
        raise ValueError("sphere coefficient of this skeleton is not exact")
    q = c.representative if isinstance(c, Circle) else c
    if not q.point.is_infinity:
        return FourierSphereCoeff.infinity()
    return FourierSphereCoeff.of(-CycNum.rational(2) * _square_coeff(q))


def _residual_slope(q: ExpFactor) -> Fraction:
    """Slope of a factor at infinity once its z^2 term is removed."""
    rest = [a for a, _ in q.monomials if a != 2 * q.ram]
    return Fraction(rest[0], q.ram) if rest else Fraction(0)


def sends_to_finite(c: Circle, mat: SL2Matrix) -> PointP1 | None:
    """Target point when mat moves a circle at infinity to finite distance.

    That happens exactly when the part of the factor beyond z^2 has slope at
    most 1 and the homography sends the sphere coefficient to infinity.
    Returns None when the circle stays at infinity.
    """
    q = c.representative
    if not q.point.is_infinity:
        raise ValueError("sends_to_finite expects a circle at infinity")
    if _residual_slope(q) > 1:
        return None
    lam = slope2_coefficient(c).value
    mu = _linear_coeff(q)
    state: tuple[str, CycNum, CycNum] | tuple[str, CycNum] = ("inf", lam, mu)
    for op in reversed(factor_sl2(mat)):
        if state[0] == "inf":
            _, lam, mu = state
            if op.kind == "twist":
                state = ("inf", lam + op.param, mu)
            elif op.kind == "scaling":
                nu = op.param
                state = ("inf", lam / (nu * nu), mu / nu)
            else:
                if lam.is_zero():
                    state = ("fin", -mu)
                else:
                    state = ("inf", -lam.inverse(), -mu / lam)
        else:
            _, a = state
            if op.kind == "scaling":
                state = ("fin", a * op.param)
            elif op.kind == "fourier":
                state = ("inf", _ZERO, -a)
            # twist leaves finite points alone
    if state[0] == "fin":
        return PointP1.finite(state[1])
    return None


# ---------------------------------------------------------------------------
# factorization and application of SL(2) elements


def factor_sl2(mat: SL2Matrix) -> list[ElementaryOp]:
    """Write mat as a product of elementary letters, listed left to right.

    c = 0:  mat = S_nu T_rho with nu = d, rho = b/a.
    c != 0: mat = T_(a/c) F S_(-1/c) T_(d/c).
    Application order is right to left, as for the matrix product.
    """
    if mat.c.is_zero():
        return [ElementaryOp.scaling(mat.d), ElementaryOp.twist(mat.b / mat.a)]
    return [
        ElementaryOp.twist(mat.a / mat.c),
        ElementaryOp.fourier(),
        ElementaryOp.scaling(-mat.c.inverse()),
        ElementaryOp.twist(mat.d / mat.c),
    ]


def _twist_circle(circle, t: CycNum):
    """Circle-level twist by the operation parameter t (adds (t/2) z^2)."""
    if isinstance(circle, Circle):
        if not circle.point.is_infinity:
            return circle
        return circle_of(twist(circle.representative, t))
    sk: CircleSkeleton = circle
    if not sk.point.is_infinity or t.is_zero():
        return sk
    if sk.exact_factor is not None:
        return circle_of(twist(sk.exact_factor, t))
    raise ValueError("cannot twist a numeric skeleton exactly")


def _scale_circle(circle, m: CycNum):
    """Circle-level scaling by the operation parameter m."""
    if isinstance(circle, Circle):
        out = scale(circle.representative, m)
        return circle_of(out) if isinstance(out, ExpFactor) else out
    sk: CircleSkeleton = circle
    if sk.exact_factor is not None:
        out = scale(sk.exact_factor, m)
        return circle_of(out) if isinstance(out, ExpFactor) else out
    if sk.point.is_infinity:
        sphere = None
        if sk.sphere_exact is not None:
            sphere = sk.sphere_exact * m * m
        lin = sk.linear_exact * m if sk.linear_exact is not None else None
        coeffs = None
        if sk.coeffs is not None:
            z = m.to_complex()
            coeffs = tuple((e, c * z ** float(e)) for e, c in sk.coeffs)
        return CircleSkeleton(sk.point, sk.ram, sk.irr, sk.support, coeffs,
                              sphere_exact=sphere, linear_exact=lin)
    target = PointP1.finite(_cyc(sk.point.value) / m)
    coeffs = None
    if sk.coeffs is not None:
        z = m.to_complex()
        coeffs = tuple((e, c * z ** float(-e)) for e, c in sk.coeffs)
    return CircleSkeleton(target, sk.ram, sk.irr, sk.support, coeffs)


def _map_entries(mfd: ModifiedFormalData, fn) -> ModifiedFormalData:
    grouped: list[tuple[PointP1, list[LocalEntry]]] = []
    for _, entries in mfd.points:
        for e in entries:
            circle = fn(e.circle)
            found = None
            for p, items in grouped:
                if p == circle.point:
                    found = items
                    break
            if found is None:
                found = []
                grouped.append((circle.point, found))
            found.append(LocalEntry(circle, e.mult, e.mon))
    return ModifiedFormalData([(p, tuple(items)) for p, items in grouped])


def apply_sl2(mfd: ModifiedFormalData, mat: SL2Matrix) -> ModifiedFormalData:
    """Transport modified formal data through an arbitrary SL(2) element.

    The matrix is factored into elementary letters; twists act on factors by
    q -> q - (rho/2) z^2 and scalings S_nu as the scale operation with
    parameter 1/nu, so that sphere coefficients follow the plain homography
    of the matrix itself.
    """
    out = mfd
    for op in reversed(factor_sl2(mat)):
        if op.kind == "twist":
            if not op.param.is_zero():
                out = _map_entries(out, lambda c: _twist_circle(c, -op.param))
        elif op.kind == "scaling":
            if op.param != _ONE:
                inv = op.param.inverse()
                out = _map_entries(out, lambda c: _scale_circle(c, inv))
        else:
            out = fourier_formal(out)
    return out


def normalize_to_infinity(mfd: ModifiedFormalData) -> tuple[SL2Matrix, ModifiedFormalData]:
    """A matrix F T_lam moving every entry to infinity, with its image.

    lam runs over 0, 1, 2, ... and the first value whose image is defined and
    supported entirely at infinity wins, so the result is deterministic.
    Data already at infinity returns the identity.
    """
    if all(p.is_infinity for p, _ in mfd.points):
        return SL2Matrix.identity(), mfd
    last_error: ValueError | None = None
    lam = 0
    while lam < 1000:
        mat = SL2Matrix.fourier() * SL2Matrix.twist(lam)
        try:
            image = apply_sl2(mfd, mat)
        except ValueError as exc:
            last_error = exc
            lam += 1
            continue
        if all(p.is_infinity for p, _ in image.points):
            return mat, image
        lam += 1
    raise ArithmeticError(
        "no twist below 1000 moved the data to infinity"
    ) from last_error
