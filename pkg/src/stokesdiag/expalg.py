"""Exponential factors, their Galois orbits (circles), and Stokes arrow counts.

An exponential factor at a point of P^1 is a finite sum q = sum b_j t^(-a_j/b)
in the local coordinate t (t = z - a at a finite point a, t = 1/z at
infinity), with exact cyclotomic coefficients.  Its Galois orbit under the
b-th roots of unity is a "circle"; circles are the nodes the diagram modules
work with.  Two independent arrow counts are provided: a brute-force sum of
slopes over all conjugate pairs, and the gcd closed formula; they must agree,
and the test suite leans on that redundancy hard.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .cyclo import CycNum, root_of_unity

__all__ = [
    "INF",
    "PointP1",
    "ExpFactor",
    "Circle",
    "normalize",
    "invariants_of",
    "galois_conjugates",
    "circle_of",
    "circle_eq",
    "common_part_index",
    "irr_hom_bruteforce",
    "hom_rank",
    "b_infinity_gcd",
]


@dataclass(frozen=True)
class PointP1:
    """A point of the projective line: infinity (value None) or a finite a."""

    value: CycNum | None = None

    @staticmethod
    def infinity() -> "PointP1":
        return INF

    @staticmethod
    def finite(a) -> "PointP1":
        return PointP1(CycNum.rational(a) if not isinstance(a, CycNum) else a)

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)

    __repr__ = __str__


INF = PointP1(None)


def _coeff_prefix(b: CycNum) -> str:
    """Render a coefficient as a leading multiplier for a z-power term."""
    s = str(b)
    if s == "1":
        return ""
    if s == "-1":
        return "-"
    if any(ch in s for ch in " +*/") or s.startswith("-"):
        return f"({s})*"
    return f"{s}*"


def _power_str(e: Fraction) -> str:
    if e == 1:
        return "z"
    if e.denominator == 1 and e > 0:
        return f"z^{e}"
    return f"z^({e})"


@dataclass(frozen=True)
class ExpFactor:
    """A normalized exponential factor.

    Invariants: coefficients nonzero, numerators strictly decreasing and
    positive, gcd(ram, all numerators) = 1; an empty monomial tuple is the
    tame factor q = 0 (with ram 1).
    """

    point: PointP1
    ram: int
    monomials: tuple[tuple[int, CycNum], ...]

    def __post_init__(self):
        if self.ram < 1:
            raise ValueError("ramification must be a positive integer")
        if not self.monomials and self.ram != 1:
            raise ValueError("the tame factor has ramification 1")
        prev = None
        g = self.ram
        for a, b in self.monomials:
            if a < 1:
                raise ValueError("monomial numerators must be positive")
            if prev is not None and a >= prev:
                raise ValueError("numerators must be strictly decreasing")
            if b.is_zero():
                raise ValueError("zero coefficients are not stored")
            prev = a
            g = gcd(g, a)
        if self.monomials and g != 1:
            raise ValueError(f"ramification {self.ram} is not minimal (gcd {g})")

    # -- invariants ----------------------------------------------------------

    @property
    def is_tame(self) -> bool:
        return not self.monomials

    @property
    def irr(self) -> int:
        return self.monomials[0][0] if self.monomials else 0

    @property
    def slope(self) -> Fraction:
        return Fraction(self.irr, self.ram) if self.monomials else Fraction(0)

    def exponents(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self.ram) for a, _ in self.monomials)

    def terms(self) -> tuple[tuple[Fraction, CycNum], ...]:
        return tuple((Fraction(a, self.ram), b) for a, b in self.monomials)

    def prefix(self, r: int) -> "ExpFactor":
        """The partial sum of the first r monomials, renormalized on its own."""
        return normalize(self.point, self.terms()[:r])

    def __str__(self) -> str:
        if self.is_tame:
            return "0"
        sign = 1 if self.point.is_infinity else -1
        parts = []
        for a, b in self.monomials:
            parts.append(_coeff_prefix(b) + _power_str(sign * Fraction(a, self.ram)))
        out = parts[0]
        for p in parts[1:]:
            if p.startswith("-"):
                out += " - " + p[1:]
            else:
                out += " + " + p
        return out

    __repr__ = __str__


def normalize(point: PointP1, monomials, denominator: int = 1) -> ExpFactor:
    """Build a normalized factor from raw (exponent, coeff) pairs.

    Exponents may be Fractions or integers over an optional common
    denominator; duplicate exponents are merged, zero coefficients dropped,
    and the ramification reduced to its minimum.
    """
    acc: dict[Fraction, CycNum] = {}
    for num, coeff in monomials:
        e = Fraction(num, denominator)
        c = coeff if isinstance(coeff, CycNum) else CycNum.rational(coeff)
        acc[e] = acc[e] + c if e in acc else c
    items = [(e, c) for e, c in acc.items() if not c.is_zero()]
    for e, _ in items:
        if e <= 0:
            raise ValueError(f"exponent {e} must be positive in the local coordinate")
    if not items:
        return ExpFactor(point, 1, ())
    beta = 1
    for e, _ in items:
        beta = lcm(beta, e.denominator)
    mono = tuple(
        (int(e * beta), c) for e, c in sorted(items, key=lambda ec: ec[0], reverse=True)
    )
    return ExpFactor(point, beta, mono)


def invariants_of(q: ExpFactor) -> tuple[int, int, Fraction]:
    return q.ram, q.irr, q.slope


def galois_conjugates(q: ExpFactor) -> list[ExpFactor]:
    """All ram(q) conjugates of q under t^(1/beta) -> zeta_beta * t^(1/beta)."""
    b = q.ram
    if b == 1:
        return [q]
    out = []
    for i in range(b):
        mono = tuple((a, c * root_of_unity(b, (-i * a) % b)) for a, c in q.monomials)
        out.append(ExpFactor(q.point, b, mono))
    return out


def _factor_sort_key(q: ExpFactor):
    return (
        tuple(a for a, _ in q.monomials),
        tuple(c.sort_key() for _, c in q.monomials),
    )


@dataclass(frozen=True)
class Circle:
    """A Galois orbit of exponential factors, held by its least conjugate."""

    representative: ExpFactor

    @property
    def point(self) -> PointP1:
        return self.representative.point

    @property
    def ram(self) -> int:
        return self.representative.ram

    @property
    def irr(self) -> int:
        return self.representative.irr

    @property
    def slope(self) -> Fraction:
        return self.representative.slope

    @property
    def is_tame(self) -> bool:
        return self.representative.is_tame

    def conjugates(self) -> list[ExpFactor]:
        return galois_conjugates(self.representative)

    def __str__(self) -> str:
        return f"<{self.representative}>@{self.point}"

    __repr__ = __str__


def circle_of(q: ExpFactor) -> Circle:
    rep = min(galois_conjugates(q), key=_factor_sort_key)
    return Circle(rep)


def circle_eq(c1: Circle, c2: Circle) -> bool:
    """Orbit-set equality by explicit enumeration of all conjugates."""
    if c1.point != c2.point:
        return False
    return set(c1.conjugates()) == set(c2.conjugates())


def _difference(q: ExpFactor, qp: ExpFactor) -> ExpFactor:
    mono = [(Fraction(a, q.ram), c) for a, c in q.monomials]
    mono.extend((Fraction(a, qp.ram), -c) for a, c in qp.monomials)
    return normalize(q.point, mono)


def common_part_index(q: ExpFactor, qp: ExpFactor) -> tuple[int, ExpFactor]:
    """Length of the common part of q and q', plus an aligned conjugate of q'.

    r is the largest prefix length whose exponent sequences agree and whose
    partial sums generate the same Galois orbit (each partial sum taken at its
    own minimal ramification).  The returned conjugate of q' has its first r
    monomials literally equal to q's.
    """
    if q.point != qp.point:
        raise ValueError("factors live at different points")
    eq, ep = q.exponents(), qp.exponents()
    r = 0
    for k in range(1, min(len(eq), len(ep)) + 1):
        if eq[k - 1] != ep[k - 1]:
            break
        if circle_of(q.prefix(k)) != circle_of(qp.prefix(k)):
            break
        r = k
    if r == 0:
        return 0, qp
    target = q.terms()[:r]
    for cand in galois_conjugates(qp):
        if cand.terms()[:r] == target:
            return r, cand
    raise AssertionError("no conjugate aligns the common part; orbit logic is broken")


def irr_hom_bruteforce(c1: Circle, c2: Circle) -> int:
    """Sum of slope(q_i - q'_j) over all conjugate pairs; must be an integer."""
    if c1.point != c2.point:
        raise ValueError("circles live at different points")
    total = Fraction(0)
    for qi in c1.conjugates():
        for qj in c2.conjugates():
            total += _difference(qi, qj).slope
    if total.denominator != 1:
        raise ArithmeticError(f"irregularity sum {total} is not an integer")
    return int(total)


def hom_rank(c1: Circle, c2: Circle) -> int:
    """ram(c1) * ram(c2), with a consistency check that the difference
    multiset splits into full Galois orbits."""
    if c1.point != c2.point:
        raise ValueError("circles live at different points")
    groups: dict[Circle, Counter] = {}
    for qi in c1.conjugates():
        for qj in c2.conjugates():
            f = _difference(qi, qj)
            groups.setdefault(circle_of(f), Counter())[f] += 1
    for circ, counts in groups.items():
        if len(counts) != circ.ram or len(set(counts.values())) != 1:
            raise ArithmeticError("difference multiset does not split into full orbits")
    return c1.ram * c2.ram


def b_infinity_gcd(c1: Circle, c2: Circle) -> int:
    """Stokes arrow count between two circles at the same point, closed form.

    Distinct circles: (b' - (a'_0,b'))a_0 + sum of gcd-difference terms over
    the common part + (a'_0,..,a'_{r-1},b')a_r - b b', after swapping so the
    first different monomial of the unprimed side has the larger slope.
    Equal circles use the loop variant ending in - b^2 + 1.
    """
    if c1.point != c2.point:
        raise ValueError("circles live at different points")
    if c1 == c2:
        q = c1.representative
        if q.is_tame:
            return 0
        g = q.ram
        total = 0
        for a, _ in q.monomials:
            ng = gcd(g, a)
            total += (g - ng) * a
            g = ng
        return total - q.ram * q.ram + 1
    q, qp = c1.representative, c2.representative
    r, _ = common_part_index(q, qp)
    slope_q = Fraction(q.monomials[r][0], q.ram) if len(q.monomials) > r else Fraction(0)
    slope_p = Fraction(qp.monomials[r][0], qp.ram) if len(qp.monomials) > r else Fraction(0)
    if slope_q < slope_p:
        q, qp = qp, q
    if len(q.monomials) <= r:
        raise AssertionError("distinct circles need a different part on the steep side")
    g = qp.ram
    total = 0
    for i in range(r):
        ng = gcd(g, qp.monomials[i][0])
        total += (g - ng) * q.monomials[i][0]
        g = ng
    total += g * q.monomials[r][0]
    return total - q.ram * qp.ram
