"""Exact arithmetic in cyclotomic fields Q(zeta_N).

A value is a polynomial in zeta_N = exp(2*pi*i/N) with rational coefficients,
stored reduced mod the cyclotomic polynomial Phi_N, so the coefficient vector
has length phi(N).  Binary operations promote both operands to the lcm of
their orders; a global cap (MAX_ORDER) turns runaway promotions into a clear
error instead of a slow death.

The stored order of a value is whatever representation it was produced in;
``canonical()`` rewrites the value in the *smallest* cyclotomic order that
contains it (the conductor), which is what equality, hashing, the total sort
key and printing use.  That keeps Galois-orbit comparisons and deterministic
orderings honest without paying for a linear solve on every intermediate
result.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd

__all__ = [
    "MAX_ORDER",
    "OrderCapError",
    "CycNum",
    "cyclotomic_polynomial",
    "euler_phi",
    "embed",
    "root_of_unity",
]

MAX_ORDER = 360

_F0 = Fraction(0)
_F1 = Fraction(1)


class OrderCapError(ValueError):
    """An operation needed a cyclotomic order above MAX_ORDER."""


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("order must be a positive integer")
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def _divisors(n: int) -> tuple[int, ...]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return tuple(small + large[::-1])


def _poly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and not p[-1]:
        p.pop()
    return p


def _poly_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    q = [_F0] * max(0, len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(r) - len(b), -1, -1):
        c = r[i + len(b) - 1] / lead
        if c:
            q[i] = c
            for k, bk in enumerate(b):
                if bk:
                    r[i + k] -= c * bk
    return _poly_trim(q), _poly_trim(r[: len(b) - 1])


def _poly_xgcd(a: list[Fraction], b: list[Fraction]):
    """Extended Euclid in Q[x]: returns (g, s, t) with s*a + t*b = g.

    https://en.wikipedia.org/wiki/Extended_Euclidean_algorithm
    """
    r0, r1 = list(a), list(b)
    s0, s1 = [_F1], []
    t0, t1 = [], [_F1]
    while r1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        t0, t1 = t1, _poly_sub(t0, _poly_mul(q, t1))
    return r0, s0, t0


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [_F0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] += ai * bj
    return _poly_trim(out)


def _poly_sub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    out = [_F0] * n
    for i, ai in enumerate(a):
        out[i] = ai
    for i, bi in enumerate(b):
        out[i] -= bi
    return _poly_trim(out)


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, low degree first, computed by dividing x^n - 1
    by every Phi_d with d | n, d < n."""
    if n < 1:
        raise ValueError("order must be a positive integer")
    if n == 1:
        return (-1, 1)
    p = [Fraction(-1)] + [_F0] * (n - 1) + [_F1]
    for d in _divisors(n):
        if d < n:
            q, r = _poly_divmod(p, [Fraction(c) for c in cyclotomic_polynomial(d)])
            if r:
                raise AssertionError(f"Phi_{d} does not divide x^{n}-1")
            p = q
    return tuple(int(c) for c in p)


def _reduce_mod_cyclotomic(coeffs: list[Fraction], n: int) -> tuple[Fraction, ...]:
    deg = euler_phi(n)
    mod = cyclotomic_polynomial(n)
    work = list(coeffs)
    if len(work) < deg:
        work.extend([_F0] * (deg - len(work)))
    for top in range(len(work) - 1, deg - 1, -1):
        c = work[top]
        if c:
            work[top] = _F0
            base = top - deg
            for k in range(deg):
                mk = mod[k]
                if mk:
                    work[base + k] -= c * mk
    return tuple(work[:deg])


@lru_cache(maxsize=None)
def _subfield_columns(n: int, d: int) -> tuple[tuple[Fraction, ...], ...]:
    """Coordinates of zeta_d^j (j < phi(d)) in the zeta_n power basis."""
    step = n // d
    cols = []
    for j in range(euler_phi(d)):
        e = (j * step) % n
        vec = [_F0] * (e + 1)
        vec[e] = _F1
        cols.append(_reduce_mod_cyclotomic(vec, n))
    return tuple(cols)


def _solve_exact(cols, rhs):
    """Solve sum_j x_j * cols[j] = rhs exactly; None if inconsistent.

    The columns used here are linearly independent, so a consistent system
    has exactly one solution.
    """
    m, k = len(rhs), len(cols)
    rows = [[cols[j][r] for j in range(k)] + [rhs[r]] for r in range(m)]
    pivots: list[tuple[int, int]] = []
    rank = 0
    for c in range(k):
        p = next((i for i in range(rank, m) if rows[i][c]), None)
        if p is None:
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        inv = 1 / rows[rank][c]
        rows[rank] = [v * inv for v in rows[rank]]
        for i in range(m):
            if i != rank and rows[i][c]:
                f = rows[i][c]
                rows[i] = [v - f * w for v, w in zip(rows[i], rows[rank])]
        pivots.append((rank, c))
        rank += 1
    for i in range(rank, m):
        if rows[i][k]:
            return None
    if rank < k:
        raise AssertionError("subfield basis columns must be independent")
    sol = [_F0] * k
    for r, c in pivots:
        sol[c] = rows[r][k]
    return sol


def _minimal_form(n: int, coeffs: tuple[Fraction, ...]):
    if n == 1:
        return 1, coeffs
    if all(c == 0 for c in coeffs[1:]):
        return 1, coeffs[:1]
    for d in _divisors(n):
        if d == 1 or d == n:
            continue
        sol = _solve_exact(_subfield_columns(n, d), coeffs)
        if sol is not None:
            return d, tuple(sol)
    return n, coeffs


def _fmt_rational(x: Fraction) -> str:
    return str(x)  # Fraction prints p/q or p, both valid scalar syntax


class CycNum:
    """An element of Q(zeta_order), reduced mod Phi_order.

    Treat instances as immutable.  Equality, hashing and ``sort_key`` work on
    the canonical (minimal-order) form, so equal values collide in sets and
    dicts regardless of how they were produced.
    """

    __slots__ = ("order", "coeffs", "_canon", "_hash")

    def __init__(self, order: int, coeffs, _reduced: bool = False):
        if order < 1:
            raise ValueError("order must be a positive integer")
        if order > MAX_ORDER:
            raise OrderCapError(f"cyclotomic order {order} exceeds cap {MAX_ORDER}")
        vals = []
        for c in coeffs:
            if isinstance(c, Fraction):
                vals.append(c)
            elif isinstance(c, int):
                vals.append(Fraction(c))
            else:
                raise TypeError(f"coefficients must be int or Fraction, got {type(c).__name__}")
        if _reduced and len(vals) == euler_phi(order):
            tup = tuple(vals)
        else:
            tup = _reduce_mod_cyclotomic(vals, order)
        self.order = order
        self.coeffs = tup
        self._canon = None
        self._hash = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def rational(cls, x) -> "CycNum":
        if isinstance(x, CycNum):
            return x
        return cls(1, (Fraction(x),), _reduced=True)

    @classmethod
    def zero(cls) -> "CycNum":
        return cls.rational(0)

    @classmethod
    def one(cls) -> "CycNum":
        return cls.rational(1)

    # -- canonical form ----------------------------------------------------

    def canonical(self) -> "CycNum":
        c = self._canon
        if c is None:
            d, cs = _minimal_form(self.order, self.coeffs)
            if d == self.order:
                c = self
            else:
                c = CycNum(d, cs, _reduced=True)
                c._canon = c
            self._canon = c
        return c

    def sort_key(self):
        """Deterministic total-order key: (minimal order, coefficient tuple)."""
        v = self.canonical()
        return (v.order, v.coeffs)

    # -- predicates / conversions -------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational(self) -> bool:
        return self.canonical().order == 1

    def as_fraction(self) -> Fraction:
        v = self.canonical()
        if v.order != 1:
            raise ValueError(f"{self} is not rational")
        return v.coeffs[0]

    def to_complex(self) -> complex:
        """Double-precision image under zeta_N -> exp(2*pi*i/N); oracle only."""
        n = self.order
        return sum(
            (complex(c) * cmath.exp(2j * cmath.pi * k / n) for k, c in enumerate(self.coeffs) if c),
            0j,
        )

    # -- arithmetic ----------------------------------------------------------

    @staticmethod
    def _coerce(x):
        if isinstance(x, CycNum):
            return x
        if isinstance(x, (int, Fraction)):
            return CycNum.rational(x)
        return None

    def _common(self, other: "CycNum"):
        a, b = self, other
        if a.order == b.order:
            return a.order, a.coeffs, b.coeffs
        n = a.order * b.order // gcd(a.order, b.order)
        if n > MAX_ORDER:
            a, b = a.canonical(), b.canonical()
            n = a.order * b.order // gcd(a.order, b.order)
            if n > MAX_ORDER:
                raise OrderCapError(
                    f"operation needs order lcm({a.order},{b.order}) > {MAX_ORDER}"
                )
        return n, _embed_coeffs(a, n), _embed_coeffs(b, n)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n, ca, cb = self._common(o)
        return CycNum(n, tuple(x + y for x, y in zip(ca, cb)), _reduced=True)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n, ca, cb = self._common(o)
        return CycNum(n, tuple(x - y for x, y in zip(ca, cb)), _reduced=True)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o.__sub__(self)

    def __neg__(self):
        out = CycNum(self.order, tuple(-c for c in self.coeffs), _reduced=True)
        return out

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n, ca, cb = self._common(o)
        if n == 1:
            return CycNum(1, (ca[0] * cb[0],), _reduced=True)
        return CycNum(n, _poly_mul(list(ca), list(cb)))

    __rmul__ = __mul__

    def inverse(self) -> "CycNum":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.order == 1:
            return CycNum(1, (1 / self.coeffs[0],), _reduced=True)
        mod = [Fraction(c) for c in cyclotomic_polynomial(self.order)]
        g, s, _ = _poly_xgcd(_poly_trim(list(self.coeffs)), mod)
        if len(g) != 1:
            raise AssertionError("Phi_N is irreducible; gcd must be a unit")
        inv = [c / g[0] for c in s]
        return CycNum(self.order, inv)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self
        if k < 0:
            base = self.inverse()
            k = -k
        result = CycNum.one()
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- comparison ----------------------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.canonical(), o.canonical()
        return a.order == b.order and a.coeffs == b.coeffs

    def __hash__(self):
        h = self._hash
        if h is None:
            v = self.canonical()
            h = hash(v.coeffs[0]) if v.order == 1 else hash((v.order, v.coeffs))
            self._hash = h
        return h

    # -- printing ------------------------------------------------------------

    def __str__(self):
        v = self.canonical()
        if v.order == 1:
            return _fmt_rational(v.coeffs[0])
        sym = "i" if v.order == 4 else f"zeta({v.order})"
        parts = []
        for k, c in enumerate(v.coeffs):
            if not c:
                continue
            if k == 0:
                body = _fmt_rational(abs(c))
            else:
                power = sym if k == 1 else f"{sym}^{k}"
                mag = abs(c)
                if mag == 1:
                    body = power
                elif mag.denominator == 1:
                    body = f"{mag}*{power}"
                else:
                    body = f"({mag})*{power}"
            parts.append(("-" if c < 0 else "+", body))
        out = []
        for idx, (sign, body) in enumerate(parts):
            if idx == 0:
                out.append(("-" if sign == "-" else "") + body)
            else:
                out.append(f" {sign} {body}")
        return "".join(out)

    __repr__ = __str__


def _embed_coeffs(v: CycNum, m: int) -> tuple[Fraction, ...]:
    if m == v.order:
        return v.coeffs
    step = m // v.order
    out = [_F0] * ((len(v.coeffs) - 1) * step + 1 if v.coeffs else 1)
    for k, c in enumerate(v.coeffs):
        if c:
            out[k * step] += c
    return _reduce_mod_cyclotomic(out, m)


def embed(v: CycNum, m: int) -> CycNum:
    """Rewrite v in Q(zeta_m); the stored order of v must divide m."""
    if m < 1:
        raise ValueError("order must be a positive integer")
    if m % v.order != 0:
        raise ValueError(f"order {v.order} does not divide {m}")
    if m > MAX_ORDER:
        raise OrderCapError(f"cyclotomic order {m} exceeds cap {MAX_ORDER}")
    return CycNum(m, _embed_coeffs(v, m), _reduced=True)


def root_of_unity(n: int, k: int) -> CycNum:
    """zeta_n^k as a CycNum (stored at order n, canonicalized lazily)."""
    if n < 1:
        raise ValueError("order must be a positive integer")
    if n > MAX_ORDER:
        raise OrderCapError(f"cyclotomic order {n} exceeds cap {MAX_ORDER}")
    e = k % n
    vec = [_F0] * (e + 1)
    vec[e] = _F1
    return CycNum(n, vec)
