"""Numeric Puiseux expansion of Legendre transforms.

Everything here works with truncated power series in an auxiliary variable
``s``, represented as plain lists of complex coefficients (index = exponent).
The driver solves the stationary-phase equation q'(z) = xi by a Newton
iteration on the substitution t = s*v, where t is the local parameter of the
source factor and s is a root of the local parameter at the image point.
This is deliberately independent of the exact cyclotomic layer: inputs are
integer exponent numerators plus complex coefficients, outputs are
(Fraction exponent, complex coefficient) pairs.
"""

from __future__ import annotations

import cmath
from fractions import Fraction


# ---------------------------------------------------------------------------
# truncated series helpers


def _trim(a: list[complex], k: int) -> list[complex]:
    out = list(a[:k])
    out.extend([0j] * (k - len(out)))
    return out


def _mul(a: list[complex], b: list[complex], k: int) -> list[complex]:
    out = [0j] * k
    for i, ai in enumerate(a):
        if i >= k or ai == 0:
            continue
        top = min(k - i, len(b))
        for j in range(top):
            bj = b[j]
            if bj != 0:
                out[i + j] += ai * bj
    return out


def _inv(a: list[complex], k: int) -> list[complex]:
    if a[0] == 0:
        raise ZeroDivisionError("series has no constant term")
    out = [1 / a[0]] + [0j] * (k - 1)
    for i in range(1, k):
        acc = 0j
        for j in range(1, min(i, len(a) - 1) + 1):
            acc += a[j] * out[i - j]
        out[i] = -acc / a[0]
    return out


def _ipow(a: list[complex], n: int, k: int) -> list[complex]:
    if n < 0:
        return _ipow(_inv(a, k), -n, k)
    out = [1 + 0j] + [0j] * (k - 1)
    base = _trim(a, k)
    while n:
        if n & 1:
            out = _mul(out, base, k)
        base = _mul(base, base, k)
        n >>= 1
    return out


def _principal_root(w: complex, n: int) -> complex:
    return cmath.exp(cmath.log(w) / n)


# ---------------------------------------------------------------------------
# Newton solve of the stationary-phase equation


def _newton(terms: list[tuple[int, int, complex]], const: complex,
            v0: complex, k: int) -> list[complex]:
    """Root of G(v) = const + sum w * s^sp * v^vp in C[[s]]/(s^k), v(0) = v0."""
    v = [v0] + [0j] * (k - 1)
    top = max(vp for _, vp, _ in terms)
    for _ in range(max(k.bit_length() + 2, 4)):
        pows = [[1 + 0j] + [0j] * (k - 1)]
        for _ in range(top):
            pows.append(_mul(pows[-1], v, k))
        g = [const] + [0j] * (k - 1)
        dg = [0j] * k
        for sp, vp, w in terms:
            if sp >= k:
                continue
            for j, c in enumerate(pows[vp]):
                if sp + j < k and c != 0:
                    g[sp + j] += w * c
            if vp:
                for j, c in enumerate(pows[vp - 1]):
                    if sp + j < k and c != 0:
                        dg[sp + j] += w * vp * c
        delta = _mul(g, _inv(dg, k), k)
        if all(abs(d) < 1e-14 * (1 + abs(vi)) for d, vi in zip(delta, v)):
            break
        v = [vi - d for vi, d in zip(v, delta)]
    return v


def legendre_numeric(mode: str, alphas: list[int], beta: int,
                     coeffs: list[complex], extra: int = 6,
                     drop_tol: float = 1e-11) -> list[tuple[Fraction, complex]]:
    """Principal part of the Legendre transform of one exponential factor.

    ``alphas`` are the positive exponent numerators of the factor over the
    common denominator ``beta``, strictly descending, with matching complex
    ``coeffs``.  Three regimes:

    * ``"inf"``     factor at infinity with slope > 1; image stays at infinity
                    with ramification alphas[0] - beta.
    * ``"finite"``  factor at a finite point; image lives at infinity with
                    ramification alphas[0] + beta.  The linear image term
                    contributed by the point itself is NOT included here.
    * ``"residual"`` sub-linear residual of a factor at infinity whose linear
                    term has been stripped; image lives at a finite point with
                    ramification beta - alphas[0].

    Returns (exponent, coefficient) pairs in the image local parameter,
    exponents descending, everything below drop_tol (relative to the largest
    principal coefficient) removed.
    """
    if not alphas:
        return []
    if sorted(alphas, reverse=True) != list(alphas) or len(set(alphas)) != len(alphas):
        raise ValueError("exponent numerators must be strictly descending")
    if len(alphas) != len(coeffs):
        raise ValueError("exponent/coefficient length mismatch")
    alpha = alphas[0]

    if mode == "inf":
        if alpha <= beta:
            raise ValueError("factor at infinity must have slope > 1")
        e0 = alpha - beta
        weights = [b * a / beta for a, b in zip(alphas, coeffs)]
        # G(v) = v^e0 - sum_j w_j s^(e0-e_j) v^(e0-e_j), e_j = alpha_j - beta
        terms = [(0, e0, 1 + 0j)]
        for a, w in zip(alphas, weights):
            terms.append((e0 - (a - beta), e0 - (a - beta), -w))
        v0 = _principal_root(weights[0], e0)
        xi_pow = -beta
    elif mode == "finite":
        e0 = alpha + beta
        weights = [-b * a / beta for a, b in zip(alphas, coeffs)]
        terms = [(0, e0, 1 + 0j)]
        for a, w in zip(alphas, weights):
            terms.append((e0 - (a + beta), e0 - (a + beta), -w))
        v0 = _principal_root(weights[0], e0)
        xi_pow = beta
    elif mode == "residual":
        if alpha >= beta:
            raise ValueError("residual part must have slope < 1")
        e0 = beta - alpha
        weights = [b * a / beta for a, b in zip(alphas, coeffs)]
        # G(v) = sum_j w_j s^(e_j-e0) v^e_j - 1, e_j = beta - alpha_j
        terms = [(beta - a - e0, beta - a, w) for a, w in zip(alphas, weights)]
        v0 = _principal_root(1 / weights[0], e0)
        xi_pow = -beta
    else:
        raise ValueError(f"unknown mode {mode!r}")

    k = alpha + max(extra, 2)
    v = _newton(terms, -1 + 0j if mode == "residual" else 0j, v0, k)

    # q-tilde = sum_j b_j s^(-alpha_j) v^(-alpha_j) - s^(-alpha) v^(xi_pow)
    collected: dict[int, complex] = {}

    def _accumulate(depth: int, series: list[complex]) -> None:
        for j, c in enumerate(series):
            gp = depth - j
            if gp > 0 and c != 0:
                collected[gp] = collected.get(gp, 0j) + c

    for a, b in zip(alphas, coeffs):
        _accumulate(a, [b * c for c in _ipow(v, -a, k)])
    _accumulate(alpha, [-c for c in _ipow(v, xi_pow, k)])

    if not collected:
        return []
    scale = max(abs(c) for c in collected.values())
    out = [(Fraction(gp, e0), c) for gp, c in sorted(collected.items(), reverse=True)
           if abs(c) > drop_tol * max(scale, 1.0)]
    return out


def semigroup_gaps(alphas: list[int]) -> set[int]:
    """All sums of (alphas[0] - alpha_j) that stay below alphas[0].

    These are the only pole-order drops that can occur in the image of a
    factor with the given exponent numerators; the image exponent support is
    {(alpha - g) / e0 : g in gaps} for the relevant image ramification e0.
    """
    alpha = alphas[0]
    gens = sorted({alpha - a for a in alphas[1:] if alpha - a > 0})
    reach = [False] * alpha
    reach[0] = True
    for g in gens:
        for i in range(alpha - g):
            if reach[i]:
                reach[i + g] = True
    return {i for i, ok in enumerate(reach) if ok}
