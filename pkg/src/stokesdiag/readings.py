"""Readings of formal data placed at infinity.

Data normalized at infinity can be presented in finitely many shapes by
rotating it with SL(2): one generic shape where nothing drops down from
infinity, and one shape per value lam of the z^2 coefficient, where exactly
the circles of the form lam z^2 + mu z + (slope < 1) land at finite points.
partition_nodes groups the circles accordingly; enumerate_readings picks a
witness matrix for every shape and reports, node by node, the target point
and the invariants of the transported circle.

The reports are summaries, not transported data: scalings and Fourier
letters can push coefficients outside the cyclotomic field, so instead of
rebuilding circles the walk tracks the few quantities that transform
exactly (the sphere coordinate, the linear coefficient, ramification and
the leading exponent).  The rank attached to a reading counts what
fourier_rank counts on the stage just before the Fourier letter: the sum of
mult * ram over the nodes left at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .cyclo import CycNum
from .expalg import INF, Circle, PointP1
from .formal import ModifiedFormalData
from .sl2 import (
    CircleSkeleton,
    SL2Matrix,
    factor_sl2,
    slope2_coefficient,
)

__all__ = [
    "NodePartition",
    "ReadingNode",
    "Reading",
    "partition_nodes",
    "enumerate_readings",
    "readings_json",
]

_ZERO = CycNum.rational(0)
_ONE = CycNum.rational(1)
_TWO = CycNum.rational(2)

# Sub-dominant z^2 coefficient whose exact value got lost to a numeric
# Legendre stage.  Only allowed while 2*beta < alpha, where it can affect
# neither the leading exponent nor any later branching.
_UNKNOWN = object()


def _coeff_at(q, numerator: int) -> CycNum:
    for a, b in q.monomials:
        if a == numerator:
            return b
    return _ZERO


@dataclass(frozen=True)
class _Profile:
    """What a witness walk needs to know about one circle at infinity.

    Sphere form (kind "sphere"): the factor is lam z^2 + mu z + residual
    with residual slope < 1; beta is the ramification, alpha the residual
    irregularity, lam_s the sphere coordinate (-2 lam) and mu the linear
    coefficient, None when it is numeric (then it is known to be nonzero).

    Steep (kind "steep"): the part beyond z^2 has slope > 1; alpha is its
    top numerator over beta and lam_s the sphere coordinate, _UNKNOWN for
    a numeric sub-dominant z^2 term.
    """

    kind: str
    beta: int
    alpha: int
    lam_s: object
    mu: CycNum | None = None


def _profile(circle) -> _Profile:
    if isinstance(circle, Circle):
        q = circle.representative
        if not q.point.is_infinity:
            raise ValueError("readings expect circles at infinity")
        rest = [a for a, _ in q.monomials if a != 2 * q.ram]
        if rest and Fraction(rest[0], q.ram) > 1:
            lam_s = slope2_coefficient(circle).value
            return _Profile("steep", q.ram, rest[0], lam_s)
        lam_s = slope2_coefficient(circle).value
        mu = _coeff_at(q, q.ram)
        sub = [a for a, _ in q.monomials if a < q.ram]
        return _Profile("sphere", q.ram, sub[0] if sub else 0, lam_s, mu)
    if isinstance(circle, CircleSkeleton):
        sk = circle
        if not sk.point.is_infinity:
            raise ValueError("readings expect circles at infinity")
        rest = [e for e in sk.support if e != 2]
        top = max(rest, default=Fraction(0))
        if top > 1:
            alpha = top * sk.ram
            if alpha.denominator != 1:
                raise ValueError(f"support of {sk} is not over its ramification")
            alpha = int(alpha)
            if Fraction(2) in sk.support and sk.sphere_exact is None:
                if 2 * sk.ram > alpha:
                    raise ValueError(
                        f"the z^2 coefficient of {sk} leads but is not exact"
                    )
                return _Profile("steep", sk.ram, alpha, _UNKNOWN)
            lam_s = sk.sphere_exact if sk.sphere_exact is not None else _ZERO
            return _Profile("steep", sk.ram, alpha, lam_s)
        # slope <= 1 at infinity: support excludes the linear term and irr
        # already means the sub-linear irregularity.
        lam_s = slope2_coefficient(sk).value
        return _Profile("sphere", sk.ram, sk.irr, lam_s, sk.linear_exact)
    raise TypeError(f"cannot read {type(circle).__name__}")


def _flat_profiles(mfd: ModifiedFormalData) -> list[tuple[str, int, _Profile]]:
    if any(not p.is_infinity for p, _ in mfd.points):
        raise ValueError("data must be normalized to infinity first")
    out = []
    i = 0
    for _, entries in mfd.points:
        for e in entries:
            out.append((f"c{i}", e.mult, _profile(e.circle)))
            i += 1
    return out


# ---------------------------------------------------------------------------
# partition by the z^2 coefficient


@dataclass(frozen=True)
class NodePartition:
    """Nodes at infinity grouped by their q = lam z^2 + mu z + ... shape.

    lambda_groups maps lam (the plain z^2 coefficient) to a map from mu to
    the node ids carrying that pair; n_infinity lists the nodes whose part
    beyond z^2 has slope > 1, which no SL(2) element brings down.
    """

    n_infinity: tuple[str, ...]
    lambda_groups: dict[CycNum, dict[CycNum, tuple[str, ...]]] = field(
        default_factory=dict
    )


def partition_nodes(mfd: ModifiedFormalData) -> NodePartition:
    steep: list[str] = []
    groups: dict[CycNum, dict[CycNum, tuple[str, ...]]] = {}
    for nid, _, prof in _flat_profiles(mfd):
        if prof.kind == "steep":
            steep.append(nid)
            continue
        lam = -prof.lam_s / _TWO
        if prof.mu is None:
            raise ValueError(f"linear coefficient of {nid} is not exactly known")
        sub = groups.setdefault(lam, {})
        sub[prof.mu] = sub.get(prof.mu, ()) + (nid,)
    return NodePartition(tuple(steep), groups)


# ---------------------------------------------------------------------------
# walking one circle through the elementary letters of a witness


def _sphere_walk(prof: _Profile, ops) -> tuple:
    """Exact transport of (sphere coordinate, linear coefficient).

    Returns ("fin", point value) or ("inf", lam_s, mu) after all letters.
    Mirrors the state machine of sends_to_finite, keeping mu through the
    non-landing branches; mu = None stays None and stays nonzero.
    """
    state = ("inf", prof.lam_s, prof.mu)
    for op in ops:
        if state[0] == "inf":
            _, lam, mu = state
            if op.kind == "twist":
                state = ("inf", lam + op.param, mu)
            elif op.kind == "scaling":
                nu = op.param
                state = ("inf", lam / (nu * nu), None if mu is None else mu / nu)
            elif lam.is_zero():
                if mu is None:
                    raise ValueError("landing point is not exactly known")
                state = ("fin", -mu)
            else:
                state = ("inf", -lam.inverse(), None if mu is None else -mu / lam)
        else:
            _, a = state
            if op.kind == "scaling":
                state = ("fin", a * op.param)
            elif op.kind == "fourier":
                state = ("inf", _ZERO, -a)
    return state


def _steep_walk(prof: _Profile, ops) -> tuple[int, int]:
    """(ram, irr) of a steep circle after the letters of a witness.

    The sphere coordinate moves by exact twist/scaling arithmetic and, when
    the z^2 term leads the phase, by the half-turn lam -> -1/lam; a numeric
    z^2 term can only ever appear strictly below the top, where it decides
    nothing, so the walk stays exact in every reachable state.
    """
    beta, alpha, lam = prof.beta, prof.alpha, prof.lam_s
    for op in ops:
        if op.kind == "twist":
            if lam is not _UNKNOWN:
                lam = lam + op.param
        elif op.kind == "scaling":
            if lam is not _UNKNOWN:
                nu = op.param
                lam = lam / (nu * nu)
        else:
            head = lam is not _UNKNOWN and not lam.is_zero()
            if head and 2 * beta > alpha:
                # z^2 leads: ramification and the sub-head top both survive
                lam = -lam.inverse()
            else:
                beta = alpha - beta
                lam = _ZERO if 2 * beta > alpha else _UNKNOWN
    head = lam is not _UNKNOWN and not lam.is_zero()
    return beta, max(alpha, 2 * beta) if head else alpha


@dataclass(frozen=True)
class ReadingNode:
    id: str
    point: PointP1
    ram: int
    slope: Fraction
    irr: int
    mult: int


@dataclass(frozen=True)
class Reading:
    """One presentation of the data: a witness matrix and where it puts
    every node.  lam is the z^2 coefficient whose group drops to finite
    points, None for the generic reading."""

    witness: SL2Matrix
    generic: bool
    lam: CycNum | None
    nodes: tuple[ReadingNode, ...]
    rank: int


def _read_node(nid: str, mult: int, prof: _Profile, ops) -> ReadingNode:
    if prof.kind == "steep":
        beta, top = _steep_walk(prof, ops)
        return ReadingNode(nid, INF, beta, Fraction(top, beta), top, mult)
    state = _sphere_walk(prof, ops)
    beta, alpha = prof.beta, prof.alpha
    if state[0] == "fin":
        return ReadingNode(
            nid, PointP1.finite(state[1]), beta - alpha,
            Fraction(alpha, beta - alpha), alpha, mult,
        )
    _, lam, mu = state
    if not lam.is_zero():
        return ReadingNode(nid, INF, beta, Fraction(2), 2 * beta, mult)
    if mu is None or not mu.is_zero():
        return ReadingNode(nid, INF, beta, Fraction(1), beta, mult)
    return ReadingNode(nid, INF, beta, Fraction(alpha, beta), alpha, mult)


def _reading(flat, mat: SL2Matrix, generic: bool, lam: CycNum | None) -> Reading:
    ops = list(reversed(factor_sl2(mat)))
    nodes = tuple(_read_node(nid, m, prof, ops) for nid, m, prof in flat)
    stayed = [n for n in nodes if n.point.is_infinity]
    # every landed node carries its full local data, so when nothing is
    # left upstairs the finite points still add up to the rank
    counted = stayed if stayed else nodes
    return Reading(mat, generic, lam, nodes, sum(n.mult * n.ram for n in counted))


def _landed_ids(flat, mat: SL2Matrix) -> set[str]:
    ops = list(reversed(factor_sl2(mat)))
    out = set()
    for nid, _, prof in flat:
        if prof.kind == "sphere" and _sphere_walk(prof, ops)[0] == "fin":
            out.add(nid)
    return out


def enumerate_readings(mfd: ModifiedFormalData) -> tuple[Reading, ...]:
    """The generic reading plus one reading per z^2 coefficient group.

    The generic witness is F T_t for the first t >= 0 keeping every group
    at infinity; the group witness for internal coordinate lam' is
    [[1, -lam'-1], [1, -lam']], replaced by a searched one in the unlikely
    case it does not land exactly its own group.
    """
    flat = _flat_profiles(mfd)
    part = partition_nodes(mfd)
    internal = {lam: -_TWO * lam for lam in part.lambda_groups}

    t = 0
    while any(v == CycNum.rational(-t) for v in internal.values()):
        t += 1
    generic = SL2Matrix.fourier() * SL2Matrix.twist(t)
    readings = [_reading(flat, generic, True, None)]

    for lam, sub in part.lambda_groups.items():
        group_ids = {nid for ids in sub.values() for nid in ids}
        lam_i = internal[lam]
        mat = SL2Matrix(_ONE, -lam_i - _ONE, _ONE, -lam_i)
        k = 1
        while _landed_ids(flat, mat) != group_ids:
            # search the det-1 family keeping d/c = -lam', which is what
            # decides who lands
            k += 1
            if k > 32:
                raise ArithmeticError(f"no witness found for the group of {lam}")
            kk = CycNum.rational(k)
            mat = SL2Matrix(_ONE, -lam_i - kk.inverse(), kk, -kk * lam_i)
        readings.append(_reading(flat, mat, False, lam))
    return tuple(readings)


def readings_json(readings) -> dict:
    return {
        "readings": [
            {
                "witness": [str(r.witness.a), str(r.witness.b),
                            str(r.witness.c), str(r.witness.d)],
                "generic": r.generic,
                "nodes": [
                    {
                        "id": n.id,
                        "point": str(n.point),
                        "ram": n.ram,
                        "slope": str(n.slope),
                        "irr": n.irr,
                        "mult": n.mult,
                    }
                    for n in r.nodes
                ],
                "rank": r.rank,
            }
            for r in readings
        ]
    }
