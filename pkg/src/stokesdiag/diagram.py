"""Diagram synthesis from modified formal data.

One core node per local entry, edge multiplicities from the direct four-case
formula, legs glued per node from its conjugacy class, and the dimension of
the associated space read off the Cartan form.  Edge counts between exact
circles go through the brute-force Stokes count; pairs involving numeric
skeletons (post-Fourier data) use the gcd closed form, with common parts
detected on the numeric coefficients.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .expalg import Circle, irr_hom_bruteforce
from .formal import ModifiedFormalData, default_marking, leg_of
from .sl2 import CircleSkeleton

__all__ = [
    "CartanMatrix",
    "Diagram",
    "DiagramNode",
    "b_general",
    "b_infinity",
    "cartan",
    "check_even_loops",
    "core_diagram",
    "dimension",
    "export_dot",
    "export_json",
    "full_diagram",
]

COMMON_PART_TOL = 1e-8


# ---------------------------------------------------------------------------
# edge multiplicities


@dataclass(frozen=True)
class _NumView:
    """A circle reduced to what the gcd edge formula consumes: ramification,
    descending exponent numerators, and (when known) the complex coefficients
    of one member of the circle."""

    ram: int
    nums: tuple[int, ...]
    coeffs: tuple[complex, ...] | None

    def exponent(self, k: int) -> Fraction:
        return Fraction(self.nums[k], self.ram)


def _view_of(c) -> _NumView:
    if isinstance(c, Circle):
        rep = c.representative
        nums = tuple(a for a, _ in rep.monomials)
        return _NumView(c.ram, nums, tuple(b.to_complex() for _, b in rep.monomials))
    if isinstance(c, CircleSkeleton):
        # exact quadratic and linear annotations live outside the coefficient
        # list on skeletons of slope <= 1; fold them back in
        extra: list[tuple[int, complex]] = []
        if c.sphere_exact is not None and not c.sphere_exact.is_zero():
            extra.append((2 * c.ram, -c.sphere_exact.to_complex() / 2))
        if c.linear_exact is not None and not c.linear_exact.is_zero():
            extra.append((c.ram, c.linear_exact.to_complex()))
        if c.coeffs is not None:
            pairs = extra + [(int(e * c.ram), v) for e, v in c.coeffs]
            pairs.sort(key=lambda p: p[0], reverse=True)
            return _NumView(
                c.ram, tuple(a for a, _ in pairs), tuple(v for _, v in pairs)
            )
        if extra:
            raise ValueError(
                "skeleton has exact annotations but no coefficient list; "
                "its monomial view would be incomplete"
            )
        nums = tuple(sorted((int(e * c.ram) for e in c.support), reverse=True))
        return _NumView(c.ram, nums, None)
    raise TypeError(f"cannot take edge counts of {type(c).__name__}")


def _close(x: complex, y: complex, tol: float) -> bool:
    return abs(x - y) <= tol * max(abs(x), abs(y), 1.0)


def _aligned(v1: _NumView, v2: _NumView, length: int, tol: float) -> bool:
    """Whether some conjugate of v2 matches v1 on the first `length` monomials."""
    if v1.coeffs is None or v2.coeffs is None:
        raise ValueError(
            "common-part detection needs numeric coefficients on both circles"
        )
    for j in range(v2.ram):
        for k in range(length):
            rot = cmath.exp(-2j * cmath.pi * j * v2.nums[k] / v2.ram)
            if not _close(v1.coeffs[k], v2.coeffs[k] * rot, tol):
                break
        else:
            return True
    return False


def _common_length(v1: _NumView, v2: _NumView, tol: float) -> int:
    r = 0
    for k in range(min(len(v1.nums), len(v2.nums))):
        if v1.exponent(k) != v2.exponent(k):
            break
        if not _aligned(v1, v2, k + 1, tol):
            break
        r = k + 1
    return r


def _same_circle(c1, c2, tol: float = COMMON_PART_TOL) -> bool:
    if c1 is c2:
        return True
    if isinstance(c1, Circle) and isinstance(c2, Circle):
        return c1 == c2
    if c1.point != c2.point:
        return False
    v1, v2 = _view_of(c1), _view_of(c2)
    if v1.ram != v2.ram or v1.nums != v2.nums:
        return False
    if not v1.nums:
        return True
    return _aligned(v1, v2, len(v1.nums), tol)


def _loop_gcd(v: _NumView) -> int:
    g = v.ram
    total = 0
    for a in v.nums:
        ng = gcd(g, a)
        total += (g - ng) * a
        g = ng
    return total - v.ram * v.ram + 1


def _distinct_gcd(v1: _NumView, v2: _NumView, tol: float) -> int:
    r = 0
    if v1.nums and v2.nums and v1.exponent(0) == v2.exponent(0):
        r = _common_length(v1, v2, tol)
    q, qp = v1, v2
    slope_q = q.exponent(r) if len(q.nums) > r else Fraction(0)
    slope_p = qp.exponent(r) if len(qp.nums) > r else Fraction(0)
    if slope_q < slope_p:
        q, qp = qp, q
    if len(q.nums) <= r:
        raise AssertionError("distinct circles need a different part on the steep side")
    g = qp.ram
    total = 0
    for i in range(r):
        ng = gcd(g, qp.nums[i])
        total += (g - ng) * q.nums[i]
        g = ng
    total += g * q.nums[r]
    return total - q.ram * qp.ram


def b_infinity(c1, c2) -> int:
    """Unoriented Stokes arrow count between two circles at one point.

    Exact circles go through the brute-force irregularity sum; anything
    involving a numeric skeleton uses the gcd closed form instead, with
    common parts detected on the coefficients at COMMON_PART_TOL.
    """
    if c1.point != c2.point:
        raise ValueError("circles live at different points")
    if isinstance(c1, Circle) and isinstance(c2, Circle):
        a = irr_hom_bruteforce(c1, c2)
        if c1 == c2:
            return a - c1.ram * c1.ram + 1
        return a - c1.ram * c2.ram
    v1, v2 = _view_of(c1), _view_of(c2)
    if _same_circle(c1, c2):
        return _loop_gcd(v1)
    return _distinct_gcd(v1, v2, COMMON_PART_TOL)


def b_general(c1, c2) -> int:
    """Edge multiplicity between two circles anywhere on the line."""
    inf1, inf2 = c1.point.is_infinity, c2.point.is_infinity
    if inf1 and inf2:
        return b_infinity(c1, c2)
    if inf1 or inf2:
        at_inf, fin = (c1, c2) if inf1 else (c2, c1)
        return at_inf.ram * (fin.irr + fin.ram)
    if c1.point != c2.point:
        return 0
    if _same_circle(c1, c2):
        return b_infinity(c1, c2) - 2 * c1.irr * c1.ram
    return b_infinity(c1, c2) - c1.irr * c2.ram - c2.irr * c1.ram


# ---------------------------------------------------------------------------
# diagrams


@dataclass(frozen=True)
class DiagramNode:
    id: str
    kind: str  # "core" or "leg"
    source: object  # the circle for core nodes, the chain position for legs
    dim: int
    label: str


@dataclass(frozen=True)
class Diagram:
    nodes: tuple[DiagramNode, ...]
    B: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.nodes)
        if len(self.B) != n or any(len(row) != n for row in self.B):
            raise ValueError("B must be square over the nodes")
        for i in range(n):
            for j in range(n):
                if self.B[i][j] != self.B[j][i]:
                    raise ValueError("B must be symmetric")
        ids = [nd.id for nd in self.nodes]
        if len(set(ids)) != n:
            raise ValueError("node ids must be distinct")

    def index_of(self, node_id: str) -> int:
        for i, nd in enumerate(self.nodes):
            if nd.id == node_id:
                return i
        raise KeyError(node_id)

    def core_nodes(self) -> tuple[DiagramNode, ...]:
        return tuple(nd for nd in self.nodes if nd.kind == "core")


@dataclass(frozen=True)
class CartanMatrix:
    entries: tuple[tuple[int, ...], ...]


def _core_parts(mfd: ModifiedFormalData):
    circles = []
    mults = []
    classes = []
    for _, entries in mfd.points:
        for e in entries:
            circles.append(e.circle)
            mults.append(e.mult)
            classes.append(e.mon)
    return circles, mults, classes


def core_diagram(mfd: ModifiedFormalData) -> Diagram:
    """One node per entry, dims the modified multiplicities, edges from the
    four-case formula.  Every diagonal entry must come out even."""
    circles, mults, _ = _core_parts(mfd)
    n = len(circles)
    b = [[0] * n for _ in range(n)]
    for i in range(n):
        b[i][i] = b_general(circles[i], circles[i])
        if b[i][i] % 2 != 0:
            raise AssertionError(f"odd loop count {b[i][i]} at node {i}")
        for j in range(i + 1, n):
            b[i][j] = b[j][i] = b_general(circles[i], circles[j])
    nodes = tuple(
        DiagramNode(f"c{i}", "core", circles[i], mults[i], str(circles[i]))
        for i in range(n)
    )
    return Diagram(nodes, tuple(tuple(row) for row in b))


def full_diagram(mfd: ModifiedFormalData, marking_strategy=None) -> Diagram:
    """Core diagram plus one leg per node, from the node's conjugacy class.

    marking_strategy maps a JordanClass to the Marking used for its leg; the
    default is the canonical marking with eigenvalue one pulled to the front.
    """
    if marking_strategy is None:
        marking_strategy = lambda c: default_marking(c, special=True)  # noqa: E731
    core = core_diagram(mfd)
    _, _, classes = _core_parts(mfd)
    nodes = list(core.nodes)
    rows = [list(row) for row in core.B]

    def add_node(node: DiagramNode, attach_to: int) -> int:
        idx = len(nodes)
        nodes.append(node)
        for row in rows:
            row.append(0)
        rows.append([0] * (idx + 1))
        rows[attach_to][idx] = rows[idx][attach_to] = 1
        return idx

    for ci, mon in enumerate(classes):
        leg = leg_of(mon, marking_strategy(mon))
        prev = ci
        for pos, d in enumerate(leg.dims, start=1):
            node = DiagramNode(
                f"c{ci}.l{pos}", "leg", pos, d, f"leg {pos} of c{ci}"
            )
            prev = add_node(node, prev)
    return Diagram(tuple(nodes), tuple(tuple(row) for row in rows))


def cartan(d: Diagram) -> CartanMatrix:
    n = len(d.nodes)
    return CartanMatrix(
        tuple(
            tuple((2 if i == j else 0) - d.B[i][j] for j in range(n))
            for i in range(n)
        )
    )


def dimension(d: Diagram) -> int:
    c = cartan(d).entries
    dims = [nd.dim for nd in d.nodes]
    n = len(dims)
    quad = sum(dims[i] * c[i][j] * dims[j] for i in range(n) for j in range(n))
    return 2 - quad


def check_even_loops(d: Diagram) -> bool:
    return all(d.B[i][i] % 2 == 0 for i in range(len(d.nodes)))


# ---------------------------------------------------------------------------
# exporters


def export_dot(d: Diagram) -> str:
    lines = ["graph diagram {", "  node [shape=circle];"]
    for nd in d.nodes:
        safe = nd.id.replace(".", "_")
        lines.append(f'  {safe} [label="{nd.dim}"];')
    n = len(d.nodes)
    for i in range(n):
        loops = d.B[i][i] // 2
        if loops != 0:
            safe = d.nodes[i].id.replace(".", "_")
            style = "" if loops > 0 else ", style=dashed"
            lines.append(f'  {safe} -- {safe} [label="{abs(loops)}"{style}];')
        for j in range(i + 1, n):
            m = d.B[i][j]
            if m == 0:
                continue
            a = d.nodes[i].id.replace(".", "_")
            b = d.nodes[j].id.replace(".", "_")
            style = "" if m > 0 else ", style=dashed"
            lines.append(f'  {a} -- {b} [label="{abs(m)}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_json(d: Diagram) -> str:
    nodes = []
    for nd in d.nodes:
        if nd.kind == "core":
            point = str(nd.source.point)
            circle = str(nd.source)
        else:
            point = None
            circle = None
        nodes.append(
            {
                "id": nd.id,
                "kind": nd.kind,
                "dim": nd.dim,
                "label": nd.label,
                "point": point,
                "circle": circle,
            }
        )
    edges = []
    n = len(d.nodes)
    for i in range(n):
        if d.B[i][i] != 0:
            edges.append(
                {"a": d.nodes[i].id, "b": d.nodes[i].id, "mult": d.B[i][i] // 2}
            )
        for j in range(i + 1, n):
            if d.B[i][j] != 0:
                edges.append(
                    {"a": d.nodes[i].id, "b": d.nodes[j].id, "mult": d.B[i][j]}
                )
    payload = {
        "nodes": nodes,
        "edges": edges,
        "cartan": [list(row) for row in cartan(d).entries],
        "dim_vector": [nd.dim for nd in d.nodes],
        "mb_dimension": dimension(d),
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
