"""Jordan-type conjugacy classes, markings and legs, and global formal data.

A JordanClass records the conjugacy class of an invertible matrix by its
eigenvalues and Jordan block sizes.  Classes attach to circles through
LocalEntry; a FormalData maps points of P^1 to entry lists.  The "modified"
variant replaces each tame entry at a finite point by the child class of its
monodromy (the invariant that survives one Fourier round trip), and
modify/unmodify convert between the two presentations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cyclo import CycNum
from .expalg import Circle, PointP1, normalize

__all__ = [
    "JordanClass",
    "Marking",
    "Leg",
    "LocalEntry",
    "FormalData",
    "ModifiedFormalData",
    "class_rank_minus",
    "class_dim",
    "child_class",
    "parent_class",
    "default_marking",
    "leg_of",
    "modify",
    "unmodify",
    "rank_of",
    "compatible",
]

_ONE = CycNum.rational(1)


@dataclass(frozen=True)
class JordanClass:
    """Conjugacy class in GL_n: pairwise distinct nonzero eigenvalues, each
    with a multiset of Jordan block sizes.  Entries are stored sorted by the
    canonical eigenvalue order so equal classes compare equal."""

    entries: tuple[tuple[CycNum, tuple[int, ...]], ...]

    def __post_init__(self):
        seen = set()
        for eig, sizes in self.entries:
            if eig.is_zero():
                raise ValueError("eigenvalues must be nonzero (class lies in GL)")
            key = eig.sort_key()
            if key in seen:
                raise ValueError(f"duplicate eigenvalue {eig}")
            seen.add(key)
            if not sizes:
                raise ValueError("empty block list; drop the eigenvalue instead")
            if any(s < 1 for s in sizes):
                raise ValueError("block sizes must be positive")

    @staticmethod
    def of(spec) -> "JordanClass":
        """Build from {eigenvalue: [sizes]} or an iterable of pairs."""
        items = spec.items() if hasattr(spec, "items") else spec
        entries = []
        for eig, sizes in items:
            e = eig if isinstance(eig, CycNum) else CycNum.rational(eig)
            entries.append((e, tuple(sorted(sizes, reverse=True))))
        entries.sort(key=lambda p: p[0].sort_key())
        return JordanClass(tuple(entries))

    @staticmethod
    def identity(n: int) -> "JordanClass":
        return JordanClass.of({1: [1] * n}) if n else JordanClass(())

    @property
    def n(self) -> int:
        return sum(sum(sizes) for _, sizes in self.entries)

    def sizes_for(self, eig: CycNum) -> tuple[int, ...]:
        for e, sizes in self.entries:
            if e == eig:
                return sizes
        return ()

    def scale_eigenvalues(self, factor: CycNum) -> "JordanClass":
        return JordanClass.of([(e * factor, sizes) for e, sizes in self.entries])

    def __str__(self) -> str:
        if not self.entries:
            return "{}"
        inner = ", ".join(
            f"{e}:[{','.join(map(str, sizes))}]" for e, sizes in self.entries
        )
        return "{" + inner + "}"

    __repr__ = __str__


@dataclass(frozen=True)
class Marking:
    """Eigenvalues of a class listed with max-block-size repetitions."""

    values: tuple[CycNum, ...]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Leg:
    """Dimension vector of a leg chain (unit edges), plus its marking labels."""

    dims: tuple[int, ...]
    labels: tuple[CycNum, ...]


def class_rank_minus(c: JordanClass, xi) -> int:
    """rank(A - xi) for A in the class: each block loses 1 iff its eigenvalue is xi."""
    xi = xi if isinstance(xi, CycNum) else CycNum.rational(xi)
    total = 0
    for eig, sizes in c.entries:
        if eig == xi:
            total += sum(sizes) - len(sizes)
        else:
            total += sum(sizes)
    return total


def class_dim(c: JordanClass) -> int:
    """Orbit dimension n^2 - dim of the centralizer."""
    n = c.n
    cent = 0
    for _, sizes in c.entries:
        cent += sum(min(si, sj) for si in sizes for sj in sizes)
    return n * n - cent


def child_class(c: JordanClass) -> tuple[int, JordanClass]:
    """(rank(A-1), class of 1 + UV) where A - 1 = VU is a rank factorization.

    Concretely every eigenvalue-1 Jordan block shrinks by one (empty blocks
    dropped) and all other blocks survive unchanged.
    """
    m = class_rank_minus(c, _ONE)
    entries = []
    for eig, sizes in c.entries:
        if eig == _ONE:
            kept = tuple(s - 1 for s in sizes if s > 1)
            if kept:
                entries.append((eig, kept))
        else:
            entries.append((eig, sizes))
    return m, JordanClass(tuple(entries))


def parent_class(child: JordanClass, n: int) -> JordanClass:
    """Inverse of child_class given the parent size n."""
    m = child.n
    p = n - m
    ones = child.sizes_for(_ONE)
    q = len(ones)
    if p < q:
        raise ValueError(f"rank {n} too small: needs at least {m + q}")
    entries = []
    placed = False
    for eig, sizes in child.entries:
        if eig == _ONE:
            grown = tuple(s + 1 for s in sizes) + (1,) * (p - q)
            entries.append((eig, tuple(sorted(grown, reverse=True))))
            placed = True
        else:
            entries.append((eig, sizes))
    if not placed and p > 0:
        entries.append((_ONE, (1,) * p))
    entries.sort(key=lambda pair: pair[0].sort_key())
    return JordanClass(tuple(entries))


def default_marking(c: JordanClass, special: bool = True) -> Marking:
    """Each eigenvalue repeated (max block size) times, in canonical order;
    a special marking lists eigenvalue 1 first when present."""
    items = sorted(c.entries, key=lambda pair: pair[0].sort_key())
    if special:
        items.sort(key=lambda pair: 0 if pair[0] == _ONE else 1)
    values: list[CycNum] = []
    for eig, sizes in items:
        values.extend([eig] * max(sizes))
    return Marking(tuple(values))


def leg_of(c: JordanClass, marking: Marking) -> Leg:
    """Leg dimension vector d_j = rank((A - xi_1)...(A - xi_j)), j < w."""
    for eig, sizes in c.entries:
        count = sum(1 for v in marking.values if v == eig)
        if count != max(sizes):
            raise ValueError(
                f"marking lists {eig} {count} times, expected {max(sizes)}"
            )
    if len(marking.values) != sum(max(sizes) for _, sizes in c.entries):
        raise ValueError("marking has foreign eigenvalues")
    dims = []
    w = len(marking.values)
    for j in range(1, w):
        head = marking.values[:j]
        d = 0
        for eig, sizes in c.entries:
            hits = sum(1 for v in head if v == eig)
            d += sum(max(s - hits, 0) for s in sizes)
        dims.append(d)
    while dims and dims[-1] == 0:
        dims.pop()
    return Leg(tuple(dims), marking.values)


@dataclass(frozen=True)
class LocalEntry:
    """One circle with its multiplicity and monodromy conjugacy class."""

    circle: Circle
    mult: int
    mon: JordanClass

    def __post_init__(self):
        if self.mult < 0:
            raise ValueError("multiplicity must be nonnegative")
        if self.mon.n != self.mult:
            raise ValueError(
                f"class size {self.mon.n} does not match multiplicity {self.mult}"
            )

    @property
    def is_tame(self) -> bool:
        return self.circle.is_tame


class _PointMap:
    """Shared shape of FormalData and ModifiedFormalData."""

    __slots__ = ("points",)

    def __init__(self, points):
        items = []
        seen_points = []
        for point, entries in points:
            if any(point == p for p in seen_points):
                raise ValueError(f"duplicate point {point}")
            seen_points.append(point)
            entries = tuple(entries)
            tame_count = 0
            reps = []
            for e in entries:
                if e.circle.point != point:
                    raise ValueError(
                        f"entry circle at {e.circle.point} filed under {point}"
                    )
                if e.is_tame:
                    tame_count += 1
                if any(e.circle == r for r in reps):
                    raise ValueError(f"duplicate circle {e.circle} at {point}")
                reps.append(e.circle)
            if tame_count > 1:
                raise ValueError(f"more than one tame entry at {point}")
            items.append((point, entries))
        self.points = tuple(items)

    def entries_at(self, point: PointP1) -> tuple[LocalEntry, ...]:
        for p, entries in self.points:
            if p == point:
                return entries
        return ()

    def infinity_entries(self) -> tuple[LocalEntry, ...]:
        return self.entries_at(PointP1.infinity())

    def finite_items(self):
        return [(p, es) for p, es in self.points if not p.is_infinity]

    def all_entries(self):
        return [(p, e) for p, es in self.points for e in es]

    def __eq__(self, other):
        return type(self) is type(other) and self.points == other.points

    def __hash__(self):
        return hash((type(self).__name__, self.points))

    def __repr__(self):
        chunks = []
        for p, es in self.points:
            inner = "; ".join(f"{e.mult}<{e.circle}>" for e in es)
            chunks.append(f"at {p}: {inner}")
        return f"{type(self).__name__}({' | '.join(chunks)})"


class FormalData(_PointMap):
    """Formal data: every tame entry carries its raw monodromy class."""


class ModifiedFormalData(_PointMap):
    """Formal data whose finite tame entries hold (m, child class)."""


def modify(fd: FormalData) -> ModifiedFormalData:
    """Replace each finite tame entry by its child; drop it when m = 0."""
    out = []
    for point, entries in fd.points:
        if point.is_infinity:
            out.append((point, entries))
            continue
        new_entries = []
        for e in entries:
            if e.is_tame:
                m, child = child_class(e.mon)
                if m == 0:
                    continue
                new_entries.append(LocalEntry(e.circle, m, child))
            else:
                new_entries.append(e)
        if new_entries:
            out.append((point, tuple(new_entries)))
    return ModifiedFormalData(out)


def unmodify(mfd: ModifiedFormalData, rank_at_infinity: int) -> FormalData:
    """Reconstruct formal data: the tame multiplicity at each finite point is
    the rank minus the irregular contribution there."""
    out = []
    for point, entries in mfd.points:
        if point.is_infinity:
            out.append((point, entries))
            continue
        irregular = sum(e.mult * e.circle.ram for e in entries if not e.is_tame)
        n_tame = rank_at_infinity - irregular
        if n_tame < 0:
            raise ValueError(
                f"rank {rank_at_infinity} below irregular contribution {irregular} at {point}"
            )
        new_entries = []
        restored = False
        for e in entries:
            if e.is_tame:
                new_entries.append(
                    LocalEntry(e.circle, n_tame, parent_class(e.mon, n_tame))
                )
                restored = True
            else:
                new_entries.append(e)
        if not restored and n_tame > 0:
            tame_circle = Circle(normalize(point, ()))
            new_entries.append(
                LocalEntry(tame_circle, n_tame, JordanClass.identity(n_tame))
            )
        out.append((point, tuple(new_entries)))
    return FormalData(out)


def rank_of(data: _PointMap) -> int:
    """Rank of the data: sum of mult * ram over the entries at infinity."""
    return sum(e.mult * e.circle.ram for e in data.infinity_entries())


def compatible(mfd: ModifiedFormalData) -> bool:
    """True iff every finite point's modified rank is at most the rank at infinity."""
    rank = rank_of(mfd)
    for point, entries in mfd.finite_items():
        if sum(e.mult * e.circle.ram for e in entries) > rank:
            return False
    return True
