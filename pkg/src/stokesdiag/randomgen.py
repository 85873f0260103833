"""Seeded random data and the consistency suites behind the `check` command.

Everything takes an explicit seed (or an already-seeded random.Random), so
failures are reproducible from the command line with --seed.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .cyclo import CycNum, euler_phi
from .expalg import (
    INF,
    Circle,
    ExpFactor,
    PointP1,
    b_infinity_gcd,
    circle_of,
    irr_hom_bruteforce,
    normalize,
)

__all__ = [
    "random_cycnum",
    "random_expfactor",
    "random_jordan_class",
    "check_stokes_pairs",
    "check_even_loops",
    "check_class_dimensions",
    "check_class_round_trips",
]

_ORDER_POOL = (1, 1, 1, 2, 3, 4, 12)


def random_cycnum(rng: random.Random, nonzero: bool = False, span: int = 3) -> CycNum:
    while True:
        n = rng.choice(_ORDER_POOL)
        coeffs = [Fraction(rng.randint(-span, span)) for _ in range(euler_phi(n))]
        v = CycNum(n, coeffs, _reduced=True)
        if not nonzero or not v.is_zero():
            return v


def random_expfactor(
    rng: random.Random,
    point: PointP1 = INF,
    max_beta: int = 4,
    max_irr: int = 8,
    allow_tame: bool = True,
) -> ExpFactor:
    if allow_tame and rng.random() < 0.05:
        return normalize(point, ())
    beta = rng.randint(1, max_beta)
    k = rng.randint(1, 3)
    top = max(1, max_irr)
    nums = rng.sample(range(1, top + 1), min(k, top))
    pairs = [(Fraction(a, beta), random_cycnum(rng, nonzero=True)) for a in nums]
    return normalize(point, pairs)


def _eig_pool() -> list[CycNum]:
    from .cyclo import root_of_unity

    return [
        CycNum.rational(-1),
        CycNum.rational(2),
        CycNum.rational(3),
        CycNum.rational(Fraction(1, 2)),
        root_of_unity(4, 1),
        root_of_unity(4, 3),
        root_of_unity(3, 1),
        root_of_unity(12, 1),
    ]


def _random_partition(rng: random.Random, total: int) -> list[int]:
    parts = []
    while total:
        p = rng.randint(1, total)
        parts.append(p)
        total -= p
    return sorted(parts, reverse=True)


def random_jordan_class(rng: random.Random, max_n: int = 6):
    """A random class in GL_n, n in 1..max_n, at most 3 distinct eigenvalues;
    eigenvalue 1 shows up in about half the draws."""
    from .formal import JordanClass

    n = rng.randint(1, max_n)
    k = rng.randint(1, min(3, n))
    cuts = sorted(rng.sample(range(1, n), k - 1)) if k > 1 else []
    chunks = [b - a for a, b in zip([0, *cuts], [*cuts, n])]
    use_one = rng.random() < 0.5
    eigs: list[CycNum] = [CycNum.rational(1)] if use_one else []
    eigs.extend(rng.sample(_eig_pool(), k - len(eigs)))
    return JordanClass.of(
        [(e, _random_partition(rng, c)) for e, c in zip(eigs, chunks)]
    )


def _chain_form(head: int, dims) -> int:
    vec = [head, *dims]
    total = 2 * sum(d * d for d in vec)
    total -= 2 * sum(a * b for a, b in zip(vec, vec[1:]))
    return total


def check_class_dimensions(cases: int = 200, seed: int = 0) -> list[str]:
    """class_dim(c) must equal 2n^2 - (d,d) of the leg chain (n, d_1, ...)."""
    from .formal import class_dim, default_marking, leg_of

    rng = random.Random(seed)
    failures = []
    for idx in range(cases):
        c = random_jordan_class(rng)
        leg = leg_of(c, default_marking(c, special=True))
        want = 2 * c.n * c.n - _chain_form(c.n, leg.dims)
        got = class_dim(c)
        if got != want:
            failures.append(f"class case {idx}: dim {got} != leg form {want} for {c}")
    return failures


def check_class_round_trips(cases: int = 200, seed: int = 0) -> list[str]:
    """parent_class(child_class(c), n) = c, and child(parent(child, n)) round-trips."""
    from .formal import child_class, parent_class

    rng = random.Random(seed)
    failures = []
    for idx in range(cases):
        c = random_jordan_class(rng)
        m, child = child_class(c)
        back = parent_class(child, c.n)
        if back != c:
            failures.append(f"round-trip case {idx}: {back} != {c}")
        n2 = c.n + rng.randint(0, 2)
        m2, child2 = child_class(parent_class(child, n2))
        if child2 != child or m2 != child.n:
            failures.append(f"child/parent case {idx}: {child2} != {child} at n={n2}")
    return failures


def _expected_from_bruteforce(c1: Circle, c2: Circle) -> int:
    a = irr_hom_bruteforce(c1, c2)
    if c1 == c2:
        return a - c1.ram * c1.ram + 1
    return a - c1.ram * c2.ram


def check_stokes_pairs(cases: int = 500, seed: int = 0) -> list[str]:
    """Closed gcd formula vs brute-force conjugate enumeration, seeded pairs."""
    rng = random.Random(seed)
    failures = []
    for idx in range(cases):
        c1 = circle_of(random_expfactor(rng))
        # every few cases exercise the loop branch on purpose
        c2 = c1 if idx % 5 == 0 else circle_of(random_expfactor(rng))
        got = b_infinity_gcd(c1, c2)
        want = _expected_from_bruteforce(c1, c2)
        if got != want:
            failures.append(
                f"stokes case {idx}: gcd formula {got} != bruteforce {want} "
                f"for {c1} / {c2}"
            )
    return failures


def check_even_loops(cases: int = 500, seed: int = 0) -> list[str]:
    """b_infinity_gcd(c, c) must be even for every circle."""
    rng = random.Random(seed)
    failures = []
    for idx in range(cases):
        c = circle_of(random_expfactor(rng))
        got = b_infinity_gcd(c, c)
        if got % 2 != 0:
            failures.append(f"loop case {idx}: B(c,c) = {got} is odd for {c}")
    return failures


def random_steep_factor(rng: random.Random, max_beta: int = 3,
                        max_irr: int = 7) -> ExpFactor:
    """A factor at infinity with slope strictly above 1."""
    beta = rng.randint(1, max_beta)
    top = rng.randint(beta + 1, max(beta + 1, max_irr))
    nums = [top]
    for a in rng.sample(range(1, top), min(rng.randint(0, 2), top - 1)):
        nums.append(a)
    pairs = [(Fraction(a, beta), random_cycnum(rng, nonzero=True))
             for a in sorted(set(nums), reverse=True)]
    return normalize(INF, pairs)


def random_fourier_input(rng: random.Random, steep_only: bool = False):
    """Modified formal data whose Fourier transform is worth taking.

    Circles at infinity are steep (slope > 1) when steep_only is set, else a
    mix of steep, pure and sub-linear ones; finite points carry irregular
    circles and the occasional tame entry.  Retries internally until the
    validation rules accept the draw.
    """
    from .formal import LocalEntry, ModifiedFormalData

    def entry(circle):
        mon = random_jordan_class(rng, max_n=3)
        return LocalEntry(circle, mon.n, mon)

    while True:
        points = []
        inf_entries = []
        for _ in range(rng.randint(1, 2)):
            if steep_only or rng.random() < 0.6:
                q = random_steep_factor(rng)
            elif rng.random() < 0.5:
                q = normalize(INF, [(Fraction(1), random_cycnum(rng, nonzero=True))])
            else:
                beta = rng.randint(2, 3)
                pairs = [(Fraction(1), random_cycnum(rng))]
                pairs.append((Fraction(rng.randint(1, beta - 1), beta),
                              random_cycnum(rng, nonzero=True)))
                q = normalize(INF, [(e, b) for e, b in pairs if not b.is_zero()])
            inf_entries.append(entry(circle_of(q)))
        if inf_entries:
            points.append((INF, tuple(inf_entries)))
        pool = [CycNum.rational(0), CycNum.rational(1), CycNum.rational(-2)]
        rng.shuffle(pool)
        for a in pool[: rng.randint(0, 2)]:
            loc = PointP1.finite(a)
            finite_entries = [entry(circle_of(random_expfactor(
                rng, point=loc, max_beta=2, max_irr=4, allow_tame=False)))]
            if rng.random() < 0.4:
                finite_entries.append(entry(circle_of(normalize(loc, ()))))
            points.append((loc, tuple(finite_entries)))
        try:
            return ModifiedFormalData(points)
        except ValueError:
            continue


def check_fourier_rank(cases: int = 200, seed: int = 0) -> list[str]:
    """rank_of(fourier_formal(m)) must equal fourier_rank(m) whenever the
    image exists; draws whose image is incompatible are redrawn."""
    from .formal import rank_of
    from .sl2 import fourier_formal, fourier_rank

    rng = random.Random(seed)
    failures = []
    done = 0
    attempts = 0
    while done < cases and attempts < cases * 30:
        attempts += 1
        m = random_fourier_input(rng)
        try:
            img = fourier_formal(m)
        except ValueError:
            continue
        except Exception as exc:  # noqa: BLE001 - report, don't stop the sweep
            failures.append(f"rank case {done}: {type(exc).__name__}: {exc} on {m}")
            done += 1
            continue
        if rank_of(img) != fourier_rank(m):
            failures.append(
                f"rank case {done}: image rank {rank_of(img)} != "
                f"predicted {fourier_rank(m)} on {m}"
            )
        done += 1
    if done < cases:
        failures.append(f"only {done}/{cases} draws produced a defined transform")
    return failures


def _leg_dims(diag, core_index: int) -> tuple[int, ...]:
    prefix = f"c{core_index}.l"
    legs = [n for n in diag.nodes if n.id.startswith(prefix)]
    legs.sort(key=lambda n: n.source)
    return tuple(n.dim for n in legs)


def check_fourier_invariance(cases: int = 200, seed: int = 0) -> list[str]:
    """The full diagram must survive the Fourier transform node for node.

    Inputs keep every circle at infinity steep, so the whole image lives at
    infinity again and both diagrams can be compared through the circle map:
    each input circle is matched to the image circle it transforms into, and
    the node dimensions, leg dimensions and all B entries must agree under
    that matching.  The image legs are computed with the transported marking
    (the input marking with eigenvalues scaled by the parity sign); letting
    the image pick its own canonical marking would move eigenvalue 1 to the
    front whenever the sign flip produces it, which changes the leg without
    changing the class.  Draws whose image is incompatible are redrawn.
    """
    from . import diagram as dg
    from .formal import Marking, default_marking
    from .sl2 import _fourier_image_circle, fourier_formal

    minus_one = CycNum.rational(-1)
    rng = random.Random(seed)
    failures = []
    done = 0
    attempts = 0
    while done < cases and attempts < cases * 30:
        attempts += 1
        m = random_fourier_input(rng, steep_only=True)
        try:
            img = fourier_formal(m)
        except ValueError:
            continue
        tag = f"invariance case {done}"
        done += 1
        try:
            circles_in, mults_in, classes_in = dg._core_parts(m)
            circles_img, mults_img, classes_img = dg._core_parts(img)
        except Exception as exc:  # noqa: BLE001 - report, don't stop the sweep
            failures.append(f"{tag}: {type(exc).__name__}: {exc} on {m}")
            continue
        if len(circles_in) != len(circles_img):
            failures.append(
                f"{tag}: {len(circles_in)} nodes became {len(circles_img)} on {m}"
            )
            continue
        perm = []
        transported: dict[int, Marking] = {}
        ok = True
        for i, c in enumerate(circles_in):
            image_c, sign = _fourier_image_circle(c)
            hits = [j for j, cj in enumerate(circles_img)
                    if dg._same_circle(image_c, cj)]
            if len(hits) != 1:
                failures.append(f"{tag}: node {i} matched {len(hits)} image nodes")
                ok = False
                break
            j = hits[0]
            perm.append(j)
            if mults_in[i] != mults_img[j]:
                failures.append(
                    f"{tag}: node {i} dim {mults_in[i]} became {mults_img[j]}"
                )
                ok = False
                break
            expected = classes_in[i]
            if sign == -1:
                expected = expected.scale_eigenvalues(minus_one)
            if expected != classes_img[j]:
                failures.append(f"{tag}: node {i} class changed beyond the sign")
                ok = False
                break
            values = default_marking(classes_in[i]).values
            if sign == -1:
                values = tuple(v * minus_one for v in values)
            transported[id(classes_img[j])] = Marking(values)
        if not ok:
            continue
        if sorted(perm) != list(range(len(perm))):
            failures.append(f"{tag}: circle matching is not a bijection")
            continue
        try:
            d_in = dg.full_diagram(m)
            d_img = dg.full_diagram(
                img,
                marking_strategy=lambda c: transported.get(
                    id(c)) or default_marking(c),
            )
        except Exception as exc:  # noqa: BLE001 - report, don't stop the sweep
            failures.append(f"{tag}: {type(exc).__name__}: {exc} on {m}")
            continue
        for i in range(len(circles_in)):
            if _leg_dims(d_in, i) != _leg_dims(d_img, perm[i]):
                failures.append(
                    f"{tag}: node {i} legs {_leg_dims(d_in, i)} became "
                    f"{_leg_dims(d_img, perm[i])}"
                )
        for i1 in range(len(circles_in)):
            for i2 in range(i1, len(circles_in)):
                b_in = d_in.B[d_in.index_of(f"c{i1}")][d_in.index_of(f"c{i2}")]
                b_img = d_img.B[d_img.index_of(f"c{perm[i1]}")][
                    d_img.index_of(f"c{perm[i2]}")]
                if b_in != b_img:
                    failures.append(
                        f"{tag}: B[{i1}][{i2}] = {b_in} became {b_img} on {m}"
                    )
        if dg.dimension(d_in) != dg.dimension(d_img):
            failures.append(
                f"{tag}: dimension {dg.dimension(d_in)} became "
                f"{dg.dimension(d_img)}"
            )
    if done < cases:
        failures.append(f"only {done}/{cases} draws produced a defined transform")
    return failures
