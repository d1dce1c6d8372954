"""Constructors for concrete test families.

A (2,2,2) form has 27 coefficients; every constraint used here
(membership of a chosen section, a prescribed root pair for one
coordinate quadratic, a prescribed double root) is linear in those
coefficients, so families are produced by exact Gaussian elimination
over Q: free coefficients are drawn as small random integers from a
seeded generator and the pinned ones are solved for.

``random_family`` plants one constant section on an otherwise random
non-isotrivial family; ``periodic_family`` engineers an exact period-2
cycle of the word [1, 2, 3] automorphism through six prescribed
root-swap constraints, plus an extra generic marked section on the
same surface.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np

from .exactnum import Poly
from .wehler import (
    FamilyValidationError,
    MarkedSection,
    Pair,
    SurfaceFamily,
    automorphism_apply,
)

MDEGS = tuple((a, b, c) for a in range(3) for b in range(3) for c in range(3))


def _mon_value(pair: tuple[Fraction, Fraction], idx: int) -> Fraction:
    a, b = pair
    return a ** (2 - idx) * b**idx


def _membership_row(point) -> list[Fraction]:
    """Coefficient row of F(point) = 0 over the 27 unknowns."""
    return [
        _mon_value(point[0], a) * _mon_value(point[1], b) * _mon_value(point[2], c)
        for (a, b, c) in MDEGS
    ]


def _quadratic_rows(i: int, passive: dict[int, tuple[Fraction, Fraction]]):
    """Rows expressing the coordinate-i quadratic coefficients Q0, Q1, Q2
    as linear forms over the 27 unknowns, with the other two coordinates
    frozen at the given values."""
    rows = [[Fraction(0)] * 27 for _ in range(3)]
    for col, (a, b, c) in enumerate(MDEGS):
        mdeg = (a, b, c)
        w = Fraction(1)
        for j, pt in passive.items():
            w *= _mon_value(pt, mdeg[j])
        rows[mdeg[i]][col] = w
    return rows


def _root_pair_constraints(i, passive, r1, r2):
    """Linear constraints forcing the coordinate-i quadratic to be
    proportional to the binary quadratic with roots r1, r2."""
    q0_row, q1_row, q2_row = _quadratic_rows(i, passive)
    (p1, q1v), (p2, q2v) = r1, r2
    # (q1 u - p1 v)(q2 u - p2 v) = A u^2 + B uv + C v^2
    A = q1v * q2v
    B = -(q1v * p2 + p1 * q2v)
    C = p1 * p2
    rows = []
    # rank-1 cross conditions Q x (A,B,C) = 0
    rows.append([B * a - A * b for a, b in zip(q0_row, q1_row)])
    rows.append([C * a - A * b for a, b in zip(q0_row, q2_row)])
    rows.append([C * a - B * b for a, b in zip(q1_row, q2_row)])
    return rows


def _solve_with_random_free(rows_u, rows_v, seed: int):
    """Solve [rows] @ coeffs = 0 for the u- and v-parts of coefficients
    c(t) = u + v t, assigning seeded random integers to free columns."""
    rng = np.random.default_rng((seed, 0xFA71))

    def solve(rows, lo, hi):
        m = [row[:] for row in rows]
        n = 27
        pivots = []
        r = 0
        for col in range(n):
            piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            inv = 1 / m[r][col]
            m[r] = [x * inv for x in m[r]]
            for i in range(len(m)):
                if i != r and m[i][col] != 0:
                    f = m[i][col]
                    m[i] = [x - f * y for x, y in zip(m[i], m[r])]
            pivots.append(col)
            r += 1
            if r == len(m):
                break
        free_cols = [c for c in range(n) if c not in pivots]
        sol = [Fraction(0)] * n
        for c in free_cols:
            sol[c] = Fraction(int(rng.integers(lo, hi)))
        for row_idx, col in enumerate(pivots):
            acc = Fraction(0)
            for c in free_cols:
                acc -= m[row_idx][c] * sol[c]
            sol[col] = acc
        return sol

    u = solve(rows_u, -4, 5)
    v = solve(rows_v, -2, 3)
    return u, v


def _family_from_parts(u, v, word, sections, *, validate=True) -> SurfaceFamily:
    coeffs = {}
    for col, key in enumerate(MDEGS):
        poly = Poly((u[col], v[col]))
        if not poly.is_zero():
            coeffs[key] = poly
    return SurfaceFamily(coeffs, word, sections, validate=validate)


def _const_pair(a, b) -> tuple[Fraction, Fraction]:
    return (Fraction(a), Fraction(b))


def _section_from_points(pts) -> MarkedSection:
    return MarkedSection(
        tuple(Pair.constant(p, q) for (p, q) in pts)
    )


def random_family(seed: int = 1, word=(1, 2, 3)) -> SurfaceFamily:
    """Non-isotrivial family with the constant section ([1:1],[1:1],[1:1]).

    All 27 coefficients are degree <= 1 in t with small random entries;
    membership of the section pins one linear constraint per t-slice.
    """
    base = _const_pair(1, 1)
    row = _membership_row((base, base, base))
    for attempt in range(64):
        u, v = _solve_with_random_free([row], [row], seed * 101 + attempt)
        if all(x == 0 for x in v):
            continue  # isotrivial draw: no t dependence
        try:
            fam = _family_from_parts(
                u, v, word, [_section_from_points([(1, 1), (1, 1), (1, 1)])]
            )
            return fam
        except FamilyValidationError:
            continue
    raise RuntimeError("could not draw a valid random family")


def periodic_family(seed: int = 1, word=(1, 2, 3)) -> SurfaceFamily:
    """Family carrying an exact period-2 section of the word automorphism.

    The orbit path sigma -> a -> b -> tau -> c -> d -> sigma changes one
    coordinate per involution; each hop pins the corresponding coordinate
    quadratic to a prescribed root pair (two linear conditions each,
    imposed on both t-slices).  A further generic constant section rho
    is planted for contrast.

    Sections list: [sigma, rho].
    """
    if tuple(word) != (1, 2, 3):
        raise ValueError("the engineered cycle is built for the word [1, 2, 3]")
    x0, x1 = _const_pair(1, 1), _const_pair(-1, 1)
    y0, y1 = _const_pair(2, 1), _const_pair(-1, 2)
    z0, z1 = _const_pair(1, 3), _const_pair(3, 1)
    rho = (_const_pair(1, 2), _const_pair(1, 1), _const_pair(-2, 1))

    rows = []
    # s1 swaps x0 <-> x1 over (y0, z0) and over (y1, z1)
    rows += _root_pair_constraints(0, {1: y0, 2: z0}, x0, x1)
    rows += _root_pair_constraints(0, {1: y1, 2: z1}, x1, x0)
    # s2 swaps y0 <-> y1 over (x1, z0) and over (x0, z1)
    rows += _root_pair_constraints(1, {0: x1, 2: z0}, y0, y1)
    rows += _root_pair_constraints(1, {0: x0, 2: z1}, y1, y0)
    # s3 swaps z0 <-> z1 over (x1, y1) and over (x0, y0)
    rows += _root_pair_constraints(2, {0: x1, 1: y1}, z0, z1)
    rows += _root_pair_constraints(2, {0: x0, 1: y0}, z1, z0)
    rows.append(_membership_row(rho))

    sigma = _section_from_points([x0, y0, z0])
    tau = _section_from_points([x1, y1, z1])

    for attempt in range(256):
        u, v = _solve_with_random_free(rows, rows, seed * 307 + attempt)
        if all(x == 0 for x in v):
            continue
        try:
            fam = _family_from_parts(
                u,
                v,
                word,
                [sigma, MarkedSection(tuple(Pair.constant(p, q) for p, q in rho))],
            )
        except FamilyValidationError:
            continue
        # the cycle must really close with period exactly 2
        try:
            img = automorphism_apply(fam, sigma, 1)
            if img != tau:
                continue
            if automorphism_apply(fam, img, 1) != sigma:
                continue
        except Exception:
            continue
        # rho must not be locked to the cycle
        try:
            r1 = automorphism_apply(fam, fam.sections[1], 1)
            if max(automorphism_apply(fam, r1, 1).degrees()) == 0:
                continue  # rho looks preperiodic at depth 2: redraw
        except Exception:
            continue
        return fam
    raise RuntimeError("could not engineer the periodic family")


def diagonal_family() -> SurfaceFamily:
    """Fermat-type diagonal family, smooth for generic t (no section)."""
    coeffs = {
        (0, 0, 0): Poly((1,)),
        (2, 2, 2): Poly((1,)),
        (0, 2, 2): Poly((1,)),
        (2, 0, 0): Poly((-1,)),
        (1, 1, 1): Poly((0, 1)),  # t * mixed monomial
    }
    return SurfaceFamily(coeffs, (1, 2, 3), [], validate=True)


def squared_form_family() -> SurfaceFamily:
    """(x0 y0 z0 + x1 y1 z1)^2: non-reduced, singular everywhere."""
    coeffs = {
        (0, 0, 0): Poly((1,)),
        (1, 1, 1): Poly((2,)),
        (2, 2, 2): Poly((1,)),
    }
    return SurfaceFamily(coeffs, (1, 2, 3), [], validate=True)


def family_suite(count: int = 3, seed: int = 11) -> list[SurfaceFamily]:
    """Distinct random families with planted sections, for batch tests."""
    words = [(1, 2, 3), (2, 3, 1), (3, 1, 2)]
    return [
        random_family(seed + 13 * k, words[k % len(words)]) for k in range(count)
    ]
