"""Rank-3 Néron–Severi lattice model.

Carries the intersection form, pullback isometries of automorphism
words, exact dynamical degrees (isolating-interval roots of the
characteristic polynomial, never floating power iteration), nef
eigendivisor pairs over the field of the spectral radius, big-and-nef
certificates, and a brute-force search for periodic classes of fixed
self-intersection, which is the lattice-level candidate support of the
augmented base locus.

Two ready-made instantiations are provided:

* ``wehler_222_lattice`` — hyperplane classes of a (2,2,2) hypersurface
  in (P^1)^3 with its three Vieta involutions.  Words must use all
  three letters to be hyperbolic (two-letter words are parabolic: they
  preserve a genus-one fibration).
* ``classical_wehler_lattice`` — the two-involution Wehler lattice
  (hypersurface of bidegree (2,2)+(1,1) in P^2 x P^2), padded with a
  fixed (-2)-class to rank 3.  The word [1, 2] is hyperbolic here with
  spectral radius 7 + 4*sqrt(3).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .exactnum import AlgebraicReal, NFElement, NumberField, Poly, isolate_real_roots

Vec = tuple[int, int, int]
Mat = tuple[tuple[int, int, int], ...]


# ---------------------------------------------------------------------------
# intersection form


@dataclass(frozen=True)
class IntersectionForm:
    """Symmetric integer pairing on the rank-3 class lattice."""

    gram: Mat

    def __post_init__(self):
        g = self.gram
        if len(g) != 3 or any(len(r) != 3 for r in g):
            raise ValueError("gram matrix must be 3x3")
        if any(g[i][j] != g[j][i] for i in range(3) for j in range(3)):
            raise ValueError("gram matrix must be symmetric")

    def pair(self, u, v):
        """Intersection number of two coefficient triples (exact)."""
        total = None
        for i in range(3):
            for j in range(3):
                gij = self.gram[i][j]
                if gij == 0:
                    continue
                term = u[i] * v[j] * gij
                total = term if total is None else total + term
        return 0 if total is None else total

    def det(self) -> int:
        return _det3(self.gram)

    def signature(self) -> tuple[int, int]:
        """(positive, negative) inertia via exact congruence reduction."""
        a = [[Fraction(x) for x in row] for row in self.gram]
        pos = neg = 0

        def reduce(mat):
            nonlocal pos, neg
            m = len(mat)
            if m == 0:
                return
            p = next((i for i in range(m) if mat[i][i] != 0), None)
            if p is None:
                hit = next(
                    ((i, j) for i in range(m) for j in range(i + 1, m) if mat[i][j] != 0),
                    None,
                )
                if hit is None:
                    return  # remaining block is zero (degenerate directions)
                i, j = hit
                for c in range(m):
                    mat[i][c] += mat[j][c]
                for r in range(m):
                    mat[r][i] += mat[r][j]
                p = i
            piv = mat[p][p]
            if piv > 0:
                pos += 1
            else:
                neg += 1
            rest = [i for i in range(m) if i != p]
            reduce([[mat[i][j] - mat[i][p] * mat[p][j] / piv for j in rest] for i in rest])

        reduce(a)
        return pos, neg


def _det3(m) -> int:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


# ---------------------------------------------------------------------------
# lattice maps


@dataclass(frozen=True)
class LatticeMap:
    """Pullback action of an automorphism on the class lattice (columns are
    images of basis classes)."""

    mat: Mat

    @classmethod
    def identity(cls) -> "LatticeMap":
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, 1)))

    @classmethod
    def from_rows(cls, rows) -> "LatticeMap":
        return cls(tuple(tuple(int(x) for x in r) for r in rows))

    def __mul__(self, other: "LatticeMap") -> "LatticeMap":
        a, b = self.mat, other.mat
        return LatticeMap(
            tuple(
                tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
                for i in range(3)
            )
        )

    def apply(self, v):
        """Image of a coefficient triple (entries may be exact field elements)."""
        return tuple(
            sum((self.mat[i][k] * v[k] for k in range(3)), start=0 * v[0])
            for i in range(3)
        )

    def transpose(self) -> "LatticeMap":
        return LatticeMap(tuple(tuple(self.mat[j][i] for j in range(3)) for i in range(3)))

    def det(self) -> int:
        return _det3(self.mat)

    def inverse(self) -> "LatticeMap":
        d = self.det()
        if d not in (1, -1):
            raise ValueError("lattice map is not invertible over the integers")
        m = self.mat
        cof = [
            [
                (m[(i + 1) % 3][(j + 1) % 3] * m[(i + 2) % 3][(j + 2) % 3]
                 - m[(i + 1) % 3][(j + 2) % 3] * m[(i + 2) % 3][(j + 1) % 3])
                for j in range(3)
            ]
            for i in range(3)
        ]
        inv = tuple(tuple(cof[j][i] * d for j in range(3)) for i in range(3))
        return LatticeMap(inv)

    def is_isometry(self, form: IntersectionForm) -> bool:
        m, g = self.mat, form.gram
        mt_g_m = [
            [
                sum(m[a][i] * g[a][b] * m[b][j] for a in range(3) for b in range(3))
                for j in range(3)
            ]
            for i in range(3)
        ]
        return all(mt_g_m[i][j] == g[i][j] for i in range(3) for j in range(3))

    def is_involution(self) -> bool:
        return (self * self) == LatticeMap.identity()

    def charpoly(self) -> Poly:
        """Monic characteristic polynomial, exact integer coefficients."""
        m = self.mat
        tr = m[0][0] + m[1][1] + m[2][2]
        s2 = sum(
            m[i][i] * m[j][j] - m[i][j] * m[j][i]
            for i in range(3)
            for j in range(3)
            if i < j
        )
        return Poly((-self.det(), s2, -tr, 1))

    def __pow__(self, n: int) -> "LatticeMap":
        if n < 0:
            return self.inverse() ** (-n)
        out = LatticeMap.identity()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out


# ---------------------------------------------------------------------------
# divisor classes


@dataclass(frozen=True)
class DivisorClass:
    """Real coefficient triple in the span of the hyperplane classes."""

    coeffs: tuple
    role: str = "generic"  # one of D+, D-, D, generic
    number_field: Optional[NumberField] = None

    def as_floats(self) -> tuple[float, float, float]:
        return tuple(
            float(c) if not isinstance(c, NFElement) else c.to_float()
            for c in self.coeffs
        )


def pair_classes(form: IntersectionForm, a: DivisorClass, b: DivisorClass):
    """Exact intersection number of two divisor classes."""
    return form.pair(a.coeffs, b.coeffs)


# ---------------------------------------------------------------------------
# words and spectra


def compose_word(involutions: Sequence[LatticeMap], word: Sequence[int]) -> LatticeMap:
    """Pullback of the word automorphism (1-based involution indices).

    The word is applied left to right on points, so pullbacks compose in
    reverse order: the last letter acts first on classes.  An empty word
    yields the identity with a warning (the identity is not hyperbolic).
    """
    if not word:
        warnings.warn("empty word composes to the identity, which is not hyperbolic")
        return LatticeMap.identity()
    out = LatticeMap.identity()
    for idx in word:
        if not 1 <= idx <= len(involutions):
            raise ValueError(f"word index {idx} out of range 1..{len(involutions)}")
        out = out * involutions[idx - 1]
    return out


def cyclotomic_split(cp: Poly) -> tuple[Poly, list[tuple[Poly, int]]]:
    """Split off (x-1)/(x+1) factors from a characteristic polynomial.

    Returns (remaining factor, [(linear factor, multiplicity), ...]).
    For rank-3 isometries the remaining factor of a hyperbolic map is
    the Salem-type quadratic carrying lambda and 1/lambda.
    """
    cyc = []
    for r in (1, -1):
        lin = Poly((-r, 1))
        mult = 0
        while cp.degree() >= 1 and cp(Fraction(r)) == 0:
            cp = cp.exact_div(lin)
            mult += 1
        if mult:
            cyc.append((lin, mult))
    return cp, cyc


def salem_factor(m: LatticeMap) -> Optional[Poly]:
    """The quadratic factor carrying lambda, or None for non-hyperbolic maps."""
    rest, _ = cyclotomic_split(m.charpoly())
    if rest.degree() != 2:
        return None
    return rest if count_positive_gap(rest) else None


def count_positive_gap(rest: Poly) -> bool:
    """True when the largest real root of ``rest`` exceeds 1 (exact)."""
    from .exactnum import count_roots

    bound = Fraction(1) + max(abs(c) for c in rest.coeffs) / abs(rest.leading())
    return count_roots(rest.squarefree_part(), Fraction(1), bound) > 0


def dynamical_degree(m: LatticeMap) -> AlgebraicReal:
    """Largest real eigenvalue of the pullback; 1 exactly iff not hyperbolic."""
    cp = m.charpoly()
    rest, _ = cyclotomic_split(cp)
    if rest.degree() == 0:
        return AlgebraicReal.from_rational(1)
    candidates = isolate_real_roots(rest)
    if not candidates:
        return AlgebraicReal.from_rational(1)
    lo, hi = candidates[-1]
    root = AlgebraicReal.root_of(rest, lo, hi)
    if root.is_rational():
        return root if root.as_rational() > 1 else AlgebraicReal.from_rational(1)
    if not count_positive_gap(rest):
        return AlgebraicReal.from_rational(1)
    return root


def is_hyperbolic(m: LatticeMap) -> bool:
    lam = dynamical_degree(m)
    return not (lam.is_rational() and lam.as_rational() == 1)


def power_iteration_lambda(m: LatticeMap, iters: int = 200) -> float:
    """Floating cross-check oracle for the spectral radius."""
    a = np.array(m.mat, dtype=float)
    v = np.ones(3)
    lam = 1.0
    for _ in range(iters):
        w = a @ v
        lam = float(np.linalg.norm(w))
        if lam == 0:
            return 0.0
        v = w / lam
    return lam


# ---------------------------------------------------------------------------
# eigendivisors


def eigendivisor(m: LatticeMap, direction: str, form: IntersectionForm) -> DivisorClass:
    """Nef eigendivisor D+ (pullback eigenvector for lambda) or D-.

    Entries are exact elements of Q(lambda); the class is normalized so
    that its pairing with L1+L2+L3 is 1.  Raises on non-hyperbolic input.
    """
    if direction not in ("+", "-"):
        raise ValueError("direction must be '+' or '-'")
    lam = dynamical_degree(m)
    if lam.is_rational() and lam.as_rational() == 1:
        raise ValueError("no Perron eigenvector: map is not hyperbolic")
    K = NumberField(lam.minimal_polynomial, lam.lo, lam.hi)
    lam_el = K.generator()
    target = m if direction == "+" else m.inverse()
    v = _kernel_vector(target, lam_el, K)
    ones = (K.one(), K.one(), K.one())
    norm = form.pair(v, ones)
    if norm.is_zero():
        raise ValueError("no Perron eigenvector: degenerate normalization pairing")
    v = tuple(c / norm for c in v)
    # residual must vanish identically in the number field
    for i in range(3):
        res = sum((K.from_rational(target.mat[i][k]) * v[k] for k in range(3)), K.zero())
        if not (res - lam_el * v[i]).is_zero():
            raise AssertionError("eigendivisor residual is nonzero")
    return DivisorClass(coeffs=v, role="D+" if direction == "+" else "D-", number_field=K)


def _kernel_vector(m: LatticeMap, lam: NFElement, K: NumberField):
    """Nonzero kernel vector of (m - lam*I) via exact row cross products."""
    rows = [
        tuple(K.from_rational(m.mat[i][j]) - (lam if i == j else K.zero()) for j in range(3))
        for i in range(3)
    ]
    for a in range(3):
        for b in range(a + 1, 3):
            v = _cross(rows[a], rows[b])
            if not all(c.is_zero() for c in v):
                return v
    raise ValueError("no Perron eigenvector: eigenvalue is not simple")


def _cross(r, s):
    return (
        r[1] * s[2] - r[2] * s[1],
        r[2] * s[0] - r[0] * s[2],
        r[0] * s[1] - r[1] * s[0],
    )


def big_nef_check(
    d: DivisorClass,
    form: IntersectionForm,
    dplus: Optional[DivisorClass] = None,
    dminus: Optional[DivisorClass] = None,
) -> tuple[bool, dict]:
    """Certify d.d > 0 plus nonnegative pairing against the test set.

    The test set is the three hyperplane classes and, when supplied, the
    two eigendivisors.  The certificate records every pairing with its
    exact sign and a float shadow, and names the finite-test-set
    assumption (the full nef cone is not computable from the lattice).
    """
    pairings = {}
    tests = [("L1", (1, 0, 0)), ("L2", (0, 1, 0)), ("L3", (0, 0, 1))]
    if dplus is not None:
        tests.append(("D+", dplus.coeffs))
    if dminus is not None:
        tests.append(("D-", dminus.coeffs))
    ok = True
    self_pair = form.pair(d.coeffs, d.coeffs)
    sp_sign = _exact_sign(self_pair)
    pairings["self"] = {"value": _to_float(self_pair), "sign": sp_sign, "exact": True}
    if sp_sign <= 0:
        ok = False
    for name, other in tests:
        val = form.pair(d.coeffs, other)
        sgn = _exact_sign(val)
        pairings[name] = {"value": _to_float(val), "sign": sgn, "exact": True}
        if sgn < 0:
            ok = False
    cert = {
        "big": sp_sign > 0,
        "nef_on_test_set": all(p["sign"] >= 0 for n, p in pairings.items() if n != "self"),
        "pairings": pairings,
        "assumption": "nefness certified against the finite test set "
        "{L1, L2, L3, D+, D-} only",
    }
    return ok, cert


def _exact_sign(x) -> int:
    if isinstance(x, NFElement):
        return x.sign()
    return (x > 0) - (x < 0)


def _to_float(x) -> float:
    if isinstance(x, NFElement):
        return x.to_float()
    return float(x)


# ---------------------------------------------------------------------------
# periodic classes (candidate support of the augmented base locus)


def periodic_curve_classes(
    m: LatticeMap,
    form: IntersectionForm,
    selfint: int = -2,
    order_bound: int = 12,
    height_bound: int = 50,
) -> list[tuple[Vec, ...]]:
    """All integer classes C with C.C = selfint, coefficients bounded by
    height_bound, whose orbit under the map is periodic with period <=
    order_bound; grouped into orbits (each orbit in cycle order).

    This is a semi-decision at the stated bounds: an empty result within
    the box does not prove the locus empty.
    """
    if order_bound <= 0 or height_bound < 0:
        raise ValueError("bounds must be positive")
    if height_bound == 0:
        return []
    rng = np.arange(-height_bound, height_bound + 1, dtype=np.int64)
    xs, ys, zs = np.meshgrid(rng, rng, rng, indexing="ij")
    v = np.stack([xs.ravel(), ys.ravel(), zs.ravel()], axis=1)
    g = np.array(form.gram, dtype=np.int64)
    quad = np.einsum("ni,ij,nj->n", v, g, v)
    cands = v[quad == selfint]
    seen: set[Vec] = set()
    orbits: list[tuple[Vec, ...]] = []
    for row in cands:
        start: Vec = (int(row[0]), int(row[1]), int(row[2]))
        if start in seen:
            continue
        orbit = [start]
        cur = start
        periodic = False
        for _ in range(order_bound):
            cur = tuple(int(x) for x in m.apply(cur))
            if cur == start:
                periodic = True
                break
            orbit.append(cur)
        if periodic:
            seen.update(orbit)
            rep = min(orbit)
            k = orbit.index(rep)
            orbits.append(tuple(orbit[k:] + orbit[:k]))
    return sorted(orbits)


# ---------------------------------------------------------------------------
# instantiations


def _reflection_222(i: int) -> LatticeMap:
    rows = [[1 if r == c else 0 for c in range(3)] for r in range(3)]
    for r in range(3):
        rows[r][i] = 2
    rows[i][i] = -1
    return LatticeMap.from_rows(rows)


def wehler_222_lattice() -> tuple[IntersectionForm, tuple[LatticeMap, LatticeMap, LatticeMap]]:
    """Hyperplane classes of a (2,2,2) hypersurface in (P^1)^3.

    L_i.L_i = 0 and L_i.L_j = 2; the involution s_i pulls back L_i to
    -L_i + 2 L_j + 2 L_k and fixes the other two classes.
    """
    form = IntersectionForm(((0, 2, 2), (2, 0, 2), (2, 2, 0)))
    return form, tuple(_reflection_222(i) for i in range(3))


def classical_wehler_lattice() -> tuple[IntersectionForm, tuple[LatticeMap, LatticeMap]]:
    """Two-involution Wehler lattice padded with a fixed (-2)-class.

    Basis: the two hyperplane sections (self-intersection 2, mutual 4)
    plus an orthogonal (-2)-class fixed by both involutions.  The
    composition of the two involutions is hyperbolic with spectral
    radius 7 + 4*sqrt(3) and characteristic polynomial
    (x - 1)(x^2 - 14x + 1).
    """
    form = IntersectionForm(((2, 4, 0), (4, 2, 0), (0, 0, -2)))
    s1 = LatticeMap.from_rows([[1, 4, 0], [0, -1, 0], [0, 0, 1]])
    s2 = LatticeMap.from_rows([[-1, 0, 0], [4, 1, 0], [0, 0, 1]])
    return form, (s1, s2)


def gram_from_multidegrees() -> Mat:
    """Oracle: intersection numbers of hyperplane classes on a (2,2,2)
    hypersurface by symbolic multidegree computation in the Chow ring of
    (P^1)^3 (relations H_i^2 = 0, normalized by H1 H2 H3 = 1)."""
    # exponents of monomials in H1,H2,H3; reduce mod H_i^2 = 0
    def product(*factors):
        acc = {(0, 0, 0): 1}
        for f in factors:
            out = {}
            for mono, c in acc.items():
                for mono2, c2 in f.items():
                    m = tuple(a + b for a, b in zip(mono, mono2))
                    if max(m) > 1:
                        continue
                    out[m] = out.get(m, 0) + c * c2
            acc = out
        return acc

    H = [{(1, 0, 0): 1}, {(0, 1, 0): 1}, {(0, 0, 1): 1}]
    surface = {(1, 0, 0): 2, (0, 1, 0): 2, (0, 0, 1): 2}
    gram = []
    for i in range(3):
        row = []
        for j in range(3):
            top = product(H[i], H[j], surface)
            row.append(top.get((1, 1, 1), 0))
        gram.append(tuple(row))
    return tuple(gram)
