"""Real algebraic numbers as (squarefree polynomial, isolating interval).

The defining polynomial has exactly one real root inside the open
rational interval; ``refine`` bisects with exact sign evaluation, so
every enclosure is certified.  Degrees up to four are all this package
ever needs (spectral radii of rank-3 isometries are quadratic
irrationalities, and eigendivisor data lives in the same field).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .qpoly import Poly


def sturm_chain(f: Poly) -> list[Poly]:
    """Sturm sequence of a squarefree polynomial."""
    chain = [f, f.derivative()]
    while not chain[-1].is_zero():
        chain.append(-(chain[-2] % chain[-1]))
    chain.pop()
    return chain


def _sign_variations(chain, x: Fraction) -> int:
    signs = []
    for g in chain:
        v = g(x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(f: Poly, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots of squarefree f in (lo, hi]."""
    chain = sturm_chain(f)
    return _sign_variations(chain, lo) - _sign_variations(chain, hi)


def isolate_real_roots(f: Poly) -> list[tuple[Fraction, Fraction]]:
    """Disjoint open isolating intervals for all real roots of f (squarefree part)."""
    f = f.squarefree_part()
    if f.degree() <= 0:
        return []
    bound = Fraction(1) + max(abs(c) for c in f.coeffs) / abs(f.leading())
    chain = sturm_chain(f)

    out: list[tuple[Fraction, Fraction]] = []

    def split(lo: Fraction, hi: Fraction, nroots: int):
        if nroots == 0:
            return
        if nroots == 1:
            # nudge endpoints off roots of f so the interval is open and clean
            lo2, hi2 = lo, hi
            while f(lo2) == 0:
                lo2 -= Fraction(1, 1 << 20)
            while f(hi2) == 0:
                hi2 += Fraction(1, 1 << 20)
            out.append((lo2, hi2))
            return
        mid = (lo + hi) / 2
        while f(mid) == 0:
            mid += (hi - lo) / (1 << 10)
        left = _sign_variations(chain, lo) - _sign_variations(chain, mid)
        split(lo, mid, left)
        split(mid, hi, nroots - left)

    total = _sign_variations(chain, -bound) - _sign_variations(chain, bound)
    split(-bound, bound, total)
    return sorted(out)


@dataclass(frozen=True)
class AlgebraicReal:
    """A real root of ``minimal_polynomial`` isolated by (lo, hi)."""

    minimal_polynomial: Poly
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        f = self.minimal_polynomial
        if f.degree() < 1:
            raise ValueError("defining polynomial must be nonconstant")

    @classmethod
    def from_rational(cls, q) -> "AlgebraicReal":
        q = Fraction(q)
        return cls(Poly((-q, 1)).monic(), q, q)

    @classmethod
    def root_of(cls, f: Poly, lo, hi) -> "AlgebraicReal":
        """The unique root of f in (lo, hi); f is replaced by the factor owning it."""
        lo, hi = Fraction(lo), Fraction(hi)
        f = f.squarefree_part()
        if lo == hi:
            if f(lo) != 0:
                raise ValueError("degenerate interval does not hit a root")
        elif count_roots(f, lo, hi) != 1:
            raise ValueError("interval does not isolate exactly one root")
        f = _minimal_factor(f, lo, hi)
        return cls(f, lo, hi)

    def is_rational(self) -> bool:
        return self.minimal_polynomial.degree() == 1

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational value")
        f = self.minimal_polynomial
        return -f[0] / f[1]

    def refine(self, eps) -> "AlgebraicReal":
        """Nested bisection until the enclosure has width <= eps."""
        eps = Fraction(eps)
        if eps <= 0:
            raise ValueError("eps must be positive")
        if self.is_rational():
            q = self.as_rational()
            return replace(self, lo=q, hi=q)
        f = self.minimal_polynomial
        lo, hi = self.lo, self.hi
        chain = sturm_chain(f)
        while hi - lo > eps:
            mid = (lo + hi) / 2
            if f(mid) == 0:
                lo = hi = mid
                break
            if _sign_variations(chain, lo) - _sign_variations(chain, mid) == 1:
                hi = mid
            else:
                lo = mid
        return replace(self, lo=lo, hi=hi)

    def interval(self) -> tuple[Fraction, Fraction]:
        return (self.lo, self.hi)

    def to_float(self) -> float:
        r = self.refine(Fraction(1, 1 << 64))
        return float((r.lo + r.hi) / 2)

    def sign(self) -> int:
        if self.is_rational():
            q = self.as_rational()
            return (q > 0) - (q < 0)
        r = self
        while r.lo <= 0 <= r.hi:
            r = r.refine((r.hi - r.lo) / 4)
        return 1 if r.lo > 0 else -1

    def equals(self, other: "AlgebraicReal") -> bool:
        """Exact equality: same isolated root (via a shared defining factor)."""
        f = self.minimal_polynomial.monic()
        if f != other.minimal_polynomial.monic():
            g = f.gcd(other.minimal_polynomial)
            if g.degree() < 1:
                return False
            # each root can only match if it is also a root of the gcd
            if count_roots(g, self.lo, self.hi) != 1 and not (
                self.lo == self.hi and g(self.lo) == 0
            ):
                return False
            if count_roots(g, other.lo, other.hi) != 1 and not (
                other.lo == other.hi and g(other.lo) == 0
            ):
                return False
            return AlgebraicReal.root_of(g, self.lo, self.hi).equals(
                AlgebraicReal.root_of(g, other.lo, other.hi)
            )
        a, b = self, other
        while True:
            if a.hi < b.lo or b.hi < a.lo:
                return False
            lo = min(a.lo, b.lo)
            hi = max(a.hi, b.hi)
            if lo == hi or count_roots(f, lo, hi) == 1:
                return True
            a = a.refine((a.hi - a.lo) / 4 if a.hi > a.lo else Fraction(1))
            b = b.refine((b.hi - b.lo) / 4 if b.hi > b.lo else Fraction(1))

    def __float__(self):
        return self.to_float()

    def __repr__(self):
        mid = self.to_float()
        return f"AlgebraicReal({self.minimal_polynomial}, ~{mid:.10g})"


def _minimal_factor(f: Poly, lo: Fraction, hi: Fraction) -> Poly:
    """Peel rational roots / quadratic factors so the defining poly is minimal.

    Full factorization is out of scope: degree <= 2 factors are made honest
    (rational root extraction, irreducibility by discriminant), which covers
    every value this package constructs.
    """
    f = f.monic()
    # strip rational roots among divisors of the constant term (monic: integers)
    changed = True
    while changed and f.degree() > 1:
        changed = False
        prim = f.primitive_part()
        c0 = prim[0]
        if c0 == 0:
            root = Fraction(0)
            if lo < root < hi or lo == hi == root:
                return Poly((0, 1))
            f = f.exact_div(Poly((0, 1)))
            changed = True
            continue
        lead = prim.leading()
        for num in _divisors(abs(c0.numerator) or 1):
            for den in _divisors(abs(lead.numerator)):
                for s in (1, -1):
                    cand = Fraction(s * num, den)
                    if f(cand) == 0:
                        if lo <= cand <= hi:
                            return Poly((-cand, 1))
                        f = f.exact_div(Poly((-cand, 1))).monic()
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break
    return f


def _divisors(n: int) -> list[int]:
    n = abs(int(n))
    out = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return sorted(set(out + [n // d for d in out]))
