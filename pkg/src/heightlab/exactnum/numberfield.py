"""Exact arithmetic in a real number field Q(alpha), deg <= 4.

Elements are polynomials in the generator reduced mod its (monic,
irreducible) defining polynomial; the designated real embedding is
carried as an isolating interval, so signs and enclosures of elements
are certified by refining the generator's interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebraic import AlgebraicReal
from .qpoly import Poly


class NumberField:
    """Q[x]/(minpoly) together with one real root chosen as the embedding."""

    def __init__(self, minpoly: Poly, lo, hi):
        minpoly = minpoly.monic()
        if minpoly.degree() < 1 or minpoly.degree() > 4:
            raise ValueError("supported field degrees are 1..4")
        self.minpoly = minpoly
        self.root = AlgebraicReal.root_of(minpoly, Fraction(lo), Fraction(hi))
        # root_of may replace the polynomial by the factor owning the root
        self.minpoly = self.root.minimal_polynomial.monic()
        self.degree = self.minpoly.degree()

    def __eq__(self, other):
        return (
            isinstance(other, NumberField)
            and self.minpoly == other.minpoly
            and self.root.equals(other.root)
        )

    def __repr__(self):
        return f"NumberField({self.minpoly}, alpha~{self.root.to_float():.6g})"

    def elem(self, coeffs) -> "NFElement":
        cs = [Fraction(c) for c in coeffs]
        if len(cs) > self.degree:
            rem = Poly(cs) % self.minpoly
            cs = list(rem.coeffs)
        cs += [Fraction(0)] * (self.degree - len(cs))
        return NFElement(self, tuple(cs[: self.degree]))

    def generator(self) -> "NFElement":
        if self.degree == 1:
            return self.from_rational(-self.minpoly[0])
        return self.elem((0, 1))

    def from_rational(self, q) -> "NFElement":
        return self.elem((Fraction(q),))

    def zero(self) -> "NFElement":
        return self.elem(())

    def one(self) -> "NFElement":
        return self.from_rational(1)


@dataclass(frozen=True)
class NFElement:
    field: NumberField
    coeffs: tuple[Fraction, ...]

    def _poly(self) -> Poly:
        return Poly(self.coeffs)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coeffs[0]

    def _coerce(self, other) -> "NFElement":
        if isinstance(other, NFElement):
            if other.field is not self.field and other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        return self.field.from_rational(other)

    def __add__(self, other):
        other = self._coerce(other)
        return NFElement(
            self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        )

    __radd__ = __add__

    def __neg__(self):
        return NFElement(self.field, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        other = self._coerce(other)
        prod = self._poly() * other._poly()
        return self.field.elem((prod % self.field.minpoly).coeffs)

    __rmul__ = __mul__

    def inverse(self) -> "NFElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        g, u, _ = self._poly().xgcd(self.field.minpoly)
        if g.degree() != 0:
            raise ArithmeticError("defining polynomial is not irreducible")
        scale = 1 / g[0]
        return self.field.elem(tuple(c * scale for c in u.coeffs))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self.field.from_rational(other) / self

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (ValueError, TypeError):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    # -- the real embedding -------------------------------------------

    def enclosure(self, eps) -> tuple[Fraction, Fraction]:
        """Certified rational interval of width <= eps around the real value."""
        eps = Fraction(eps)
        if self.is_rational():
            q = self.coeffs[0]
            return (q, q)
        root = self.field.root
        width = root.hi - root.lo if root.hi > root.lo else Fraction(1, 4)
        while True:
            lo, hi = _interval_eval(self.coeffs, root.lo, root.hi)
            if hi - lo <= eps:
                return (lo, hi)
            width /= 16
            root = root.refine(width)

    def sign(self) -> int:
        if self.is_zero():
            return 0
        if self.is_rational():
            q = self.coeffs[0]
            return 1 if q > 0 else -1
        root = self.field.root
        width = root.hi - root.lo if root.hi > root.lo else Fraction(1, 4)
        while True:
            lo, hi = _interval_eval(self.coeffs, root.lo, root.hi)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            width /= 16
            root = root.refine(width)

    def to_float(self) -> float:
        lo, hi = self.enclosure(Fraction(1, 1 << 64))
        return float((lo + hi) / 2)

    def __float__(self):
        return self.to_float()

    def __repr__(self):
        return f"NFElement({list(self.coeffs)}, ~{self.to_float():.10g})"


def _interval_eval(coeffs, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Horner evaluation of a polynomial over the interval [lo, hi]."""
    alo = ahi = Fraction(0)
    for c in reversed(coeffs):
        cands = (alo * lo, alo * hi, ahi * lo, ahi * hi)
        alo, ahi = min(cands) + c, max(cands) + c
    return alo, ahi
