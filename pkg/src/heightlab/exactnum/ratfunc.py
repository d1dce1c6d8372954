"""Normalized rational functions over Q(t) or F_p(t).

A ``RationalFunction`` is a reduced fraction of dense polynomials with
a monic denominator; ``ratfun_normalize`` is the only constructor that
does real work.  ``reduce_mod_p`` maps a rational function over Q(t)
coefficientwise into F_p(t), rejecting primes that would change any
degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .fppoly import BadPrimeError, FpPoly, reduce_fraction_coeffs
from .qpoly import Poly

AnyPoly = Union[Poly, FpPoly]


@dataclass(frozen=True)
class RationalFunction:
    """Reduced num/den with monic den; den is nonzero by construction."""

    num: AnyPoly
    den: AnyPoly

    @property
    def char(self) -> int:
        return self.num.char

    def degree(self) -> int:
        """Degree of the map: max of numerator and denominator degrees."""
        if self.num.is_zero():
            return 0
        return max(self.num.degree(), self.den.degree())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return ratfun_normalize(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return ratfun_normalize(
            self.num * other.den - other.num * self.den, self.den * other.den
        )

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return ratfun_normalize(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        return ratfun_normalize(self.num * other.den, self.den * other.num)

    def __str__(self):
        if self.den.degree() == 0:
            return f"({self.num})"
        return f"({self.num}) / ({self.den})"


def ratfun_normalize(num: AnyPoly, den: AnyPoly) -> RationalFunction:
    """Unique reduced, monic-denominator representative of num/den.

    Raises ZeroDivisionError on a zero denominator.
    """
    if den.is_zero():
        raise ZeroDivisionError("division by zero in function field")
    if num.is_zero():
        return RationalFunction(num, _one_like(den))
    g = num.gcd(den)
    if g.degree() > 0:
        num = num.exact_div(g)
        den = den.exact_div(g)
    lead = den.leading()
    den = den.monic()
    num = _scale_by_inverse_lead(num, lead)
    return RationalFunction(num, den)


def _one_like(p: AnyPoly) -> AnyPoly:
    if isinstance(p, FpPoly):
        return FpPoly.const(1, p.p)
    return Poly.one()


def _scale_by_inverse_lead(num: AnyPoly, lead) -> AnyPoly:
    if isinstance(num, FpPoly):
        return num.scale(pow(int(lead), -1, num.p))
    return Poly(tuple(c / lead for c in num.coeffs))


def reduce_mod_p(r: RationalFunction, p: int) -> RationalFunction:
    """Coefficientwise reduction of a Q(t) rational function into F_p(t).

    The prime is rejected (BadPrimeError) if it divides any coefficient
    denominator or kills a leading coefficient, so degrees are always
    preserved; callers retry with another prime.
    """
    if r.char != 0:
        raise ValueError("already in positive characteristic")
    num = reduce_fraction_coeffs(r.num.coeffs, p)
    den = reduce_fraction_coeffs(r.den.coeffs, p)
    if den.is_zero():
        raise BadPrimeError(f"prime rejected: denominator vanishes mod {p}")
    return RationalFunction(num.scale(pow(den.leading(), -1, p)), den.monic())
