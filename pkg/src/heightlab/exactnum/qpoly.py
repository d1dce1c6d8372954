"""Dense univariate polynomials with exact rational coefficients.

A polynomial is stored as a tuple of ``Fraction`` coefficients, lowest
degree first, with no trailing zeros; the zero polynomial is the empty
tuple.  All operations are exact and return new immutable values, so
``Poly`` objects can be shared freely between threads.

Multiplication switches to Kronecker substitution (one big-integer
product through gmpy2/GMP) once the operands are large enough for
schoolbook to hurt; everything else is textbook dense arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

import gmpy2

Coeffable = Union[int, Fraction, "Poly"]

_KRONECKER_MIN = 48  # smaller products stay schoolbook


def _lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


class Poly:
    """Immutable dense polynomial over the rationals (characteristic 0)."""

    __slots__ = ("coeffs",)

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable[Union[int, Fraction]] = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):
        raise AttributeError("Poly is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls) -> "Poly":
        return cls(())

    @classmethod
    def one(cls) -> "Poly":
        return cls((1,))

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def const(cls, c) -> "Poly":
        return cls((Fraction(c),))

    @classmethod
    def monomial(cls, k: int, c=1) -> "Poly":
        return cls((0,) * k + (Fraction(c),))

    # -- basic queries -------------------------------------------------

    @property
    def char(self) -> int:
        """Characteristic of the coefficient field (0 for the rationals)."""
        return 0

    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Fraction:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly((other,))
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    # -- ring operations ----------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly((other,))
        return NotImplemented

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return -(self - other)

    def __mul__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(())
        if min(len(a), len(b)) < _KRONECKER_MIN:
            out = [Fraction(0)] * (len(a) + len(b) - 1)
            if len(a) > len(b):
                a, b = b, a
            for i, c in enumerate(a):
                if c:
                    for j, d in enumerate(b):
                        out[i + j] += c * d
            return Poly(out)
        return _mul_kronecker(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __divmod__(self, other) -> tuple["Poly", "Poly"]:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        num = list(self.coeffs)
        den = other.coeffs
        dd = len(den) - 1
        if len(num) - 1 < dd:
            return Poly(()), self
        inv_lead = 1 / den[-1]
        q = [Fraction(0)] * (len(num) - dd)
        for k in range(len(num) - 1, dd - 1, -1):
            c = num[k] * inv_lead
            if c:
                q[k - dd] = c
                for i in range(dd + 1):
                    num[k - dd + i] -= c * den[i]
        return Poly(q), Poly(num[:dd])

    def __floordiv__(self, other) -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "Poly":
        return divmod(self, other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        """Quotient of an exact division; raises if the remainder is nonzero."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if other.degree() == 0:
            inv = 1 / other[0]
            return Poly(tuple(c * inv for c in self.coeffs))
        if self.is_integral() and other.is_integral():
            return self._exact_div_int(other)
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ValueError("exact_div: division is not exact")
        return q

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def _exact_div_int(self, other: "Poly") -> "Poly":
        """Integer synthetic division; valid when the quotient is exact and
        the divisor is primitive (every intermediate lead divides evenly)."""
        num = [c.numerator for c in self.coeffs]
        den = [c.numerator for c in other.coeffs]
        dd = len(den) - 1
        lead = den[-1]
        if len(num) - 1 < dd:
            raise ValueError("exact_div: division is not exact")
        q = [0] * (len(num) - dd)
        for k in range(len(num) - 1, dd - 1, -1):
            c, rem = divmod(num[k], lead)
            if rem:
                # fall back to rational division (non-primitive divisor)
                qq, r = divmod(self, other)
                if not r.is_zero():
                    raise ValueError("exact_div: division is not exact")
                return qq
            if c:
                q[k - dd] = c
                for i in range(dd + 1):
                    num[k - dd + i] -= c * den[i]
        if any(num[:dd]):
            raise ValueError("exact_div: division is not exact")
        return Poly(tuple(Fraction(c) for c in q))

    # -- euclidean structure --------------------------------------------

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.coeffs[-1]
        if lead == 1:
            return self
        return Poly(tuple(c / lead for c in self.coeffs))

    def gcd(self, other: "Poly") -> "Poly":
        """Monic greatest common divisor.

        A single mod-p gcd certifies coprimality cheaply (the modular gcd
        degree only ever overestimates for primes keeping both leading
        coefficients alive); the exact Euclid walk with primitive
        rescaling runs only when a common factor actually exists.
        """
        if self.is_zero():
            return other.monic()
        if other.is_zero():
            return self.monic()
        if min(self.degree(), other.degree()) == 0:
            return Poly.one()
        if self.degree() + other.degree() > 24 and _coprime_mod_p(self, other):
            return Poly.one()
        a, b = self.primitive_part(), other.primitive_part()
        while not b.is_zero():
            # rescaling keeps the Fraction numerators from snowballing
            a, b = b, (a % b).primitive_part()
        return a.monic()

    def xgcd(self, other: "Poly") -> tuple["Poly", "Poly", "Poly"]:
        """Extended gcd: returns (g, u, v) with u*self + v*other = g, g monic."""
        r0, r1 = self, other
        s0, s1 = Poly.one(), Poly.zero()
        t0, t1 = Poly.zero(), Poly.one()
        while not r1.is_zero():
            q, r = divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if r0.is_zero():
            return r0, s0, t0
        lead = r0.leading()
        return r0.monic(), Poly(tuple(c / lead for c in s0.coeffs)), Poly(
            tuple(c / lead for c in t0.coeffs)
        )

    def content(self) -> Fraction:
        """Rational content: gcd of numerators over lcm of denominators (sign of lead)."""
        if self.is_zero():
            return Fraction(0)
        num = 0
        den = 1
        for c in self.coeffs:
            num = math.gcd(num, c.numerator)
            den = _lcm(den, c.denominator)
        cont = Fraction(num, den)
        return -cont if self.coeffs[-1] < 0 else cont

    def primitive_part(self) -> "Poly":
        """Integer-coefficient representative with content 1 and positive lead."""
        if self.is_zero():
            return self
        cont = self.content()
        return Poly(tuple(c / cont for c in self.coeffs))

    def derivative(self) -> "Poly":
        return Poly(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def squarefree_part(self) -> "Poly":
        """Monic product of the distinct irreducible factors."""
        if self.degree() <= 0:
            return self.monic()
        return self.exact_div(self.gcd(self.derivative())).monic()

    # -- evaluation ------------------------------------------------------

    def __call__(self, x):
        """Horner evaluation; exact for Fraction/int input."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_float(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def shift(self, k: int) -> "Poly":
        """Multiply by t**k."""
        if self.is_zero():
            return self
        return Poly((Fraction(0),) * k + self.coeffs)

    # -- presentation -----------------------------------------------------

    def __repr__(self) -> str:
        return f"Poly({self!s})"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            if i == 0:
                term = str(c)
            else:
                t = "t" if i == 1 else f"t^{i}"
                if c == 1:
                    term = t
                elif c == -1:
                    term = f"-{t}"
                else:
                    term = f"{c}*{t}"
            parts.append(term)
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out


def _mul_kronecker(a: Poly, b: Poly) -> Poly:
    """Exact product via Kronecker substitution into one GMP integer multiply."""
    da = 1
    for c in a.coeffs:
        da = _lcm(da, c.denominator)
    db = 1
    for c in b.coeffs:
        db = _lcm(db, c.denominator)
    ia = [int(c * da) for c in a.coeffs]
    ib = [int(c * db) for c in b.coeffs]
    prod = _int_poly_mul(ia, ib)
    scale = Fraction(1, da * db)
    return Poly(tuple(c * scale for c in prod))


def _int_poly_mul(ia: Sequence[int], ib: Sequence[int]) -> list[int]:
    """Multiply integer coefficient lists via signed Kronecker packing."""
    n = len(ia) + len(ib) - 1
    bits_a = max(abs(c).bit_length() for c in ia)
    bits_b = max(abs(c).bit_length() for c in ib)
    slot = bits_a + bits_b + (min(len(ia), len(ib))).bit_length() + 2
    va = _pack_signed(ia, slot)
    vb = _pack_signed(ib, slot)
    prod = int(va * vb)
    return _unpack_signed(prod, slot, n)


def _pack_signed(cs: Sequence[int], slot: int) -> "gmpy2.mpz":
    pos = [c if c > 0 else 0 for c in cs]
    neg = [-c if c < 0 else 0 for c in cs]
    v = gmpy2.pack(pos, slot)
    if any(neg):
        v -= gmpy2.pack(neg, slot)
    return v


def _unpack_signed(v: int, slot: int, n: int) -> list[int]:
    # digits are balanced around 0: borrow when a slot exceeds half range
    neg = v < 0
    if neg:
        v = -v
    half = 1 << (slot - 1)
    full = 1 << slot
    digits = [int(d) for d in gmpy2.unpack(gmpy2.mpz(v), slot)]
    out = []
    carry = 0
    for d in digits:
        d += carry
        if d >= half:
            d -= full
            carry = 1
        else:
            carry = 0
        out.append(-d if neg else d)
    if carry:
        out.append(-1 if neg else 1)
    del out[n:]
    while len(out) < n:
        out.append(0)
    return out


def poly_from_int_coeffs(cs: Sequence[int]) -> Poly:
    return Poly(tuple(Fraction(c) for c in cs))


_CERT_PRIMES = (2147483647, 2147483629, 2147483587, 2147483579, 2147483563)


def _coprime_mod_p(a: Poly, b: Poly) -> bool:
    """True when a modular image certifies gcd(a, b) = 1.

    Clears denominators, then for a prime preserving both leading
    coefficients computes the gcd of the images; gcd 1 mod p implies
    gcd 1 over Q.  Returns False when no certificate was obtained
    (which only means the caller must do the exact computation).
    """
    from .fppoly import FpPoly

    ia = _cleared_int_coeffs(a)
    ib = _cleared_int_coeffs(b)
    for p in _CERT_PRIMES:
        if ia[-1] % p == 0 or ib[-1] % p == 0:
            continue
        fa = FpPoly([c % p for c in ia], p)
        fb = FpPoly([c % p for c in ib], p)
        return fa.gcd(fb).degree() == 0
    return False


def _cleared_int_coeffs(p: Poly) -> list[int]:
    den = 1
    for c in p.coeffs:
        den = _lcm(den, c.denominator)
    return [int(c * den) for c in p.coeffs]
