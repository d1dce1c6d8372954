"""Dense univariate polynomials over a prime field F_p, p < 2**31.

Coefficients live in numpy int64 arrays (ascending degree, no trailing
zeros), which keeps every elementwise operation exact: residues are
below 2**31, so sums fit in 63 bits and scalar products in 62.

Large products go through Kronecker substitution: coefficients are
packed into 96-bit slots of one huge integer (pure numpy byte
shuffling), multiplied once by GMP, and folded back mod p.  With
96-bit slots the packing is safe for products of length up to 2**33.
Exact division uses Newton inversion of the reversed divisor, so the
whole iteration pipeline runs in softly-linear time; degree 10**7
operands are routine.

Prime choice: the shadow arithmetic draws from ``SHADOW_PRIMES``, the
largest primes below 2**31.  Bad primes (a leading coefficient or a
denominator vanishing mod p) are detected at reduction time and raise
``BadPrimeError`` so the caller can retry with the next prime.
"""

from __future__ import annotations

from typing import Sequence

import gmpy2
import numpy as np

_SLOT_BYTES = 12  # 96-bit Kronecker slots
_SCHOOLBOOK_MAX = 48
_DIV_SCHOOLBOOK_MAX = 512

# largest primes below 2**31, probed in order when a prime is rejected
SHADOW_PRIMES = (
    2147483647, 2147483629, 2147483587, 2147483579, 2147483563,
    2147483549, 2147483543, 2147483497, 2147483489, 2147483477,
    2147483423, 2147483399, 2147483353, 2147483323, 2147483269,
    2147483249, 2147483237, 2147483179, 2147483171, 2147483137,
)


class BadPrimeError(ValueError):
    """Raised when a reduction or shadow step detects an unusable prime."""


def _strip(c: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return c[:0]
    return c[: nz[-1] + 1]


class FpPoly:
    """Immutable dense polynomial over F_p (characteristic p)."""

    __slots__ = ("c", "p")

    def __init__(self, coeffs, p: int, *, _trusted: bool = False):
        if not _trusted:
            arr = np.asarray(coeffs, dtype=np.int64) % p
            arr = _strip(arr.copy())
        else:
            arr = coeffs
        arr.setflags(write=False)
        object.__setattr__(self, "c", arr)
        object.__setattr__(self, "p", p)

    def __setattr__(self, *a):
        raise AttributeError("FpPoly is immutable")

    @classmethod
    def zero(cls, p: int) -> "FpPoly":
        return cls(np.zeros(0, dtype=np.int64), p, _trusted=True)

    @classmethod
    def const(cls, v: int, p: int) -> "FpPoly":
        return cls([v % p], p)

    @property
    def char(self) -> int:
        return self.p

    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return len(self.c) == 0

    def leading(self) -> int:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return int(self.c[-1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, FpPoly):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.c, other.c)

    def __hash__(self):
        return hash((self.p, self.c.tobytes()))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def _check(self, other: "FpPoly"):
        if self.p != other.p:
            raise ValueError("mixed characteristics")

    # -- ring ops ------------------------------------------------------

    def __add__(self, other: "FpPoly") -> "FpPoly":
        self._check(other)
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = a.copy()
        out[: len(b)] = (out[: len(b)] + b) % self.p
        return FpPoly(_strip(out), self.p, _trusted=True)

    def __neg__(self) -> "FpPoly":
        return FpPoly((self.p - self.c) % self.p, self.p, _trusted=True)

    def __sub__(self, other: "FpPoly") -> "FpPoly":
        self._check(other)
        a, b = self.c, other.c
        n = max(len(a), len(b))
        out = np.zeros(n, dtype=np.int64)
        out[: len(a)] = a
        out[: len(b)] -= b
        out %= self.p
        return FpPoly(_strip(out), self.p, _trusted=True)

    def scale(self, v: int) -> "FpPoly":
        v %= self.p
        if v == 0:
            return FpPoly.zero(self.p)
        return FpPoly((self.c * v) % self.p, self.p, _trusted=True)

    def shift(self, k: int) -> "FpPoly":
        if self.is_zero():
            return self
        out = np.concatenate([np.zeros(k, dtype=np.int64), self.c])
        return FpPoly(out, self.p, _trusted=True)

    def __mul__(self, other: "FpPoly") -> "FpPoly":
        self._check(other)
        a, b = self.c, other.c
        if len(a) == 0 or len(b) == 0:
            return FpPoly.zero(self.p)
        if min(len(a), len(b)) <= _SCHOOLBOOK_MAX:
            return FpPoly(_mul_schoolbook(a, b, self.p), self.p, _trusted=True)
        return FpPoly(_mul_kronecker(a, b, self.p), self.p, _trusted=True)

    def square(self) -> "FpPoly":
        return self * self

    def truncate(self, n: int) -> "FpPoly":
        """Coefficients below degree n (reduction mod t**n)."""
        return FpPoly(_strip(self.c[:n].copy()), self.p, _trusted=True)

    def reverse(self, n: int | None = None) -> "FpPoly":
        """Reverse the coefficients of a degree-(n) window."""
        if n is None:
            n = self.degree()
        out = np.zeros(n + 1, dtype=np.int64)
        m = min(len(self.c), n + 1)
        out[n + 1 - m :] = self.c[:m][::-1]
        return FpPoly(_strip(out), self.p, _trusted=True)

    def monic(self) -> "FpPoly":
        if self.is_zero():
            return self
        lead = int(self.c[-1])
        if lead == 1:
            return self
        inv = pow(lead, -1, self.p)
        return self.scale(inv)

    # -- division ------------------------------------------------------

    def divmod(self, other: "FpPoly") -> tuple["FpPoly", "FpPoly"]:
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.degree() < other.degree():
            return FpPoly.zero(self.p), self
        qdeg = self.degree() - other.degree()
        if qdeg <= _DIV_SCHOOLBOOK_MAX or other.degree() <= 16:
            return self._divmod_schoolbook(other)
        q = _div_newton(self, other, qdeg)
        r = self - q * other
        return q, r

    def _divmod_schoolbook(self, other: "FpPoly") -> tuple["FpPoly", "FpPoly"]:
        p = self.p
        num = self.c.copy()
        den = other.c
        dd = len(den) - 1
        inv_lead = pow(int(den[-1]), -1, p)
        q = np.zeros(len(num) - dd, dtype=np.int64)
        for k in range(len(num) - 1, dd - 1, -1):
            c = (num[k] * inv_lead) % p
            if c:
                q[k - dd] = c
                num[k - dd : k + 1] = (num[k - dd : k + 1] - c * den) % p
        return (
            FpPoly(_strip(q), p, _trusted=True),
            FpPoly(_strip(num[:dd].copy()), p, _trusted=True),
        )

    def exact_div(self, other: "FpPoly") -> "FpPoly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ValueError("exact_div: division is not exact")
        return q

    def exact_div_fast(self, other: "FpPoly", rng=None) -> "FpPoly":
        """Exact quotient without forming the remainder product.

        The Newton quotient is certified by evaluating q*other - self at
        random points instead of a full-size multiplication; a mismatch
        (division was not exact after all) raises ValueError.
        """
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        qdeg = self.degree() - other.degree()
        if qdeg < 0:
            raise ValueError("exact_div: division is not exact")
        if qdeg <= _DIV_SCHOOLBOOK_MAX or other.degree() <= 16:
            return self.exact_div(other)
        q = _div_newton(self, other, qdeg)
        if rng is None:
            rng = np.random.default_rng(0xD1517)
        for _ in range(3):
            x = int(rng.integers(2, self.p - 1))
            if (q(x) * other(x) - self(x)) % self.p != 0:
                raise ValueError("exact_div: division is not exact")
        return q

    def gcd(self, other: "FpPoly") -> "FpPoly":
        """Monic gcd via an in-place Euclid loop on raw arrays."""
        if self.is_zero():
            return other.monic()
        if other.is_zero():
            return self.monic()
        g = _gcd_arrays(self.c.copy(), other.c.copy(), self.p)
        return FpPoly(g, self.p, _trusted=True).monic()

    # -- evaluation ------------------------------------------------------

    def __call__(self, x: int) -> int:
        """Evaluate at a point of F_p, block-Horner so numpy stays exact."""
        p = self.p
        x %= p
        c = self.c
        if len(c) == 0:
            return 0
        block = 4096
        powers = np.empty(min(block, len(c)), dtype=np.int64)
        acc_pow = 1
        for i in range(len(powers)):
            powers[i] = acc_pow
            acc_pow = (acc_pow * x) % p
        xb = pow(x, len(powers), p)
        acc = 0
        for start in range(((len(c) - 1) // len(powers)) * len(powers), -1, -len(powers)):
            chunk = c[start : start + len(powers)]
            # products < 2**62, partial sums of < 2**31 values stay exact
            val = int(((chunk * powers[: len(chunk)]) % p).sum() % p)
            acc = (acc * xb + val) % p
        return acc

    def derivative(self) -> "FpPoly":
        if len(self.c) <= 1:
            return FpPoly.zero(self.p)
        idx = np.arange(1, len(self.c), dtype=np.int64) % self.p
        return FpPoly((self.c[1:] * idx) % self.p, self.p)

    def __repr__(self):
        if self.degree() > 8:
            return f"FpPoly(deg={self.degree()}, p={self.p})"
        return f"FpPoly({list(map(int, self.c))}, p={self.p})"


def _gcd_arrays(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Euclid on mutable coefficient arrays with manual end tracking.

    One vectorized axpy per eliminated degree and no allocations in the
    loop, so the cost is O(d) numpy calls instead of O(d) divmod objects.
    """
    ea, eb = len(a), len(b)
    while eb:
        if ea < eb:
            a, b = b, a
            ea, eb = eb, ea
        inv = pow(int(b[eb - 1]), -1, p)
        while ea >= eb:
            f = (int(a[ea - 1]) * inv) % p
            if f:
                lo = ea - eb
                a[lo:ea] = (a[lo:ea] - f * b[:eb]) % p
            ea -= 1
            while ea and a[ea - 1] == 0:
                ea -= 1
            if ea == 0:
                break
        a, b = b, a
        ea, eb = eb, ea
    return a[:ea].copy()


# ---------------------------------------------------------------------------
# multiplication kernels


def _mul_schoolbook(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if len(a) > len(b):
        a, b = b, a
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for i in range(len(a)):
        v = int(a[i])
        if v:
            out[i : i + len(b)] = (out[i : i + len(b)] + v * b) % p
    return _strip(out)


def _pack(arr: np.ndarray) -> "gmpy2.mpz":
    """Pack residues (< 2**31) into 96-bit little-endian slots."""
    n = len(arr)
    words = np.zeros((n, 3), dtype=np.uint32)
    words[:, 0] = arr.astype(np.uint32)
    return gmpy2.mpz.from_bytes(words.tobytes(), "little")


def _unpack_mod(val: "gmpy2.mpz", n: int, p: int) -> np.ndarray:
    """Unpack n 96-bit slots of a nonnegative integer, each reduced mod p."""
    raw = val.to_bytes(n * _SLOT_BYTES, "little")
    w = np.frombuffer(raw, dtype="<u4").reshape(n, 3).astype(np.int64)
    c1 = (1 << 32) % p
    c2 = (1 << 64) % p
    t1 = (w[:, 1] % p) * c1 % p
    t2 = (w[:, 2] % p) * c2 % p
    return (w[:, 0] % p + t1 + t2) % p


def _mul_kronecker(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    n = len(a) + len(b) - 1
    prod = _pack(a) * _pack(b)
    return _strip(_unpack_mod(prod, n, p))


# ---------------------------------------------------------------------------
# Newton inversion and fast exact division


def _inv_series_seed(f: FpPoly, n: int) -> FpPoly:
    """Series inverse by the triangular recurrence (n <= 64 only)."""
    p = f.p
    inv0 = pow(int(f.c[0]), -1, p)
    m = min(n, len(f.c))
    fc = np.zeros(n, dtype=np.int64)
    fc[:m] = f.c[:m]
    g = np.zeros(n, dtype=np.int64)
    g[0] = inv0
    for k in range(1, n):
        prods = (fc[1 : k + 1] * g[k - 1 :: -1][:k]) % p
        g[k] = (-inv0 * int(prods.sum() % p)) % p
    return FpPoly(g, p)


def _inv_series(f: FpPoly, n: int) -> FpPoly:
    """Inverse of f mod t**n; f(0) must be a unit."""
    p = f.p
    c0 = int(f.c[0]) if len(f.c) else 0
    if c0 == 0:
        raise ZeroDivisionError("series inverse needs a unit constant term")
    if n <= 64:
        return _inv_series_seed(f, n)
    prec = 64
    g = _inv_series_seed(f, prec)
    while prec < n:
        prec = min(2 * prec, n)
        # g <- g*(2 - f*g) mod t**prec
        fg = (f.truncate(prec) * g).truncate(prec)
        two_minus = FpPoly.const(2, p) - fg
        g = (g * two_minus).truncate(prec)
    return g.truncate(n)


def _div_newton(num: FpPoly, den: FpPoly, qdeg: int) -> FpPoly:
    """Quotient floor(num/den) via reversal + series inversion."""
    p = num.p
    rn = num.reverse(num.degree())
    rd = den.reverse(den.degree())
    inv = _inv_series(rd, qdeg + 1)
    q_rev = (rn * inv).truncate(qdeg + 1)
    return q_rev.reverse(qdeg)


# ---------------------------------------------------------------------------
# reductions from characteristic zero


def reduce_int_coeffs(cs: Sequence[int], p: int) -> FpPoly:
    """Reduce integer coefficients mod p; rejects p if the degree drops."""
    arr = np.array([c % p for c in cs], dtype=np.int64)
    if len(arr) and arr[-1] == 0:
        raise BadPrimeError(f"prime rejected: leading coefficient vanishes mod {p}")
    return FpPoly(arr, p, _trusted=True)


def reduce_fraction_coeffs(cs, p: int) -> FpPoly:
    """Reduce Fraction coefficients mod p; rejects p on any denominator hit."""
    out = []
    for c in cs:
        if c.denominator % p == 0:
            raise BadPrimeError(f"prime rejected: denominator divisible by {p}")
        out.append((c.numerator % p) * pow(c.denominator % p, -1, p) % p)
    arr = np.array(out, dtype=np.int64)
    if len(arr) and arr[-1] == 0:
        raise BadPrimeError(f"prime rejected: leading coefficient vanishes mod {p}")
    return FpPoly(arr, p, _trusted=True)
