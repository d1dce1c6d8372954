"""One-parameter families of (2,2,2) hypersurfaces in (P^1)^3 and the
exact iteration of marked rational sections under words in the three
Vieta involutions.

Coordinates of a section are projective pairs of coprime integer-
primitive polynomials in the base parameter t.  Substituting two
coordinates into the trihomogeneous form leaves a binary quadratic in
the third; the involution swaps its roots by the homogeneous Vieta
relations.  For a point [p : q] on the quadratic Q0*u^2 + Q1*u*v +
Q2*v^2, membership forces p | Q2 and q | Q0, so the conjugate root is
the *reduced* pair (Q2/p, Q0/q); the sum-relation forms are kept as
fallbacks and consistency checks.

Exact iteration over Q(t) is capped (degrees and coefficient bits grow
like lambda^n and explode doubly exponentially); past the cap the
orbit continues as mod-p shadows over at least two 31-bit primes that
track coordinate degrees only, cross-checked against each other and
against the exact prefix.
"""

from __future__ import annotations

import hashlib
import json
import threading
import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import gcd as int_gcd
from typing import Optional, Sequence

import numpy as np

from .exactnum import BadPrimeError, FpPoly, Poly, reduce_fraction_coeffs
from .exactnum.fppoly import SHADOW_PRIMES
from .nslattice import (
    DivisorClass,
    IntersectionForm,
    LatticeMap,
    compose_word,
    dynamical_degree,
    eigendivisor,
    is_hyperbolic,
    wehler_222_lattice,
)

DEFAULT_DEGREE_CAP = 20_000
DEFAULT_EXACT_BUDGET_BYTES = 48 * 2**20  # exact pairs beyond this switch to shadows


class DegenerateIterationError(RuntimeError):
    """The section cannot be iterated: the coordinate quadratic collapses."""

    def __init__(self, message: str, step: Optional[int] = None):
        super().__init__(message)
        self.step = step


class IterationLimitError(RuntimeError):
    """Exact iteration hit a resource guard; callers switch to shadows."""


class DegreeCapError(IterationLimitError):
    def __init__(self, step: int, degree: int):
        super().__init__(f"degree cap exceeded at step {step} (degree {degree})")
        self.step = step
        self.degree = degree


class ExactBudgetError(IterationLimitError):
    def __init__(self, step: int, nbytes: int):
        super().__init__(
            f"exact coefficient budget exceeded at step {step} ({nbytes} bytes)"
        )
        self.step = step
        self.nbytes = nbytes


class FamilyValidationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# projective coordinate pairs


@dataclass(frozen=True)
class Pair:
    """Projective pair [p : q] of coprime integer-primitive polynomials.

    Normalization: common polynomial factor and rational content removed,
    and the leading coefficient of q (of p when q = 0) is positive.  This
    is the unique integer representative of the monic-q normalization up
    to a positive unit.
    """

    p: Poly
    q: Poly

    @classmethod
    def make(cls, p: Poly, q: Poly) -> "Pair":
        if p.is_zero() and q.is_zero():
            raise ValueError("zero projective pair")
        if not p.is_zero() and not q.is_zero():
            g = p.gcd(q)
            if g.degree() > 0:
                p = p.exact_div(g)
                q = q.exact_div(g)
        cp = p.content() if not p.is_zero() else None
        cq = q.content() if not q.is_zero() else None
        if cp is None:
            scale = abs(cq)
        elif cq is None:
            scale = abs(cp)
        else:
            scale = Fraction(
                int_gcd(cp.numerator * cq.denominator, cq.numerator * cp.denominator),
                cp.denominator * cq.denominator,
            )
        anchor = q if not q.is_zero() else p
        if anchor.leading() < 0:
            scale = -scale
        p = Poly(tuple(c / scale for c in p.coeffs))
        q = Poly(tuple(c / scale for c in q.coeffs))
        return cls(p, q)

    @classmethod
    def constant(cls, a, b) -> "Pair":
        return cls.make(Poly.const(a), Poly.const(b))

    def degree(self) -> int:
        return max(self.p.degree(), self.q.degree(), 0)

    def monic_form(self) -> tuple[Poly, Poly]:
        anchor = self.q if not self.q.is_zero() else self.p
        lead = anchor.leading()
        return (
            Poly(tuple(c / lead for c in self.p.coeffs)),
            Poly(tuple(c / lead for c in self.q.coeffs)),
        )

    def eval_fraction(self, t: Fraction) -> tuple[Fraction, Fraction]:
        return self.p(t), self.q(t)

    def bit_size(self) -> int:
        bits = 0
        for poly in (self.p, self.q):
            for c in poly.coeffs:
                bits += c.numerator.bit_length() + c.denominator.bit_length()
        return bits

    def __str__(self):
        return f"[{self.p} : {self.q}]"


@dataclass(frozen=True)
class MarkedSection:
    """A rational section: one projective polynomial pair per P^1 factor."""

    pairs: tuple[Pair, Pair, Pair]

    def degrees(self) -> tuple[int, int, int]:
        return tuple(pr.degree() for pr in self.pairs)

    def is_constant(self) -> bool:
        return self.degrees() == (0, 0, 0)

    def bit_size(self) -> int:
        return sum(pr.bit_size() for pr in self.pairs)

    def __str__(self):
        return ", ".join(str(p) for p in self.pairs)


# ---------------------------------------------------------------------------
# polynomial string parsing (family file grammar)


class PolyParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str):
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.pos = pos


class _PolyParser:
    """Recursive descent for: rationals, t, + - * ^, parentheses."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def parse(self) -> Poly:
        value = self._expr()
        self._skip_ws()
        if self.pos != len(self.text):
            raise PolyParseError("unexpected trailing input", self.pos, self.text)
        return value

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expr(self) -> Poly:
        value = self._term()
        while True:
            ch = self._peek()
            if ch == "+":
                self.pos += 1
                value = value + self._term()
            elif ch == "-":
                self.pos += 1
                value = value - self._term()
            else:
                return value

    def _term(self) -> Poly:
        value = self._unary()
        while self._peek() == "*":
            self.pos += 1
            value = value * self._unary()
        return value

    def _unary(self) -> Poly:
        sign = 1
        while self._peek() in "+-":
            if self.text[self.pos] == "-":
                sign = -sign
            self.pos += 1
        value = self._power()
        return value if sign == 1 else -value

    def _power(self) -> Poly:
        base = self._atom()
        if self._peek() == "^":
            self.pos += 1
            self._skip_ws()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if start == self.pos:
                raise PolyParseError("expected integer exponent", self.pos, self.text)
            return base ** int(self.text[start : self.pos])
        return base

    def _atom(self) -> Poly:
        ch = self._peek()
        if ch == "(":
            self.pos += 1
            value = self._expr()
            if self._peek() != ")":
                raise PolyParseError("expected ')'", self.pos, self.text)
            self.pos += 1
            return value
        if ch == "t":
            self.pos += 1
            return Poly.x()
        if ch.isdigit():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            num = int(self.text[start : self.pos])
            if self._peek() == "/":
                self.pos += 1
                self._skip_ws()
                dstart = self.pos
                while self.pos < len(self.text) and self.text[self.pos].isdigit():
                    self.pos += 1
                if dstart == self.pos:
                    raise PolyParseError("expected denominator", self.pos, self.text)
                den = int(self.text[dstart : self.pos])
                if den == 0:
                    raise PolyParseError("zero denominator", dstart, self.text)
                return Poly.const(Fraction(num, den))
            return Poly.const(num)
        raise PolyParseError("expected term", self.pos, self.text)


def parse_poly(text: str) -> Poly:
    return _PolyParser(text).parse()


# ---------------------------------------------------------------------------
# the family


MULTIDEGREES = tuple(
    (a, b, c) for a in range(3) for b in range(3) for c in range(3)
)


class SurfaceFamily:
    """A (2,2,2) form with Q[t] coefficients plus an automorphism word.

    ``coeffs`` maps multidegree triples (a, b, c) to polynomials in t;
    the monomial convention is pair_x^(2-a) * secondentry_x^a per factor
    (index counts the power of the second homogeneous coordinate).
    """

    def __init__(
        self,
        coeffs: dict[tuple[int, int, int], Poly],
        word: Sequence[int],
        sections: Sequence[MarkedSection] = (),
        *,
        validate: bool = True,
    ):
        self.coeffs = _normalize_form(coeffs)
        self.word = tuple(int(w) for w in word)
        self.sections = list(sections)
        self.excluded_params: set[Fraction] = set()
        self._excluded_lock = threading.Lock()
        self.form, self.involutions = wehler_222_lattice()
        self._fp_cache: dict[int, dict] = {}
        if validate:
            self.validate()

    # -- validation ----------------------------------------------------

    def validate(self):
        if not self.coeffs:
            raise FamilyValidationError("form is identically zero")
        if not self.word:
            raise FamilyValidationError("automorphism word is empty")
        if any(not 1 <= w <= 3 for w in self.word):
            raise FamilyValidationError("word indices must be in 1..3")
        if not is_hyperbolic(self.lattice_map()):
            raise FamilyValidationError(
                f"word {list(self.word)} is not hyperbolic on the class lattice"
            )
        for i, s in enumerate(self.sections):
            if not self.form_value(s).is_zero():
                raise FamilyValidationError(f"section {i} not on surface")

    # -- lattice data ----------------------------------------------------

    def lattice_map(self) -> LatticeMap:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return compose_word(self.involutions, self.word)

    def dynamical_degree(self):
        return dynamical_degree(self.lattice_map())

    def lambda_float(self) -> float:
        return self.dynamical_degree().to_float()

    def eigendivisor(self, direction: str) -> DivisorClass:
        return eigendivisor(self.lattice_map(), direction, self.form)

    # -- the form ----------------------------------------------------------

    def coeff(self, a: int, b: int, c: int) -> Poly:
        return self.coeffs.get((a, b, c), Poly.zero())

    def form_value(self, s: MarkedSection) -> Poly:
        """F evaluated on the section's polynomial pairs (exact)."""
        xmon = _pair_monomials(s.pairs[0])
        ymon = _pair_monomials(s.pairs[1])
        zmon = _pair_monomials(s.pairs[2])
        total = Poly.zero()
        for (a, b, c), coeff in self.coeffs.items():
            total = total + coeff * xmon[a] * ymon[b] * zmon[c]
        return total

    def quadratic_coeffs(self, i: int, s: MarkedSection) -> tuple[Poly, Poly, Poly]:
        """(Q0, Q1, Q2) of the coordinate-i quadratic along the section."""
        j, k = [x for x in range(3) if x != i]
        mon_j = _pair_monomials(s.pairs[j])
        mon_k = _pair_monomials(s.pairs[k])
        qs = [Poly.zero(), Poly.zero(), Poly.zero()]
        for (mdeg), coeff in self.coeffs.items():
            a = mdeg[i]
            qs[a] = qs[a] + coeff * mon_j[mdeg[j]] * mon_k[mdeg[k]]
        return qs[0], qs[1], qs[2]

    # -- bookkeeping -------------------------------------------------------

    def exclude_param(self, t0: Fraction):
        with self._excluded_lock:
            self.excluded_params.add(Fraction(t0))

    def canonical_dict(self) -> dict:
        return {
            "coeffs": {
                f"{a}{b}{c}": str(self.coeff(a, b, c))
                for (a, b, c) in MULTIDEGREES
                if not self.coeff(a, b, c).is_zero()
            },
            "word": list(self.word),
            "sections": [
                [[str(pr.p), str(pr.q)] for pr in s.pairs] for s in self.sections
            ],
        }

    def content_hash(self) -> str:
        blob = json.dumps(self.canonical_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    # -- prime-field views ---------------------------------------------------

    def fp_coeffs(self, prime: int) -> dict:
        """Family coefficients reduced mod prime (cached); BadPrimeError
        propagates when the prime hits a denominator or leading term."""
        if prime not in self._fp_cache:
            self._fp_cache[prime] = {
                key: reduce_fraction_coeffs(poly.coeffs, prime)
                for key, poly in self.coeffs.items()
            }
        return self._fp_cache[prime]


def _pair_monomials(pr: Pair) -> tuple[Poly, Poly, Poly]:
    """(p^2, p*q, q^2): index is the power of the second entry."""
    return (pr.p * pr.p, pr.p * pr.q, pr.q * pr.q)


def _normalize_form(coeffs: dict) -> dict:
    """Joint integer-primitive scaling of the 27 coefficients.

    The form is projective, so a global rational rescale is harmless and
    keeps the whole iteration pipeline in integer arithmetic.
    """
    nonzero = {k: v for k, v in coeffs.items() if not v.is_zero()}
    if not nonzero:
        return {}
    den = 1
    for poly in nonzero.values():
        for c in poly.coeffs:
            den = den * c.denominator // int_gcd(den, c.denominator)
    num = 0
    for poly in nonzero.values():
        for c in poly.coeffs:
            num = int_gcd(num, c.numerator * den)
    scale = Fraction(den, num if num else 1)
    return {k: Poly(tuple(c * scale for c in v.coeffs)) for k, v in nonzero.items()}


# ---------------------------------------------------------------------------
# involutions on exact sections


def involution_apply(
    fam: SurfaceFamily, i: int, s: MarkedSection
) -> tuple[MarkedSection, bool]:
    """Swap the section to the conjugate root of the coordinate-i quadratic.

    Returns (image section, fixed flag).  Raises DegenerateIterationError
    when the quadratic collapses identically (the section is non-iterable).
    ``i`` is 0-based here; the CLI and family files use 1-based word letters.
    """
    q0, q1, q2 = fam.quadratic_coeffs(i, s)
    if q0.is_zero() and q1.is_zero() and q2.is_zero():
        raise DegenerateIterationError(
            "section lies in ramification/degenerate locus "
            f"(coordinate {i + 1} quadratic vanishes identically)"
        )
    pr = s.pairs[i]
    p, q = pr.p, pr.q
    if p.is_zero():
        # point [0:1]: membership forces Q2 = 0; conjugate is [-Q1 : Q0]
        cand = (-q1, q0)
    elif q.is_zero():
        # point [1:0]: membership forces Q0 = 0; conjugate is [Q2 : -Q1]
        cand = (q2, -q1)
    else:
        r2 = q2.exact_div(p) if not q2.is_zero() else Poly.zero()
        r0 = q0.exact_div(q) if not q0.is_zero() else Poly.zero()
        cand = (r2, r0)
    if cand[0].is_zero() and cand[1].is_zero():
        raise DegenerateIterationError(
            f"section lies in ramification/degenerate locus (coordinate {i + 1})"
        )
    new_pair = Pair.make(cand[0], cand[1])
    # the image must satisfy the same quadratic: definitive consistency check
    resid = q0 * new_pair.p * new_pair.p + q1 * new_pair.p * new_pair.q + q2 * new_pair.q * new_pair.q
    if not resid.is_zero():
        raise AssertionError("conjugate root fails the coordinate quadratic")
    pairs = list(s.pairs)
    fixed = new_pair == pr
    pairs[i] = new_pair
    return MarkedSection(tuple(pairs)), fixed


def automorphism_apply(
    fam: SurfaceFamily,
    s: MarkedSection,
    power: int = 1,
    *,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    byte_budget: Optional[int] = None,
) -> MarkedSection:
    """Apply the family's automorphism word ``power`` times (exact).

    Negative powers use the reversed word (each generator is an
    involution).  Raises DegreeCapError past the degree cap and
    ExactBudgetError past the coefficient byte budget; both are checked
    after every involution because intermediate coordinates outgrow the
    endpoints.
    """
    if power == 0:
        return s
    word = fam.word if power > 0 else tuple(reversed(fam.word))
    cur = s
    step = 0
    for _ in range(abs(power)):
        for letter in word:
            if byte_budget is not None:
                # one involution multiplies the data volume by roughly the
                # lattice growth factor; bail before burning the work
                predicted = cur.bit_size() // 8 * 10
                if predicted > byte_budget:
                    raise ExactBudgetError(step, predicted)
            cur, _ = involution_apply(fam, letter - 1, cur)
            step += 1
            top = max(cur.degrees())
            if top > degree_cap:
                raise DegreeCapError(step, top)
            if byte_budget is not None:
                nbytes = cur.bit_size() // 8
                if nbytes > byte_budget:
                    raise ExactBudgetError(step, nbytes)
    return cur


# ---------------------------------------------------------------------------
# degree pairing against divisor classes


def section_degree_exact(s: MarkedSection, d: DivisorClass):
    """Pairing sum(d_i * deg_i) as an exact field element (or Fraction)."""
    degs = s.degrees()
    total = None
    for c, deg in zip(d.coeffs, degs):
        term = c * deg
        total = term if total is None else total + term
    return total


def section_degree(s: MarkedSection, d: DivisorClass) -> float:
    """Float shadow of the exact degree pairing; nonnegative for nef d."""
    val = section_degree_exact(s, d)
    return float(val) if isinstance(val, (int, Fraction)) else val.to_float()


# ---------------------------------------------------------------------------
# mod-p shadow sections


@dataclass(frozen=True)
class FpPair:
    p: FpPoly
    q: FpPoly

    def degree(self) -> int:
        return max(self.p.degree(), self.q.degree(), 0)

    @classmethod
    def make(cls, p: FpPoly, q: FpPoly, *, gcd_budget: int = 1 << 16) -> "FpPair":
        if p.is_zero() and q.is_zero():
            raise ValueError("zero projective pair mod p")
        if not p.is_zero() and not q.is_zero():
            if min(p.degree(), q.degree()) <= gcd_budget:
                g = p.gcd(q)
                if g.degree() > 0:
                    p = p.exact_div_fast(g)
                    q = q.exact_div_fast(g)
        anchor = q if not q.is_zero() else p
        inv = pow(anchor.leading(), -1, anchor.p)
        return cls(p.scale(inv), q.scale(inv))


@dataclass(frozen=True)
class FpSection:
    pairs: tuple[FpPair, FpPair, FpPair]
    prime: int

    def degrees(self) -> tuple[int, int, int]:
        return tuple(pr.degree() for pr in self.pairs)


def reduce_section(s: MarkedSection, prime: int) -> FpSection:
    pairs = []
    for pr in s.pairs:
        fp = reduce_fraction_coeffs(pr.p.coeffs, prime) if not pr.p.is_zero() else FpPoly.zero(prime)
        fq = reduce_fraction_coeffs(pr.q.coeffs, prime) if not pr.q.is_zero() else FpPoly.zero(prime)
        pairs.append(FpPair.make(fp, fq))
    sec = FpSection(tuple(pairs), prime)
    if sec.degrees() != s.degrees():
        raise BadPrimeError(f"prime rejected: degrees drop mod {prime}")
    return sec


def _fp_pair_monomials(pr: FpPair) -> tuple[FpPoly, FpPoly, FpPoly]:
    return (pr.p * pr.p, pr.p * pr.q, pr.q * pr.q)


def fp_involution_apply(
    fam: SurfaceFamily, i: int, s: FpSection, *, gcd_budget: int, rng
) -> FpSection:
    """Shadow involution: same Vieta step over F_p, degrees only.

    Residual common factors beyond ``gcd_budget`` are left in place (they
    are provably dominated, growth factor <= 5 versus lambda >= 17 for
    hyperbolic words here, and the two-prime cross-check bounds the
    resulting degree error); the quadratic membership of the image is
    verified at random points every step.
    """
    prime = s.prime
    cs = fam.fp_coeffs(prime)
    j, k = [x for x in range(3) if x != i]
    mon_j = _fp_pair_monomials(s.pairs[j])
    mon_k = _fp_pair_monomials(s.pairs[k])
    qs = [FpPoly.zero(prime), FpPoly.zero(prime), FpPoly.zero(prime)]
    crosses: dict[tuple[int, int], FpPoly] = {}
    for (mdeg), coeff in cs.items():
        bj, bk = mdeg[j], mdeg[k]
        if (bj, bk) not in crosses:
            crosses[(bj, bk)] = mon_j[bj] * mon_k[bk]
        qs[mdeg[i]] = qs[mdeg[i]] + coeff * crosses[(bj, bk)]
    q0, q1, q2 = qs
    if q0.is_zero() and q1.is_zero() and q2.is_zero():
        raise BadPrimeError(f"quadratic vanished mod {prime}")
    pr = s.pairs[i]
    p, q = pr.p, pr.q
    if p.is_zero():
        cand = (-q1, q0)
    elif q.is_zero():
        cand = (q2, -q1)
    else:
        r2 = q2.exact_div_fast(p, rng) if not q2.is_zero() else FpPoly.zero(prime)
        r0 = q0.exact_div_fast(q, rng) if not q0.is_zero() else FpPoly.zero(prime)
        cand = (r2, r0)
    if cand[0].is_zero() and cand[1].is_zero():
        raise BadPrimeError(f"degenerate conjugate root mod {prime}")
    new_pair = FpPair.make(cand[0], cand[1], gcd_budget=gcd_budget)
    for _ in range(2):
        x = int(rng.integers(2, prime - 1))
        px, qx = new_pair.p(x), new_pair.q(x)
        if (q0(x) * px * px + q1(x) * px * qx + q2(x) * qx * qx) % prime != 0:
            raise BadPrimeError(f"image fails quadratic mod {prime}")
    pairs = list(s.pairs)
    pairs[i] = new_pair
    return FpSection(tuple(pairs), prime)


def fp_word_apply(
    fam: SurfaceFamily, s: FpSection, reverse: bool, *, gcd_budget: int, rng
) -> FpSection:
    word = tuple(reversed(fam.word)) if reverse else fam.word
    cur = s
    for letter in word:
        cur = fp_involution_apply(fam, letter - 1, cur, gcd_budget=gcd_budget, rng=rng)
    return cur


# ---------------------------------------------------------------------------
# orbit driver: exact prefix, shadow continuation


@dataclass(frozen=True)
class OrbitRecord:
    """One orbit step: signed iterate index, coordinate degrees, and how
    they were obtained ('exact' or 'shadow'); the exact section is kept
    while available."""

    n: int
    degrees: tuple[int, int, int]
    exactness: str
    section: Optional[MarkedSection] = None


@dataclass
class OrbitConfig:
    degree_cap: int = DEFAULT_DEGREE_CAP
    exact_budget_bytes: int = DEFAULT_EXACT_BUDGET_BYTES
    n_primes: int = 2
    gcd_budget: int = 1 << 16
    seed: int = 0

    def __post_init__(self):
        if self.degree_cap < 1 or self.n_primes < 1 or self.exact_budget_bytes < 1:
            raise ValueError("orbit configuration bounds must be positive")


def orbit_degrees(
    fam: SurfaceFamily,
    s: MarkedSection,
    n_max: int,
    direction: int = +1,
    config: Optional[OrbitConfig] = None,
) -> list[OrbitRecord]:
    """Degree triples of f^(direction * n)(s) for n = 0..n_max.

    Runs exactly while the degree cap and byte budget allow, then hands
    off to mod-p shadows over ``n_primes`` primes advanced in lockstep;
    a degree disagreement between primes restarts the shadow run from
    the last exact checkpoint with fresh primes.
    """
    cfg = config or OrbitConfig()
    if direction not in (+1, -1):
        raise ValueError("direction must be +1 or -1")
    records = [OrbitRecord(0, s.degrees(), "exact", s)]
    cur = s
    switch_at = None
    for n in range(1, n_max + 1):
        try:
            nxt = automorphism_apply(
                fam,
                cur,
                1 if direction > 0 else -1,
                degree_cap=cfg.degree_cap,
                byte_budget=cfg.exact_budget_bytes,
            )
        except IterationLimitError:
            switch_at = n - 1
            break
        records.append(OrbitRecord(direction * n, nxt.degrees(), "exact", nxt))
        cur = nxt
    else:
        return records
    if switch_at >= n_max:
        return records
    shadow_records = _shadow_continuation(
        fam, records[switch_at].section, switch_at, n_max, direction, cfg
    )
    return records[: switch_at + 1] + shadow_records


def _shadow_continuation(
    fam: SurfaceFamily,
    checkpoint: MarkedSection,
    n_start: int,
    n_max: int,
    direction: int,
    cfg: OrbitConfig,
) -> list[OrbitRecord]:
    attempts = 0
    prime_pool = list(SHADOW_PRIMES)
    rng = np.random.default_rng((cfg.seed, 0xFACE))
    while attempts < 4:
        primes = []
        shadows = []
        while len(shadows) < cfg.n_primes and prime_pool:
            prime = prime_pool.pop(0)
            try:
                fam.fp_coeffs(prime)
                shadows.append(reduce_section(checkpoint, prime))
                primes.append(prime)
            except BadPrimeError:
                continue
        if len(shadows) < cfg.n_primes:
            raise RuntimeError("ran out of shadow primes")
        out: list[OrbitRecord] = []
        try:
            for n in range(n_start + 1, n_max + 1):
                stepped = [
                    fp_word_apply(fam, sh, direction < 0,
                                  gcd_budget=cfg.gcd_budget, rng=rng)
                    for sh in shadows
                ]
                degs = {sh.degrees() for sh in stepped}
                if len(degs) != 1:
                    raise BadPrimeError("shadow primes disagree on degrees")
                shadows = stepped
                out.append(OrbitRecord(direction * n, stepped[0].degrees(), "shadow"))
            return out
        except BadPrimeError:
            attempts += 1
            continue
    raise RuntimeError("shadow iteration failed repeatedly; orbit flagged partial")


# ---------------------------------------------------------------------------
# exact iteration of a specialized fiber point over Q


@dataclass(frozen=True)
class FiberPointQ:
    """A point of one fiber with exact rational projective pairs."""

    t: Fraction
    pairs: tuple[tuple[Fraction, Fraction], ...]


def specialize_section(fam: SurfaceFamily, s: MarkedSection, t: Fraction) -> FiberPointQ:
    pairs = []
    for pr in s.pairs:
        a, b = pr.eval_fraction(Fraction(t))
        if a == 0 and b == 0:
            fam.exclude_param(Fraction(t))
            raise DegenerateIterationError(f"section pair collapses at t={t}")
        pairs.append(_normalize_fraction_pair(a, b))
    return FiberPointQ(Fraction(t), tuple(pairs))


def _normalize_fraction_pair(a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
    scale = max(abs(a), abs(b))
    return (a / scale, b / scale)


def fiber_involution_q(fam: SurfaceFamily, i: int, pt: FiberPointQ) -> FiberPointQ:
    """Exact Vieta swap on a specialized fiber point."""
    j, k = [x for x in range(3) if x != i]
    t = pt.t

    def mon(pair):
        a, b = pair
        return (a * a, a * b, b * b)

    mj, mk = mon(pt.pairs[j]), mon(pt.pairs[k])
    q = [Fraction(0)] * 3
    for (mdeg), coeff in fam.coeffs.items():
        q[mdeg[i]] += coeff(t) * mj[mdeg[j]] * mk[mdeg[k]]
    q0, q1, q2 = q
    if q0 == q1 == q2 == 0:
        fam.exclude_param(t)
        raise DegenerateIterationError(f"fiber quadratic degenerates at t={t}")
    u, v = pt.pairs[i]
    # candidates: product form, sum form, reversed sum form
    cands = [
        (q2 * v, q0 * u),
        (-(q1 * v + q0 * u), q0 * v),
        (q2 * u, -(q1 * u + q2 * v)),
    ]
    best = None
    for cu, cv in cands:
        if cu == 0 and cv == 0:
            continue
        best = (cu, cv)
        break
    if best is None:
        fam.exclude_param(t)
        raise DegenerateIterationError(f"all Vieta forms vanish at t={t}")
    # consistency: every nonzero candidate must be projectively equal
    for cu, cv in cands:
        if cu == 0 and cv == 0:
            continue
        if best[0] * cv != best[1] * cu:
            raise AssertionError("Vieta forms disagree on the fiber")
    pairs = list(pt.pairs)
    pairs[i] = _normalize_fraction_pair(*best)
    return FiberPointQ(t, tuple(pairs))


def fiber_orbit_q(
    fam: SurfaceFamily, pt: FiberPointQ, n: int, direction: int = +1
) -> list[FiberPointQ]:
    """Exact fiber orbit [pt, f(pt), ..., f^n(pt)] (reversed word backwards)."""
    word = fam.word if direction > 0 else tuple(reversed(fam.word))
    out = [pt]
    cur = pt
    for _ in range(n):
        for letter in word:
            cur = fiber_involution_q(fam, letter - 1, cur)
        out.append(cur)
    return out


# ---------------------------------------------------------------------------
# smoothness smoke test


def smoke_smoothness(fam: SurfaceFamily, samples: int, seed: int = 0) -> dict:
    """Probe random fibers for singular points at floating precision.

    For each sampled rational t the probe solves the coordinate quadratic
    over random passive coordinates to land on the fiber, then checks the
    gradient of the trihomogeneous form; tiny normalized gradients are
    flagged and the parameter is appended to excluded_params.  Advisory
    only: a clean report is evidence, not proof.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng((seed, 0x50B))
    flagged = []
    checked = []
    for _ in range(samples):
        t0 = Fraction(int(rng.integers(-40, 41)), int(rng.integers(1, 8)))
        cvals = {key: complex(poly(t0)) for key, poly in fam.coeffs.items()}
        worst = _fiber_min_gradient(cvals, rng)
        checked.append((float(t0), worst))
        if worst < 1e-7:
            flagged.append(float(t0))
            fam.exclude_param(t0)
    return {
        "samples": len(checked),
        "flagged_params": flagged,
        "min_gradient_seen": min(w for _, w in checked),
        "advisory": True,
    }


def _fiber_min_gradient(cvals: dict, rng, probes: int = 24) -> float:
    worst = np.inf
    for _ in range(probes):
        y = _random_unit_pair(rng)
        z = _random_unit_pair(rng)
        # quadratic in the x pair
        q = [0j, 0j, 0j]
        for (a, b, c), cv in cvals.items():
            q[a] += cv * _mon(y, b) * _mon(z, c)
        q0, q1, q2 = q
        if abs(q0) < 1e-14 and abs(q1) < 1e-14 and abs(q2) < 1e-14:
            return 0.0
        roots = _quad_roots(q0, q1, q2)
        for x in roots:
            g = _gradient_norm(cvals, x, y, z)
            worst = min(worst, g)
    return float(worst)


def _mon(pair, idx):
    a, b = pair
    return a ** (2 - idx) * b**idx


def _random_unit_pair(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= max(abs(v[0]), abs(v[1]))
    return (complex(v[0]), complex(v[1]))


def _quad_roots(q0, q1, q2):
    """Roots of q0*u^2 + q1*u*v + q2*v^2 as projective pairs (u, v)."""
    if abs(q0) < 1e-15:
        out = [(1 + 0j, 0j)]
        if abs(q1) > 1e-15:
            out.append((-q2 / q1, 1 + 0j))
        return out
    disc = q1 * q1 - 4 * q0 * q2
    sq = disc**0.5
    return [((-q1 + sq) / (2 * q0), 1 + 0j), ((-q1 - sq) / (2 * q0), 1 + 0j)]


def _gradient_norm(cvals, x, y, z) -> float:
    """Norm of grad F at a projective point, normalized by coefficient size."""
    grads = [0j] * 6
    scale = 0.0
    x0, x1 = x
    y0, y1 = y
    z0, z1 = z
    for (a, b, c), cv in cvals.items():
        mx, my, mz = _mon(x, a), _mon(y, b), _mon(z, c)
        scale = max(scale, abs(cv))
        if a < 2:
            grads[0] += cv * (2 - a) * x0 ** (1 - a) * x1**a * my * mz
        if a > 0:
            grads[1] += cv * a * x0 ** (2 - a) * x1 ** (a - 1) * my * mz
        if b < 2:
            grads[2] += cv * (2 - b) * y0 ** (1 - b) * y1**b * mx * mz
        if b > 0:
            grads[3] += cv * b * y0 ** (2 - b) * y1 ** (b - 1) * mx * mz
        if c < 2:
            grads[4] += cv * (2 - c) * z0 ** (1 - c) * z1**c * mx * my
        if c > 0:
            grads[5] += cv * c * z0 ** (2 - c) * z1 ** (c - 1) * mx * my
    norm = max(abs(g) for g in grads)
    return norm / scale if scale else 0.0


# ---------------------------------------------------------------------------
# family files


def family_from_dict(data: dict, *, validate: bool = True) -> SurfaceFamily:
    coeffs = {}
    for key, text in data.get("coeffs", {}).items():
        if len(key) != 3 or any(ch not in "012" for ch in key):
            raise FamilyValidationError(f"bad multidegree key {key!r}")
        coeffs[(int(key[0]), int(key[1]), int(key[2]))] = parse_poly(str(text))
    sections = []
    for sec in data.get("sections", []):
        pairs = []
        for pq in sec:
            pairs.append(Pair.make(parse_poly(str(pq[0])), parse_poly(str(pq[1]))))
        sections.append(MarkedSection(tuple(pairs)))
    return SurfaceFamily(coeffs, data.get("word", []), sections, validate=validate)


def family_from_json(text: str, *, validate: bool = True) -> SurfaceFamily:
    return family_from_dict(json.loads(text), validate=validate)


def load_family(path, *, validate: bool = True) -> SurfaceFamily:
    with open(path, "r", encoding="utf-8") as fh:
        return family_from_json(fh.read(), validate=validate)
