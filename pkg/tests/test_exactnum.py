"""Tests for the exact arithmetic substrate."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heightlab.exactnum import (
    AlgebraicReal,
    BadPrimeError,
    NumberField,
    Poly,
    RationalFunction,
    count_roots,
    isolate_real_roots,
    ratfun_normalize,
    reduce_mod_p,
)


def P(*cs):
    return Poly(cs)


fractions_st = st.fractions(
    min_value=-10, max_value=10, max_denominator=6
)
poly_st = st.lists(fractions_st, max_size=8).map(Poly)
nonzero_poly_st = poly_st.filter(lambda p: not p.is_zero())


class TestPolyRing:
    def test_basic(self):
        a = P(1, 2)
        b = P(3, 0, 1)
        assert (a + b).coeffs == (Fraction(4), Fraction(2), Fraction(1))
        assert (a * b).coeffs == (Fraction(3), Fraction(6), Fraction(1), Fraction(2))
        assert (a - a).is_zero()
        assert P().degree() == -1

    @given(poly_st, poly_st, poly_st)
    @settings(max_examples=60, deadline=None)
    def test_distributive(self, a, b, c):
        assert (a + b) * c == a * c + b * c

    @given(nonzero_poly_st, nonzero_poly_st)
    @settings(max_examples=60, deadline=None)
    def test_degree_additive(self, a, b):
        assert (a * b).degree() == a.degree() + b.degree()

    @given(poly_st, nonzero_poly_st)
    @settings(max_examples=60, deadline=None)
    def test_divmod(self, a, b):
        q, r = divmod(a, b)
        assert q * b + r == a
        assert r.is_zero() or r.degree() < b.degree()

    @given(poly_st, poly_st, nonzero_poly_st)
    @settings(max_examples=40, deadline=None)
    def test_gcd_common_factor(self, a, b, g):
        # gcd is defined up to a unit: compare monic forms
        lhs = (a * g).gcd(b * g)
        rhs = (g * a.gcd(b)).monic()
        assert lhs == rhs

    def test_kronecker_matches_schoolbook(self):
        import random

        rnd = random.Random(7)
        a = Poly([Fraction(rnd.randint(-99, 99), rnd.randint(1, 9)) for _ in range(120)])
        b = Poly([Fraction(rnd.randint(-99, 99), rnd.randint(1, 9)) for _ in range(90)])
        slow = Poly([0])
        for i, c in enumerate(a.coeffs):
            slow = slow + (b * c).shift(i)
        assert a * b == slow

    def test_xgcd(self):
        a = P(-1, 0, 1)  # t^2 - 1
        b = P(-1, 1)  # t - 1
        g, u, v = a.xgcd(b)
        assert g == b.monic()
        assert u * a + v * b == g

    def test_squarefree_part(self):
        f = P(-1, 1) ** 3 * P(2, 1)
        assert f.squarefree_part() == (P(-1, 1) * P(2, 1)).monic()


class TestRationalFunction:
    def test_cancel_common_factor(self):
        r = ratfun_normalize(P(-1, 0, 1), P(-1, 1))
        assert r.num == P(1, 1)
        assert r.den == Poly.one()

    def test_zero_representative(self):
        r = ratfun_normalize(Poly(), P(0, 0, 0, 1))
        assert r.num.is_zero()
        assert r.den == Poly.one()
        assert r.degree() == 0

    def test_monic_scalar_normalization(self):
        r = ratfun_normalize(P(0, 2), P(4))
        assert r.den == Poly.one()
        assert r.num == P(0, Fraction(1, 2))

    def test_zero_denominator_rejected(self):
        with pytest.raises(ZeroDivisionError, match="division by zero in function field"):
            ratfun_normalize(P(1), Poly())

    def test_degree_is_max(self):
        r = ratfun_normalize(P(1, 0, 0, 1), P(0, 1))
        assert r.degree() == 3


class TestReduceModP:
    def test_direct_reduction(self):
        r = ratfun_normalize(P(0, 3, 1), P(2))
        rp = reduce_mod_p(r, 5)
        assert rp.char == 5
        assert rp.num.degree() == 2
        # (t^2+3t)/2 = 3*(t^2+3t) mod 5
        assert list(map(int, rp.num.c)) == [0, 9 % 5, 3]
        assert rp.degree() == r.degree()

    def test_leading_coefficient_killed(self):
        r = ratfun_normalize(P(1, 5), P(1))
        with pytest.raises(BadPrimeError, match="prime rejected"):
            reduce_mod_p(r, 5)

    def test_denominator_killed(self):
        r = ratfun_normalize(P(0, Fraction(1, 3)), P(1))
        with pytest.raises(BadPrimeError, match="prime rejected"):
            reduce_mod_p(r, 3)

    @given(
        st.lists(st.integers(-20, 20), min_size=1, max_size=6),
        st.lists(st.integers(-20, 20), min_size=1, max_size=6),
    )
    @settings(max_examples=40, deadline=None)
    def test_reduction_is_multiplicative(self, ca, cb):
        p = 2147483629
        a, b = Poly(ca), Poly(cb)
        if a.is_zero() or b.is_zero():
            return
        ra = ratfun_normalize(a, Poly.one())
        rb = ratfun_normalize(b, Poly.one())
        lhs = reduce_mod_p(ra, p).num * reduce_mod_p(rb, p).num
        rhs = reduce_mod_p(ratfun_normalize(a * b, Poly.one()), p).num
        assert lhs == rhs

    def test_reduction_is_additive(self):
        p = 2147483587
        a, b = P(1, 2, 3), P(4, 5)
        ra = reduce_mod_p(ratfun_normalize(a, Poly.one()), p)
        rb = reduce_mod_p(ratfun_normalize(b, Poly.one()), p)
        rs = reduce_mod_p(ratfun_normalize(a + b, Poly.one()), p)
        assert ra.num + rb.num == rs.num


def bisect_oracle(f, lo, hi, eps):
    """Independent plain bisection used to pin expected enclosures."""
    lo, hi = Fraction(lo), Fraction(hi)
    flo = f(lo)
    while hi - lo > eps:
        mid = (lo + hi) / 2
        fm = f(mid)
        if fm == 0:
            return mid, mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo, hi


class TestAlgebraicReal:
    def test_refine_sqrt3(self):
        a = AlgebraicReal.root_of(P(-3, 0, 1), 1, 2)
        r = a.refine(Fraction(1, 100))
        olo, ohi = bisect_oracle(P(-3, 0, 1), 1, 2, Fraction(1, 100))
        assert r.hi - r.lo <= Fraction(1, 100)
        # both enclosures must contain the same root
        assert max(r.lo, olo) <= min(r.hi, ohi)
        assert abs(r.to_float() - 3**0.5) < 1e-12

    def test_rational_root_degenerate(self):
        a = AlgebraicReal.root_of(P(-5, 1), 0, 10)
        r = a.refine(Fraction(1, 10**9))
        assert r.lo == r.hi == 5

    def test_refine_wehler_lambda(self):
        a = AlgebraicReal.root_of(P(1, -14, 1), 13, 14)
        r = a.refine(Fraction(1, 10**6))
        olo, ohi = bisect_oracle(P(1, -14, 1), 13, 14, Fraction(1, 10**6))
        assert max(r.lo, olo) <= min(r.hi, ohi)
        assert abs(r.to_float() - (7 + 4 * 3**0.5)) < 1e-12

    def test_refine_monotone_nested(self):
        a = AlgebraicReal.root_of(P(-2, 0, 1), 1, 2)
        prev = a
        for k in range(2, 40, 6):
            nxt = prev.refine(Fraction(1, 2**k))
            assert prev.lo <= nxt.lo <= nxt.hi <= prev.hi
            assert nxt.hi - nxt.lo <= Fraction(1, 2**k)
            prev = nxt

    def test_equals(self):
        a = AlgebraicReal.root_of(P(-2, 0, 1), 1, 2)
        b = AlgebraicReal.root_of(P(-2, 0, 1), Fraction(7, 5), Fraction(29, 20))
        c = AlgebraicReal.root_of(P(-2, 0, 1), -2, -1)
        assert a.equals(b)
        assert not a.equals(c)

    def test_refine_rejects_bad_eps(self):
        a = AlgebraicReal.root_of(P(-2, 0, 1), 1, 2)
        with pytest.raises(ValueError):
            a.refine(0)

    def test_isolate_real_roots(self):
        f = P(-1, 1) * P(-2, 1) * P(3, 1)
        ivs = isolate_real_roots(f)
        assert len(ivs) == 3
        roots = [-3, 1, 2]
        for (lo, hi), r in zip(ivs, roots):
            assert lo < r < hi or lo == hi == r

    def test_count_roots(self):
        f = P(1, -14, 1)
        assert count_roots(f, Fraction(0), Fraction(1)) == 1
        assert count_roots(f, Fraction(13), Fraction(14)) == 1
        assert count_roots(f, Fraction(1), Fraction(13)) == 0


class TestNumberField:
    def test_quadratic_arithmetic(self):
        K = NumberField(P(1, -14, 1), 13, 14)
        lam = K.generator()
        inv = lam.inverse()
        assert (lam * inv).as_rational() == 1
        # 1/lam = 14 - lam in this field
        assert inv == K.elem((14, -1))
        assert (lam + inv).as_rational() == 14

    def test_sign_and_enclosure(self):
        K = NumberField(P(-3, 0, 1), 1, 2)  # Q(sqrt 3)
        s3 = K.generator()
        assert (s3 - 1).sign() == 1
        assert (s3 - 2).sign() == -1
        lo, hi = (7 + 4 * s3).enclosure(Fraction(1, 10**10))
        assert hi - lo <= Fraction(1, 10**10)
        assert lo <= Fraction(13928203230, 10**9) <= hi or abs(
            float((7 + 4 * s3)) - 13.928203230275509
        ) < 1e-12

    def test_zero_sign(self):
        K = NumberField(P(-3, 0, 1), 1, 2)
        z = K.generator() - K.generator()
        assert z.sign() == 0
        assert z.is_zero()

    def test_division(self):
        K = NumberField(P(-5, 0, 1), 2, 3)
        a = K.elem((1, 2))  # 1 + 2*sqrt5
        b = K.elem((3, -1))
        assert (a / b) * b == a
