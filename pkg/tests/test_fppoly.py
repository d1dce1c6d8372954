"""Tests for the F_p polynomial engine (numpy + Kronecker kernels)."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heightlab.exactnum import FpPoly, Poly
from heightlab.exactnum.fppoly import SHADOW_PRIMES, _div_newton, _inv_series

P31 = SHADOW_PRIMES[1]  # 2147483629


def F(cs, p=P31):
    return FpPoly(cs, p)


def ref_mul(a, b, p):
    """Big-int schoolbook reference."""
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + int(x) * int(y)) % p
    return out


coeff_lists = st.lists(st.integers(0, P31 - 1), min_size=1, max_size=12)


class TestRing:
    @given(coeff_lists, coeff_lists)
    @settings(max_examples=50, deadline=None)
    def test_mul_matches_reference(self, a, b):
        got = F(a) * F(b)
        want = F(ref_mul(a, b, P31))
        assert got == want

    def test_kronecker_path_matches_reference(self):
        rng = np.random.default_rng(3)
        a = rng.integers(0, P31, 400).tolist()
        b = rng.integers(0, P31, 333).tolist()
        assert (F(a) * F(b)) == F(ref_mul(a, b, P31))

    @given(coeff_lists, coeff_lists)
    @settings(max_examples=40, deadline=None)
    def test_add_sub_roundtrip(self, a, b):
        x, y = F(a), F(b)
        assert (x + y) - y == x

    def test_eval_matches_horner(self):
        rng = np.random.default_rng(11)
        cs = rng.integers(0, P31, 10001).tolist()
        f = F(cs)
        x = 123456789
        acc = 0
        for c in reversed(cs):
            acc = (acc * x + c) % P31
        assert f(x) == acc

    def test_degree_additive_large(self):
        rng = np.random.default_rng(5)
        a = F(rng.integers(1, P31, 5000).tolist())
        b = F(rng.integers(1, P31, 3000).tolist())
        assert (a * b).degree() == a.degree() + b.degree()


class TestDivision:
    @given(coeff_lists, coeff_lists)
    @settings(max_examples=50, deadline=None)
    def test_divmod_identity(self, a, b):
        x, y = F(a), F(b)
        if y.is_zero():
            return
        q, r = x.divmod(y)
        assert q * y + r == x
        assert r.is_zero() or r.degree() < y.degree()

    def test_newton_division_matches_schoolbook(self):
        rng = np.random.default_rng(17)
        num = F(rng.integers(0, P31, 9000).tolist())
        den = F(rng.integers(1, P31, 700).tolist())
        q1 = _div_newton(num, den, num.degree() - den.degree())
        q2, _ = num._divmod_schoolbook(den)
        assert q1 == q2

    def test_exact_div_fast_large(self):
        rng = np.random.default_rng(23)
        a = F(rng.integers(0, P31, 6000).tolist())
        b = F(rng.integers(1, P31, 2500).tolist())
        prod = a * b
        assert prod.exact_div_fast(b) == a
        bad = prod + F([1])
        with pytest.raises(ValueError):
            bad.exact_div_fast(b)

    def test_inv_series(self):
        f = F([1, 5, 7, 11])
        g = _inv_series(f, 64)
        assert (f * g).truncate(64) == F([1])


class TestGcd:
    def test_gcd_common_factor(self):
        g = F([1, 2, 1])
        a = F([3, 1]) * g
        b = F([5, 0, 7]) * g
        got = a.gcd(b)
        assert got == (g.monic())

    @given(coeff_lists, coeff_lists, coeff_lists)
    @settings(max_examples=30, deadline=None)
    def test_gcd_divides(self, ca, cb, cg):
        a, b, g = F(ca), F(cb), F(cg)
        if g.is_zero():
            return
        d = (a * g).gcd(b * g)
        if d.is_zero():
            return
        assert (a * g).divmod(d)[1].is_zero()
        assert (b * g).divmod(d)[1].is_zero()


class TestAgainstQ:
    def test_matches_rational_arithmetic(self):
        a = Poly([3, -2, 5, 7])
        b = Poly([1, 0, -4, 2, 9])
        prod = a * b
        ap = FpPoly([c % P31 for c in (3, -2, 5, 7)], P31)
        bp = FpPoly([c % P31 for c in (1, 0, -4, 2, 9)], P31)
        pp = ap * bp
        assert [int(c) for c in pp.c] == [int(c) % P31 for c in prod.coeffs]
