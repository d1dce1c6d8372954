"""Tests for the class-lattice model (forms, words, spectra, eigendivisors)."""

from fractions import Fraction

import numpy as np
import pytest

from heightlab.exactnum import AlgebraicReal, Poly
from heightlab.nslattice import (
    DivisorClass,
    IntersectionForm,
    LatticeMap,
    big_nef_check,
    classical_wehler_lattice,
    compose_word,
    cyclotomic_split,
    dynamical_degree,
    eigendivisor,
    gram_from_multidegrees,
    is_hyperbolic,
    pair_classes,
    periodic_curve_classes,
    power_iteration_lambda,
    salem_factor,
    wehler_222_lattice,
)

FORM222, INV222 = wehler_222_lattice()
FORMCW, INVCW = classical_wehler_lattice()


class TestIntersectionForm:
    def test_gram_matches_multidegree_oracle(self):
        assert gram_from_multidegrees() == FORM222.gram

    def test_det_and_signature(self):
        assert FORM222.det() == 16
        assert FORM222.signature() == (1, 2)
        assert FORMCW.signature() == (1, 2)

    def test_rejects_nonsymmetric(self):
        with pytest.raises(ValueError):
            IntersectionForm(((0, 1, 0), (0, 0, 0), (0, 0, 0)))


class TestInvolutions:
    @pytest.mark.parametrize("form,invs", [(FORM222, INV222), (FORMCW, INVCW)])
    def test_isometry_and_involution(self, form, invs):
        for s in invs:
            assert s.is_isometry(form)
            assert s.is_involution()

    def test_stated_action_of_s1(self):
        s1 = INV222[0]
        assert s1.apply((1, 0, 0)) == (-1, 2, 2)
        assert s1.apply((0, 1, 0)) == (0, 1, 0)
        assert s1.apply((0, 0, 1)) == (0, 0, 1)


class TestComposeWord:
    def test_single_letter(self):
        assert compose_word(INV222, [1]) == INV222[0]

    def test_involution_squared_is_identity(self):
        assert compose_word(INV222, [1, 1]) == LatticeMap.identity()

    def test_empty_word_warns(self):
        with pytest.warns(UserWarning, match="not hyperbolic"):
            m = compose_word(INV222, [])
        assert m == LatticeMap.identity()

    def test_reverse_order_composition(self):
        # pullback of the word applies the last letter first
        m = compose_word(INV222, [1, 2, 3])
        assert m == INV222[0] * INV222[1] * INV222[2]

    def test_word_isometry_preserved(self):
        for word in ([1, 2, 3], [2, 1, 3, 1], [3, 2, 1, 2, 3]):
            assert compose_word(INV222, word).is_isometry(FORM222)

    def test_bad_index(self):
        with pytest.raises(ValueError, match="out of range"):
            compose_word(INV222, [4])


class TestSpectra:
    def test_two_letter_word_on_222_is_parabolic(self):
        # two-letter words preserve a genus-one fibration: unipotent action
        m = compose_word(INV222, [1, 2])
        assert m.charpoly() == Poly((-1, 3, -3, 1))  # (x-1)^3
        lam = dynamical_degree(m)
        assert lam.is_rational() and lam.as_rational() == 1
        assert not is_hyperbolic(m)

    def test_identity_degree_one(self):
        lam = dynamical_degree(LatticeMap.identity())
        assert lam.as_rational() == 1

    def test_classical_word_12(self):
        m = compose_word(INVCW, [1, 2])
        cp = m.charpoly()
        assert cp == Poly((-1, 15, -15, 1))  # (x-1)(x^2 - 14x + 1)
        rest, cyc = cyclotomic_split(cp)
        assert rest == Poly((1, -14, 1))
        assert cyc == [(Poly((-1, 1)), 1)]
        lam = dynamical_degree(m).refine(Fraction(1, 10**12))
        target = 7 + 4 * 3**0.5
        assert abs(lam.to_float() - target) < 1e-10
        assert float(power_iteration_lambda(m)) == pytest.approx(target, rel=1e-9)

    def test_word_123_on_222(self):
        m = compose_word(INV222, [1, 2, 3])
        cp = m.charpoly()
        assert cp == Poly((1, -17, -17, 1))  # (x+1)(x^2 - 18x + 1)
        rest, cyc = cyclotomic_split(cp)
        assert rest == Poly((1, -18, 1))
        assert cyc == [(Poly((1, 1)), 1)]
        lam = dynamical_degree(m)
        assert abs(lam.to_float() - (9 + 4 * 5**0.5)) < 1e-10
        assert float(power_iteration_lambda(m)) == pytest.approx(9 + 4 * 5**0.5, rel=1e-9)

    def test_lambda_of_inverse_equals_lambda(self):
        for invs, word in ((INV222, [1, 2, 3]), (INVCW, [1, 2])):
            m = compose_word(invs, word)
            assert dynamical_degree(m).equals(dynamical_degree(m.inverse()))

    def test_non_perron_roots_on_unit_circle(self):
        for invs, word in ((INV222, [1, 2, 3]), (INVCW, [1, 2]), (INV222, [3, 1, 2, 1])):
            m = compose_word(invs, word)
            if not is_hyperbolic(m):
                continue
            lam = dynamical_degree(m).to_float()
            roots = np.roots([float(c) for c in reversed(m.charpoly().coeffs)])
            others = [r for r in roots if not np.isclose(abs(r), lam, rtol=1e-6)
                      and not np.isclose(abs(r), 1 / lam, rtol=1e-6)]
            assert all(abs(abs(r) - 1.0) < 1e-8 for r in others)

    def test_salem_factor(self):
        assert salem_factor(compose_word(INV222, [1, 2])) is None
        assert salem_factor(compose_word(INV222, [1, 2, 3])) == Poly((1, -18, 1))


class TestEigendivisors:
    @pytest.mark.parametrize(
        "form,invs,word",
        [(FORM222, INV222, [1, 2, 3]), (FORMCW, INVCW, [1, 2]), (FORM222, INV222, [2, 3, 1])],
    )
    def test_exact_eigendivisor_identities(self, form, invs, word):
        m = compose_word(invs, word)
        dplus = eigendivisor(m, "+", form)
        dminus = eigendivisor(m, "-", form)
        K = dplus.number_field
        lam = K.generator()
        # residual exactly zero in the number field
        for i in range(3):
            res = sum(
                (K.from_rational(m.mat[i][k]) * dplus.coeffs[k] for k in range(3)),
                K.zero(),
            ) - lam * dplus.coeffs[i]
            assert res.is_zero()
        # isotropy is exact
        assert pair_classes(form, dplus, dplus).is_zero()
        assert pair_classes(form, dminus, dminus).is_zero()
        # D+ . D- > 0 (exact sign)
        assert pair_classes(form, dplus, dminus).sign() > 0
        # pairing normalization: D . (L1+L2+L3) = 1
        ones = (K.one(), K.one(), K.one())
        assert form.pair(dplus.coeffs, ones) == K.one()

    def test_non_hyperbolic_rejected(self):
        with pytest.raises(ValueError, match="no Perron eigenvector"):
            eigendivisor(LatticeMap.identity(), "+", FORM222)
        with pytest.raises(ValueError, match="no Perron eigenvector"):
            eigendivisor(compose_word(INV222, [1, 2]), "+", FORM222)

    def test_big_nef_check(self):
        m = compose_word(INV222, [1, 2, 3])
        dplus = eigendivisor(m, "+", FORM222)
        dminus = eigendivisor(m, "-", FORM222)
        K = dplus.number_field
        big = DivisorClass(
            tuple(a + b for a, b in zip(dplus.coeffs, dminus.coeffs)), role="D"
        )
        ok, cert = big_nef_check(big, FORM222, dplus, dminus)
        assert ok
        assert cert["big"] and cert["nef_on_test_set"]
        # D.D = 2 D+.D- > 0
        dd = pair_classes(FORM222, big, big)
        two_cross = K.from_rational(2) * pair_classes(FORM222, dplus, dminus)
        assert (dd - two_cross).is_zero()

    def test_isotropic_class_not_big(self):
        l1 = DivisorClass((1, 0, 0))
        ok, cert = big_nef_check(l1, FORM222)
        assert not ok
        assert cert["pairings"]["self"]["sign"] == 0

    def test_eigenclass_not_big(self):
        m = compose_word(INV222, [1, 2, 3])
        dplus = eigendivisor(m, "+", FORM222)
        ok, cert = big_nef_check(dplus, FORM222)
        assert not ok  # isotropic


class TestPeriodicClasses:
    def test_no_minus_two_classes_in_222_lattice(self):
        # v.G.v is divisible by 4 on the (2,2,2) lattice: -2 never occurs
        m = compose_word(INV222, [1, 2, 3])
        assert periodic_curve_classes(m, FORM222, -2, 8, 12) == []

    def test_identity_returns_all_classes(self):
        orbits = periodic_curve_classes(LatticeMap.identity(), FORMCW, -2, 4, 3)
        flat = {v for orb in orbits for v in orb}
        assert (0, 0, 1) in flat and (0, 0, -1) in flat
        assert all(FORMCW.pair(v, v) == -2 for v in flat)
        assert all(len(orb) == 1 for orb in orbits)

    def test_word_orbits_are_stable(self):
        m = compose_word(INVCW, [1, 2])
        orbits = periodic_curve_classes(m, FORMCW, -2, 12, 50)
        assert orbits, "the padded (-2)-class is fixed by both involutions"
        for orb in orbits:
            imgs = {tuple(int(x) for x in m.apply(v)) for v in orb}
            assert imgs == set(orb)

    def test_zero_height_bound(self):
        m = compose_word(INVCW, [1, 2])
        assert periodic_curve_classes(m, FORMCW, -2, 8, 0) == []

    def test_oracle_brute_force_periodicity(self):
        # independent oracle: re-enumerate and check each returned class is
        # periodic and each omitted in-box class is not
        m = compose_word(INVCW, [1, 2])
        bound, order = 6, 8
        orbits = periodic_curve_classes(m, FORMCW, -2, order, bound)
        returned = {v for orb in orbits for v in orb}
        for x in range(-bound, bound + 1):
            for y in range(-bound, bound + 1):
                for z in range(-bound, bound + 1):
                    v = (x, y, z)
                    if FORMCW.pair(v, v) != -2:
                        continue
                    cur = v
                    per = False
                    for _ in range(order):
                        cur = tuple(int(t) for t in m.apply(cur))
                        if cur == v:
                            per = True
                            break
                    assert per == (v in returned)
