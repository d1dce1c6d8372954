"""Exact arithmetic substrate: rationals, dense polynomials over Q and
F_p, normalized rational functions, real algebraic numbers and small
real number fields.

Everything here is immutable after construction and safe to share
across threads.
"""

from .algebraic import AlgebraicReal, count_roots, isolate_real_roots, sturm_chain
from .fppoly import SHADOW_PRIMES, BadPrimeError, FpPoly, reduce_fraction_coeffs
from .numberfield import NFElement, NumberField
from .qpoly import Poly
from .ratfunc import RationalFunction, ratfun_normalize, reduce_mod_p

__all__ = [
    "AlgebraicReal",
    "BadPrimeError",
    "FpPoly",
    "NFElement",
    "NumberField",
    "Poly",
    "RationalFunction",
    "SHADOW_PRIMES",
    "count_roots",
    "isolate_real_roots",
    "ratfun_normalize",
    "reduce_fraction_coeffs",
    "reduce_mod_p",
    "sturm_chain",
]
