"""Computational toolkit for exponential sums, dense divisibility and the
exponent numerology behind equidistribution of primes to large moduli.
"""

from .arith import FactoredModulus, ProjectivePoint, eq_eval, factor
from .densediv import DenseDivQuery, ModuliInterval, dd_witness, enumerate_moduli, is_dd
from .exponents import claim_sets, max_distribution_exponent, mpz_region, sigma_interval

__version__ = "0.1.0"

__all__ = [
    "FactoredModulus",
    "ProjectivePoint",
    "eq_eval",
    "factor",
    "DenseDivQuery",
    "ModuliInterval",
    "dd_witness",
    "enumerate_moduli",
    "is_dd",
    "claim_sets",
    "max_distribution_exponent",
    "mpz_region",
    "sigma_interval",
]
