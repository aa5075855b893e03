"""Rational phases f = P/Q with integer coefficients and their reductions mod p.

Polynomials are tuples of coefficients, lowest degree first.  Arithmetic
over F_p uses dense coefficient lists and the Euclidean algorithm; the
degrees occurring in practice are tiny.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import sympy

from .arith import TWO_PI_I, eq_eval, inverse_table, squarefree_modulus

Poly = tuple[int, ...]

_X = sympy.Symbol("X")


class DegenerateDenominatorError(ValueError):
    pass


def _trim(c: Sequence[int]) -> Poly:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_eval(c: Poly, x: int) -> int:
    acc = 0
    for a in reversed(c):
        acc = acc * x + a
    return acc


def poly_eval_mod(c: Poly, xs: np.ndarray, p: int) -> np.ndarray:
    """Horner evaluation of c at every entry of xs, modulo p."""
    acc = np.zeros_like(xs, dtype=np.int64)
    for a in reversed(c):
        acc = (acc * xs + a) % p
    return acc


def poly_deriv(c: Poly) -> Poly:
    return _trim([k * c[k] for k in range(1, len(c))])


# ---------------------------------------------------------------------------
# F_p[X]


def fp_reduce(c: Sequence[int], p: int) -> Poly:
    return _trim([a % p for a in c])


def fp_divmod(a: Poly, b: Poly, p: int) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    a = list(a)
    inv_lead = pow(b[-1], -1, p)
    quot = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        coef = a[-1] * inv_lead % p
        quot[shift] = coef
        for k, bk in enumerate(b):
            a[shift + k] = (a[shift + k] - coef * bk) % p
        a = list(_trim(a))
    return _trim(quot), _trim(a)


def fp_monic(a: Poly, p: int) -> Poly:
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return tuple(x * inv % p for x in a)


def fp_gcd(a: Poly, b: Poly, p: int) -> Poly:
    while b:
        a, b = b, fp_divmod(a, b, p)[1]
    return fp_monic(a, p)


# ---------------------------------------------------------------------------
# rational phases


@dataclass(frozen=True)
class RationalPhase:
    """f = P/Q with gcd(P, Q) = 1 over Q and Q having positive leading coefficient."""

    P: Poly
    Q: Poly

    def __post_init__(self):
        P, Q = _trim(self.P), _trim(self.Q)
        if not Q:
            raise ValueError("denominator must be a nonzero polynomial")
        num = sympy.Poly(list(reversed(P)) or [0], _X, domain="ZZ")
        den = sympy.Poly(list(reversed(Q)), _X, domain="ZZ")
        g = num.gcd(den)
        if num.is_zero:
            P, Q = (), (1,)
        else:
            num, den = num.exquo(g), den.exquo(g)
            c = math.gcd(int(num.content()), int(den.content()))
            if den.LC() < 0:
                c = -c
            P = tuple(int(v) // c for v in reversed(num.all_coeffs()))
            Q = tuple(int(v) // c for v in reversed(den.all_coeffs()))
        object.__setattr__(self, "P", _trim(P))
        object.__setattr__(self, "Q", _trim(Q))

    @classmethod
    def parse(cls, text: str) -> "RationalPhase":
        """Build from an expression in X such as ``"1/X + 3*X"``."""
        expr = sympy.together(sympy.sympify(text, locals={"X": _X, "x": _X}))
        num, den = sympy.fraction(expr)
        return cls.from_sympy(num, den)

    @classmethod
    def from_sympy(cls, num, den) -> "RationalPhase":
        # clear rational coefficients
        nd = sympy.Poly(num, _X, domain="QQ")
        dd = sympy.Poly(den, _X, domain="QQ")
        scale = sympy.ilcm(*[sympy.Rational(c).q for c in nd.all_coeffs() + dd.all_coeffs()])
        nz = [int(c * scale) for c in reversed(nd.all_coeffs())]
        dz = [int(c * scale) for c in reversed(dd.all_coeffs())]
        return cls(tuple(nz), tuple(dz))

    @classmethod
    def constant(cls, c: int) -> "RationalPhase":
        return cls((c,), (1,))

    def to_sympy(self):
        return sympy.Poly(list(reversed(self.P)) or [0], _X).as_expr() / sympy.Poly(
            list(reversed(self.Q)), _X
        ).as_expr()

    @property
    def is_zero(self) -> bool:
        return not self.P

    def __str__(self):
        return str(self.to_sympy())

    def reduce(self, p: int) -> tuple[Poly, Poly]:
        return phase_reduce(self, p)

    def values(self, q) -> np.ndarray:
        return phase_values(self, q)


def phase_reduce(f: RationalPhase, p: int) -> tuple[Poly, Poly]:
    """Coprime (P1, Q1) over F_p with P1/Q1 = f mod p and Q1 monic."""
    P = fp_reduce(f.P, p)
    Q = fp_reduce(f.Q, p)
    if not Q:
        raise DegenerateDenominatorError(f"denominator vanishes identically mod {p}")
    if not P:
        return (), (1,)
    g = fp_gcd(P, Q, p)
    P1 = fp_divmod(P, g, p)[0]
    Q1 = fp_divmod(Q, g, p)[0]
    inv = pow(Q1[-1], -1, p)
    return tuple(a * inv % p for a in P1), tuple(a * inv % p for a in Q1)


def phase_derivative(f: RationalPhase) -> RationalPhase:
    dP, dQ = poly_deriv(f.P), poly_deriv(f.Q)
    P = _poly_sub(_poly_mul(dP, f.Q), _poly_mul(f.P, dQ))
    return RationalPhase(P, _poly_mul(f.Q, f.Q))


def _poly_mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _poly_sub(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])


def phase_gcd(q, f: RationalPhase) -> int:
    """(q, f): product of the primes p | q modulo which f vanishes identically."""
    fm = squarefree_modulus(q)
    out = 1
    for p in fm.prime_list:
        P1, _ = phase_reduce(f, p)
        if not P1:
            out *= p
    return out


def local_phase_values(f: RationalPhase, p: int, scale: int = 1) -> np.ndarray:
    """e_p(scale^{-1} f(x)) for x in F_p, zero where the reduced denominator vanishes."""
    P1, Q1 = phase_reduce(f, p)
    xs = np.arange(p, dtype=np.int64)
    num = poly_eval_mod(P1, xs, p)
    den = poly_eval_mod(Q1, xs, p)
    inv = inverse_table(p)
    s_inv = pow(scale % p, -1, p) if p > 1 else 0
    val = num * inv[den] % p * s_inv % p
    out = np.exp(TWO_PI_I * val / p)
    out[den == 0] = 0.0
    return out


def phase_values(f: RationalPhase, q) -> np.ndarray:
    """The table x -> e_q(f(x)) on Z/qZ for squarefree q, assembled prime by prime."""
    fm = squarefree_modulus(q)
    n = fm.value
    xs = np.arange(n, dtype=np.int64)
    out = np.ones(n, dtype=np.complex128)
    for p in fm.prime_list:
        local = local_phase_values(f, p, n // p)
        out *= local[xs % p]
    return out


def phase_at(f: RationalPhase, x: int, q) -> complex:
    """e_q(f(x)) after reducing f modulo each prime (the convention used by phase_values)."""
    fm = squarefree_modulus(q)
    n = fm.value
    out = 1.0 + 0j
    for p in fm.prime_list:
        P1, Q1 = phase_reduce(f, p)
        den = poly_eval(Q1, x) % p
        if den == 0:
            return 0j
        val = poly_eval(P1, x) * pow(den * (n // p), -1, p) % p
        out *= np.exp(TWO_PI_I * val / p)
    return complex(out)


def phase_at_unreduced(f: RationalPhase, x: int, q) -> complex:
    """e_q(P(x)/Q(x)) evaluated on the integer pair, without cancelling common factors mod p."""
    return eq_eval((poly_eval(f.P, x), poly_eval(f.Q, x)), q)
