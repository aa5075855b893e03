"""Integer, modular and projective-line arithmetic.

Everything here is exact except the complex values returned by the
additive character ``e_q``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

INT64_MAX = 2**63 - 1
TWO_PI_I = 2j * math.pi

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class RangeError(ValueError):
    """Raised when an integer leaves the supported 64-bit range."""


class NotInvertibleError(ValueError):
    pass


class MalformedPointError(ValueError):
    pass


class NotCoprimeError(ValueError):
    pass


def check_range(n: int) -> int:
    if not -INT64_MAX - 1 <= n <= INT64_MAX:
        raise RangeError(f"{n} does not fit in a signed 64-bit integer")
    return n


# ---------------------------------------------------------------------------
# primality and factorisation


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all n < 3.3e24."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    if n % 2 == 0:
        return 2
    c = 1
    while True:
        y, r, q, g = 2, 1, 1, 1
        f = lambda v: (v * v + c) % n  # noqa: E731
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = f(y)
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = f(y)
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += 128
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = f(ys)
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
        c += 1


def _factor_into(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _factor_into(d, out)
    _factor_into(n // d, out)


@dataclass(frozen=True)
class FactoredModulus:
    """A positive integer together with its prime factorisation."""

    value: int
    primes: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        for p, e in self.primes:
            if e < 1:
                raise ValueError("exponents must be positive")
            prod *= p**e
        if prod != self.value:
            raise ValueError(f"factorisation {self.primes} does not multiply to {self.value}")
        if list(self.primes) != sorted(self.primes):
            raise ValueError("primes must be ascending")

    @property
    def squarefree(self) -> bool:
        return all(e == 1 for _, e in self.primes)

    @property
    def prime_list(self) -> list[int]:
        return [p for p, _ in self.primes]

    @property
    def omega(self) -> int:
        return len(self.primes)

    @property
    def big_omega(self) -> int:
        return sum(e for _, e in self.primes)

    def __int__(self) -> int:
        return self.value

    def divisors(self) -> list[int]:
        divs = [1]
        for p, e in self.primes:
            divs = [d * p**k for d in divs for k in range(e + 1)]
        return sorted(divs)


def factor(n: int) -> FactoredModulus:
    if isinstance(n, FactoredModulus):
        return n
    n = int(n)
    if n < 1 or n > INT64_MAX:
        raise RangeError(f"factor expects 1 <= n <= 2^63-1, got {n}")
    out: dict[int, int] = {}
    m = n
    for p in _SMALL_PRIMES:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    _factor_into(m, out)
    return FactoredModulus(n, tuple(sorted(out.items())))


def as_modulus(q) -> FactoredModulus:
    return q if isinstance(q, FactoredModulus) else factor(q)


def squarefree_modulus(q) -> FactoredModulus:
    fm = as_modulus(q)
    if not fm.squarefree:
        raise ValueError(f"modulus {fm.value} is not squarefree")
    return fm


def divisors(n: int) -> list[int]:
    return factor(n).divisors()


# ---------------------------------------------------------------------------
# arithmetic functions


class ArithFn(enum.Enum):
    MOBIUS = "mobius"
    VON_MANGOLDT = "vonMangoldt"
    EULER_PHI = "eulerPhi"
    TAU = "tau"
    OMEGA = "Omega"
    THETA_PRIME = "thetaPrime"


def euler_phi(n) -> int:
    fm = as_modulus(n)
    out = 1
    for p, e in fm.primes:
        out *= (p - 1) * p ** (e - 1)
    return out


def mobius(n) -> int:
    fm = as_modulus(n)
    if not fm.squarefree:
        return 0
    return -1 if fm.omega % 2 else 1


def von_mangoldt(n) -> float:
    fm = as_modulus(n)
    return math.log(fm.primes[0][0]) if fm.omega == 1 else 0.0


def tau_k(n, k: int = 2) -> int:
    """Number of ordered k-tuples with product n."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out = 1
    for _, e in as_modulus(n).primes:
        out *= math.comb(e + k - 1, k - 1)
    return out


def arith_fn(kind: ArithFn | str, n: int, k: int = 2):
    """Evaluate one of the standard arithmetic functions at ``n >= 1``.

    ``k`` is only used by the divisor function ``tau_k``.
    """
    if n < 1:
        raise ValueError("arithmetic functions are defined on n >= 1")
    if isinstance(kind, str):
        if kind.startswith("tau_"):
            kind, k = ArithFn.TAU, int(kind[4:])
        else:
            kind = ArithFn(kind)
    fm = factor(n)
    if kind is ArithFn.MOBIUS:
        return mobius(fm)
    if kind is ArithFn.VON_MANGOLDT:
        return von_mangoldt(fm)
    if kind is ArithFn.EULER_PHI:
        return euler_phi(fm)
    if kind is ArithFn.TAU:
        if k < 2:
            raise ValueError("tau_k needs k >= 2")
        return tau_k(fm, k)
    if kind is ArithFn.OMEGA:
        return fm.big_omega
    if kind is ArithFn.THETA_PRIME:
        return math.log(n) if fm.primes == ((n, 1),) else 0.0
    raise ValueError(kind)


def mod_inverse(a: int, q: int) -> int:
    q = int(q)
    if q == 1:
        return 0
    if math.gcd(a, q) != 1:
        raise NotInvertibleError(f"{a} is not invertible modulo {q}")
    return pow(a, -1, q)


@lru_cache(maxsize=64)
def inverse_table(q: int) -> np.ndarray:
    """inv[u] = u^{-1} mod q for units u, and 0 for non-units."""
    inv = np.zeros(q, dtype=np.int64)
    for u in range(1, q):
        if math.gcd(u, q) == 1:
            inv[u] = pow(u, -1, q)
    inv.setflags(write=False)
    return inv


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    """Combine x = r1 (m1), x = r2 (m2) for coprime moduli."""
    if math.gcd(m1, m2) != 1:
        raise NotCoprimeError(f"moduli {m1}, {m2} are not coprime")
    t = (r2 - r1) * mod_inverse(m1 % m2, m2) % m2 if m2 > 1 else 0
    return (r1 + m1 * t) % (m1 * m2), m1 * m2


def crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    x, m = 0, 1
    for r, mod in zip(residues, moduli):
        x, m = crt_pair(x, m, r % mod, mod)
    return x


# ---------------------------------------------------------------------------
# sieves used by the array-based code paths


def spf_sieve(n: int) -> np.ndarray:
    """Smallest prime factor for every integer in [0, n]."""
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in range(2, int(n**0.5) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    idx = np.arange(n + 1)
    mask = spf == 0
    spf[mask] = idx[mask]
    return spf


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).tolist()


def mobius_array(n: int) -> np.ndarray:
    """mu(k) for 0 <= k <= n (index 0 is unused and set to 0)."""
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    for p in primes_up_to(n):
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def mangoldt_array(n: int) -> np.ndarray:
    lam = np.zeros(n + 1, dtype=np.float64)
    for p in primes_up_to(n):
        lp = math.log(p)
        pk = p
        while pk <= n:
            lam[pk] = lp
            pk *= p
    return lam


# ---------------------------------------------------------------------------
# the additive character e_q on the projective line


def _coerce_pair(x) -> tuple[int, int]:
    """Return an integer pair (a, b) standing for a/b; b may be 0 (infinity)."""
    if isinstance(x, ProjectivePoint):
        return x.a, x.b
    if isinstance(x, tuple):
        a, b = x
        return int(a), int(b)
    if isinstance(x, Fraction):
        return x.numerator, x.denominator
    if isinstance(x, (int, np.integer)):
        return int(x), 1
    raise TypeError(f"cannot interpret {x!r} as a point of P^1")


def e(x: float) -> complex:
    return cmath.exp(TWO_PI_I * x)


def _e_prime(a: int, b: int, p: int, cofactor: int) -> complex:
    """Local factor e_p(a / (b * cofactor)) with the infinity conventions."""
    if b % p == 0:
        return 1.0 + 0j if a % p == 0 else 0j
    return e((a * pow(b * cofactor, -1, p) % p) / p)


def eq_eval(x, q) -> complex:
    """e_q evaluated at a rational, an unreduced pair (a, b), or a point of P^1(Z/qZ).

    When the denominator is invertible modulo q this is exp(2 pi i a b^-1 / q).
    Otherwise q must be squarefree and the value is assembled prime by prime:
    a prime where only the denominator vanishes contributes 0, and a prime
    where both vanish contributes 1.
    """
    fm = as_modulus(q)
    n = fm.value
    a, b = _coerce_pair(x)
    if n == 1:
        return 1.0 + 0j
    if math.gcd(b, n) == 1:
        return e((a * pow(b, -1, n) % n) / n)
    if not fm.squarefree:
        raise ValueError("non-invertible denominators need a squarefree modulus")
    out = 1.0 + 0j
    for p in fm.prime_list:
        out *= _e_prime(a, b, p, n // p)
        if out == 0:
            return 0j
    return out


def eq_vec(num: np.ndarray, den: np.ndarray, q) -> np.ndarray:
    """Vectorised e_q(num/den) for int64 arrays with the same conventions as eq_eval."""
    fm = squarefree_modulus(q)
    n = fm.value
    num = np.asarray(num, dtype=np.int64)
    den = np.asarray(den, dtype=np.int64)
    out = np.ones(np.broadcast(num, den).shape, dtype=np.complex128)
    for p in fm.prime_list:
        cof_inv = pow((n // p) % p, -1, p) if n > p else 1
        inv = inverse_table(p)
        a = np.mod(num, p)
        b = np.mod(den, p)
        val = np.mod(a * inv[b] % p * cof_inv, p)
        local = np.exp(TWO_PI_I * val / p)
        local = np.where(b == 0, np.where(a == 0, 1.0, 0.0), local)
        out = out * local
    return out


@dataclass(frozen=True)
class ProjectivePoint:
    """A point (a : b) of P^1(Z/qZ) for squarefree q."""

    a: int
    b: int
    q: int

    def __post_init__(self):
        fm = squarefree_modulus(self.q)
        object.__setattr__(self, "a", self.a % fm.value)
        object.__setattr__(self, "b", self.b % fm.value)
        for p in fm.prime_list:
            if self.a % p == 0 and self.b % p == 0:
                raise MalformedPointError(f"({self.a}, {self.b}) share the prime {p} with q={self.q}")

    def is_finite(self) -> bool:
        return math.gcd(self.b, self.q) == 1

    def affine(self) -> int:
        if not self.is_finite():
            raise ValueError("point has a component at infinity")
        return self.a * pow(self.b, -1, self.q) % self.q

    def _normal_form(self) -> tuple[int, int]:
        # per prime: (x:1) or (1:0); recombine by CRT
        fm = factor(self.q)
        ra, rb, mods = [], [], []
        for p in fm.prime_list:
            if self.b % p:
                ra.append(self.a * pow(self.b, -1, p) % p)
                rb.append(1)
            else:
                ra.append(1)
                rb.append(0)
            mods.append(p)
        return crt(ra, mods), crt(rb, mods)

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint) or other.q != self.q:
            return NotImplemented
        return self._normal_form() == other._normal_form()

    def __hash__(self):
        return hash((self.q, self._normal_form()))


def projective_line_size(q) -> int:
    fm = squarefree_modulus(q)
    out = fm.value
    for p in fm.prime_list:
        out = out // p * (p + 1)
    return out


def crt_factor_eval(a, q1, q2) -> tuple[complex, complex, complex]:
    """(e_{q1 q2}(a), e_{q1}(a/q2), e_{q2}(a/q1)) for coprime q1, q2."""
    m1, m2 = int(as_modulus(q1).value), int(as_modulus(q2).value)
    if math.gcd(m1, m2) != 1:
        raise NotCoprimeError(f"{m1} and {m2} are not coprime")
    u, v = _coerce_pair(a)
    return (
        eq_eval((u, v), m1 * m2),
        eq_eval((u, v * m2), m1),
        eq_eval((u, v * m1), m2),
    )


def gcd_many(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, int(v))
    return g
