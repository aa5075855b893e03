"""Multiple dense divisibility.

Every n is 0-tuply y-densely divisible.  For i >= 1, n is i-tuply
y-densely divisible when for all j + k = i - 1 and every real R in
[1, y n] there is a factorisation n = q r with R/y <= r <= R, q j-tuply
and r k-tuply y-densely divisible.

For fixed (j, k) let V be the sorted set of admissible r (divisors with
the two hereditary properties).  The windows [r, y r], r in V, must cover
[1, y n], which happens exactly when 1 and n are in V and consecutive
elements of V are at ratio at most y.  That turns the real quantifier over
R into a finite check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .arith import FactoredModulus, factor, primes_up_to

Real = int | float | Fraction


@dataclass(frozen=True)
class DenseDivQuery:
    n: int
    i: int
    y: Real

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.i < 0:
            raise ValueError("multiplicity must be non-negative")
        if self.y < 1:
            raise ValueError("y must be at least 1")


@dataclass(frozen=True)
class ModuliInterval:
    """Primes p with lo < p < hi; enumeration stops at ``limit``."""

    lo: float = 1.0
    hi: float = math.inf
    limit: int = 1

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("need lo < hi")
        if self.limit < 1:
            raise ValueError("limit must be >= 1")


def _y_key(y: Real) -> Real:
    if isinstance(y, (int, Fraction)):
        return y
    return round(float(y), 9)


@lru_cache(maxsize=1 << 16)
def _divisors(n: int) -> tuple[int, ...]:
    return tuple(factor(n).divisors())


def _covers(vals: Sequence[int], n: int, y: Real) -> bool:
    if not vals or vals[0] != 1 or vals[-1] != n:
        return False
    return all(b <= y * a for a, b in zip(vals, vals[1:]))


@lru_cache(maxsize=1 << 20)
def _is_dd(n: int, i: int, y: Real) -> bool:
    if i == 0 or n == 1:
        return True
    divs = _divisors(n)
    if not _covers(divs, n, y):
        return False
    for j in range(i):
        k = i - 1 - j
        admissible = [r for r in divs if _is_dd(r, k, y) and _is_dd(n // r, j, y)]
        if not _covers(admissible, n, y):
            return False
    return True


def is_dd(n: int | FactoredModulus | DenseDivQuery, i: int = 1, y: Real = 1) -> bool:
    """Whether n is i-tuply y-densely divisible."""
    if isinstance(n, DenseDivQuery):
        n, i, y = n.n, n.i, n.y
    n = int(n)
    DenseDivQuery(n, i, y)
    return _is_dd(n, i, _y_key(y))


def dd_witness(n: int, i: int, j: int, k: int, y: Real, R: Real) -> tuple[int, int] | None:
    """A factorisation n = q r with R/y <= r <= R, q j-tuply and r k-tuply y-dd.

    The largest admissible r is returned.  ``None`` when no such factorisation
    exists for this R (in particular whenever n is not i-tuply y-dd).
    """
    if j + k != i - 1 or j < 0 or k < 0:
        raise ValueError("need j + k = i - 1 with j, k >= 0")
    if not 1 <= R <= y * n:
        raise ValueError("R must lie in [1, y n]")
    yk = _y_key(y)
    for r in reversed(_divisors(int(n))):
        if r > R:
            continue
        if r * y < R:
            break
        q = n // r
        if _is_dd(r, k, yk) and _is_dd(q, j, yk):
            return q, r
    return None


def _squarefree_products(primes: Sequence[int], limit: int) -> Iterator[tuple[int, tuple[int, ...]]]:
    stack = [(1, 0, ())]
    while stack:
        value, start, used = stack.pop()
        yield value, used
        for idx in range(start, len(primes)):
            p = primes[idx]
            if value * p > limit:
                break
            stack.append((value * p, idx + 1, used + (p,)))


def enumerate_moduli(
    interval: ModuliInterval,
    i: int = 1,
    y: Real | None = None,
    mode: str = "denselyDivisible",
) -> list[FactoredModulus]:
    """Squarefree q <= limit with every prime factor in the open interval, filtered by mode.

    ``denselyDivisible`` keeps i-tuply y-dd moduli, ``smooth`` keeps y-smooth
    ones (no extra filter when y is None) and ``allSquarefree`` keeps all.
    """
    if mode not in ("denselyDivisible", "smooth", "allSquarefree"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "denselyDivisible" and y is None:
        raise ValueError("densely divisible enumeration needs y")
    hi = min(interval.hi, interval.limit + 1)
    primes = [p for p in primes_up_to(int(math.ceil(hi))) if interval.lo < p < interval.hi]
    out = []
    for value, used in _squarefree_products(primes, interval.limit):
        if mode == "smooth" and y is not None and used and used[-1] > y:
            continue
        if mode == "denselyDivisible" and not is_dd(value, i, y):
            continue
        out.append(FactoredModulus(value, tuple((p, 1) for p in used)))
    out.sort(key=lambda fm: fm.value)
    return out
