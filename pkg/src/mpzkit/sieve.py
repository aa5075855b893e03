"""Segmented sieve for the von Mangoldt function on an interval."""

from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from .arith import primes_up_to

DEFAULT_SEGMENT = 1 << 18


def _mangoldt_segment(lo: int, hi: int, base_primes: np.ndarray) -> np.ndarray:
    """Lambda(n) for lo <= n < hi, given all primes up to sqrt(hi)."""
    size = hi - lo
    composite = np.zeros(size, dtype=bool)
    for p in base_primes:
        p = int(p)
        if p * p >= hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        composite[start - lo :: p] = True
    out = np.zeros(size, dtype=np.float64)
    n = np.arange(lo, hi, dtype=np.int64)
    prime = ~composite & (n >= 2)
    out[prime] = np.log(n[prime].astype(np.float64))
    # proper prime powers p^k, k >= 2, have p <= sqrt(hi)
    for p in base_primes:
        p = int(p)
        if p * p >= hi:
            break
        pk = p * p
        lp = math.log(p)
        while pk < hi:
            if pk >= lo:
                out[pk - lo] = lp
            pk *= p
    return out


def mangoldt_segments(lo: int, hi: int, segment: int = DEFAULT_SEGMENT) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (start, values) blocks covering lo <= n <= hi, in increasing order."""
    if lo < 1 or hi < lo:
        raise ValueError("need 1 <= lo <= hi")
    base = np.asarray(primes_up_to(math.isqrt(hi) + 1), dtype=np.int64)
    start = lo
    while start <= hi:
        stop = min(start + segment, hi + 1)
        yield start, _mangoldt_segment(start, stop, base)
        start = stop


def mangoldt_interval(lo: int, hi: int, segment: int = DEFAULT_SEGMENT) -> np.ndarray:
    """Lambda(n) for lo <= n <= hi as one array."""
    return np.concatenate([v for _, v in mangoldt_segments(lo, hi, segment)])
