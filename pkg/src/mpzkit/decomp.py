"""Dirichlet convolution, discrepancies, the Heath-Brown and Vaughan identities,
and the combinatorial Type 0 / I-II / III (IV, V) classifier.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .arith import as_modulus, euler_phi, factor, mangoldt_array, mobius_array

# ---------------------------------------------------------------------------
# coefficient sequences


@dataclass
class CoefficientSeq:
    """alpha(n) for 1 <= n < len(values); values[0] is unused and kept at 0."""

    values: np.ndarray
    scale: float | None = None
    smooth: bool = False
    siegel_walfisz: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.dtype.kind not in "fc":
            vals = vals.astype(np.float64)
        vals = vals.copy()
        if vals.size:
            vals[0] = 0
        self.values = vals

    @classmethod
    def from_dict(cls, support: dict[int, complex], **meta) -> "CoefficientSeq":
        top = max(support, default=0)
        complex_vals = any(isinstance(v, complex) for v in support.values())
        vals = np.zeros(top + 1, dtype=np.complex128 if complex_vals else np.float64)
        for n, v in support.items():
            if n < 1:
                raise ValueError("coefficient sequences live on the positive integers")
            vals[n] = v
        return cls(vals, **meta)

    @classmethod
    def from_function(cls, fn, limit: int, lo: int = 1, **meta) -> "CoefficientSeq":
        vals = np.zeros(limit + 1)
        for n in range(max(lo, 1), limit + 1):
            vals[n] = fn(n)
        return cls(vals, **meta)

    @property
    def limit(self) -> int:
        return len(self.values) - 1

    def __call__(self, n: int):
        return self.values[n] if 0 < n < len(self.values) else 0.0

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values)

    def restrict(self, lo: int, hi: int) -> "CoefficientSeq":
        vals = self.values.copy()
        vals[: max(lo, 0)] = 0
        vals[hi + 1 :] = 0
        return CoefficientSeq(vals, self.scale, self.smooth, self.siegel_walfisz)

    def __add__(self, other: "CoefficientSeq") -> "CoefficientSeq":
        n = max(len(self.values), len(other.values))
        a = np.zeros(n, dtype=np.result_type(self.values, other.values))
        a[: len(self.values)] += self.values
        a[: len(other.values)] += other.values
        return CoefficientSeq(a)

    def scaled(self, c) -> "CoefficientSeq":
        return CoefficientSeq(self.values * c, self.scale, self.smooth, self.siegel_walfisz)


def ones(limit: int) -> CoefficientSeq:
    return CoefficientSeq(np.ones(limit + 1))


def log_seq(limit: int) -> CoefficientSeq:
    vals = np.zeros(limit + 1)
    vals[1:] = np.log(np.arange(1, limit + 1))
    return CoefficientSeq(vals)


def mobius_seq(limit: int, cutoff: float | None = None, above: bool = False) -> CoefficientSeq:
    """mu(n), truncated to n <= cutoff (or to n > cutoff when ``above``)."""
    vals = mobius_array(limit).astype(np.float64)
    if cutoff is not None:
        idx = np.arange(limit + 1)
        vals[(idx > cutoff) if not above else (idx <= cutoff)] = 0
    return CoefficientSeq(vals)


def mangoldt_seq(limit: int) -> CoefficientSeq:
    return CoefficientSeq(mangoldt_array(limit))


def dirichlet_convolve(alpha: CoefficientSeq, beta: CoefficientSeq, limit: int | None = None) -> CoefficientSeq:
    """(alpha * beta)(n) = sum_{d | n} alpha(d) beta(n/d), for n <= limit."""
    if limit is None:
        limit = alpha.limit * beta.limit
    dtype = np.result_type(alpha.values, beta.values)
    out = np.zeros(limit + 1, dtype=dtype)
    a, b = alpha.values, beta.values
    if len(alpha.support()) > len(beta.support()):
        a, b = b, a
    for d in np.flatnonzero(a):
        d = int(d)
        if d > limit:
            break
        top = min(limit // d, len(b) - 1)
        out[d : d * top + 1 : d] += a[d] * b[1 : top + 1]
    return CoefficientSeq(out)


def convolve_many(seqs: Sequence[CoefficientSeq], limit: int) -> CoefficientSeq:
    acc = seqs[0].restrict(0, limit)
    for s in seqs[1:]:
        acc = dirichlet_convolve(acc, s, limit)
    return acc


def discrepancy(alpha: CoefficientSeq, a: int, q) -> complex:
    """sum_{n = a (q)} alpha(n) - phi(q)^{-1} sum_{(n, q) = 1} alpha(n)."""
    qv = as_modulus(q).value
    if math.gcd(a, qv) != 1:
        raise ValueError(f"residue {a} is not primitive modulo {qv}")
    vals = alpha.values
    n = np.arange(len(vals))
    in_class = vals[(n % qv) == (a % qv)]
    coprime = vals[np.gcd(n, qv) == 1]
    main = complex(np.sum(in_class))
    avg = complex(np.sum(coprime)) / euler_phi(qv)
    return main - avg


# ---------------------------------------------------------------------------
# Heath-Brown and Vaughan


@dataclass
class HeathBrownTable:
    K: int
    x: float
    lo: int
    hi: int
    terms: np.ndarray  # shape (K, hi - lo + 1)
    mangoldt: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.terms.sum(axis=0)

    @property
    def residual(self) -> np.ndarray:
        return np.abs(self.total - self.mangoldt)


def heath_brown_table(K: int, x: float) -> HeathBrownTable:
    """Every term of the K-fold identity on the integers of [x, 2x]."""
    if not 1 <= K <= 10:
        raise ValueError("K must be between 1 and 10")
    limit = int(math.floor(2 * x))
    lo = int(math.ceil(x))
    cut = (2 * x) ** (1.0 / K)
    mu_le = mobius_seq(limit, cutoff=cut * (1 + 1e-12))
    one = ones(limit)
    L = log_seq(limit)
    terms = np.zeros((K, limit - lo + 1))
    mu_power = mu_le
    one_power = None
    for j in range(1, K + 1):
        if j > 1:
            mu_power = dirichlet_convolve(mu_power, mu_le, limit)
            one_power = one if one_power is None else dirichlet_convolve(one_power, one, limit)
        acc = mu_power if one_power is None else dirichlet_convolve(mu_power, one_power, limit)
        acc = dirichlet_convolve(acc, L, limit)
        terms[j - 1] = (-1) ** (j - 1) * math.comb(K, j) * acc.values[lo : limit + 1]
    lam = mangoldt_array(limit)[lo : limit + 1]
    return HeathBrownTable(K, x, lo, limit, terms, lam)


def heath_brown_terms(K: int, x: float, n: int) -> dict:
    """The K signed terms of the identity at n, their sum, Lambda(n) and the residual."""
    if not x <= n <= 2 * x:
        raise ValueError(f"n = {n} lies outside [x, 2x]")
    table = heath_brown_table(K, x)
    col = n - table.lo
    terms = table.terms[:, col].tolist()
    total = math.fsum(terms)
    lam = float(table.mangoldt[col])
    return {"terms": terms, "sum": total, "mangoldt": lam, "residual": abs(total - lam)}


@lru_cache(maxsize=8)
def _mu_lambda_upto(limit: int):
    return mobius_array(limit), mangoldt_array(limit)


def _mu_lambda(n: int):
    size = 1 << max(n, 1).bit_length()
    return _mu_lambda_upto(size)


def vaughan_terms(U: float, V: float, n: int) -> dict:
    """mu_< * L, -mu_< * Lambda_< * 1 and mu_>= * Lambda_>= * 1 at n.

    The three terms add up to Lambda(n) 1_{n >= V}.
    """
    if U <= 1 or V <= 1:
        raise ValueError("need U, V > 1")
    mu, lam = _mu_lambda(n)
    divs = factor(n).divisors()
    t1 = math.fsum(mu[d] * math.log(n // d) for d in divs if d < U)
    t2 = 0.0
    t3 = 0.0
    for d in divs:
        if mu[d] == 0:
            continue
        for e in factor(n // d).divisors():
            if lam[e] == 0:
                continue
            if d < U and e < V:
                t2 -= mu[d] * lam[e]
            elif d >= U and e >= V:
                t3 += mu[d] * lam[e]
    target = float(lam[n]) if n >= V else 0.0
    total = t1 + t2 + t3
    return {"terms": [float(t1), float(t2), float(t3)], "sum": float(total), "target": target, "residual": float(abs(total - target))}


# ---------------------------------------------------------------------------
# classification of exponent tuples


@dataclass(frozen=True)
class TypeClassification:
    variant: str  # "Type0", "TypeI_II", "TypeIII", "TypeIV", "TypeV", "infeasible"
    indices: tuple[int, ...] = ()
    partition: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    flags: tuple[str, ...] = field(default_factory=tuple)


def _validate(t: Sequence, sigma, lo: Fraction) -> tuple[list[Fraction], Fraction]:
    tt = [Fraction(v) for v in t]
    s = Fraction(sigma)
    if not lo < s < Fraction(1, 2):
        raise ValueError(f"sigma must lie in ({lo}, 1/2)")
    if any(v < 0 for v in tt):
        raise ValueError("entries must be non-negative")
    if sum(tt) != 1:
        raise ValueError("entries must sum to exactly 1")
    return tt, s


def _subset_sums(tt: list[Fraction], s: Fraction) -> tuple[np.ndarray, int]:
    """All 2^n subset sums scaled to integers, indexed by bitmask.

    The scale makes 1/2 - s and 1/2 + s integral too, so comparisons stay exact.
    """
    den = math.lcm(2, s.denominator, *[v.denominator for v in tt])
    ints = [int(v * den) for v in tt]
    sums = np.zeros(1, dtype=object if max(ints, default=0) * len(ints) > 2**62 else np.int64)
    for v in ints:
        sums = np.concatenate([sums, sums + v])
    return sums, den


def _gap_subset(tt: list[Fraction], s: Fraction) -> int | None:
    """Bitmask of a subset with sum strictly inside (1/2 - s, 1/2 + s), if any."""
    sums, den = _subset_sums(tt, s)
    lo, hi = int((Fraction(1, 2) - s) * den), int((Fraction(1, 2) + s) * den)
    hits = np.flatnonzero((sums > lo) & (sums < hi)) if sums.dtype != object else [
        i for i, v in enumerate(sums) if lo < v < hi
    ]
    return int(hits[0]) if len(hits) else None


def _partition(mask: int, n: int, tt: list[Fraction]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    A = tuple(i for i in range(n) if mask >> i & 1)
    B = tuple(i for i in range(n) if not mask >> i & 1)
    if sum(tt[i] for i in A) > sum(tt[i] for i in B):
        A, B = B, A
    return A, B


def _type0(tt, s):
    for i, v in enumerate(tt):
        if v >= Fraction(1, 2) + s:
            return i
    return None


def is_type_iii(tt, s, idx) -> bool:
    i, j, k = sorted(idx, key=lambda a: tt[a])
    half_lo, half_hi = Fraction(1, 2) - s, Fraction(1, 2) + s
    if len({i, j, k}) < 3:
        return False
    if not (2 * s <= tt[i] and tt[k] <= half_lo):
        return False
    return tt[i] + tt[j] >= half_hi and tt[i] + tt[k] >= half_hi and tt[j] + tt[k] >= half_hi


def is_type_iv(tt, s, idx) -> bool:
    idx = sorted(idx, key=lambda a: tt[a])
    if len(set(idx)) < 4:
        return False
    v = [tt[a] for a in idx]
    return 2 * s <= v[0] and v[-1] <= Fraction(1, 2) - s and v[0] + v[-1] >= Fraction(1, 2) + s


def is_type_v(tt, s, idx) -> bool:
    idx = sorted(idx, key=lambda a: tt[a])
    if len(set(idx)) < 5:
        return False
    v = [tt[a] for a in idx]
    return 2 * s <= v[0] and v[-1] <= Fraction(1, 2) - s and v[0] + v[1] + v[2] >= Fraction(1, 2) + s


def is_type_i_ii(tt, s, partition) -> bool:
    S, T = partition
    if sorted(S + T) != list(range(len(tt))):
        return False
    a, b = sum((tt[i] for i in S), Fraction(0)), sum((tt[i] for i in T), Fraction(0))
    return Fraction(1, 2) - s < a <= b < Fraction(1, 2) + s


def powerful_elements(tt: list[Fraction], s: Fraction) -> list[int]:
    """Indices i for which some small S not containing i has S + {i} large."""
    n = len(tt)
    sums, den = _subset_sums(tt, s)
    small = sums <= int((Fraction(1, 2) - s) * den)
    large = sums >= int((Fraction(1, 2) + s) * den)
    masks = np.arange(len(sums))
    out = []
    for i in range(n):
        bit = 1 << i
        without = masks[(masks & bit) == 0]
        if np.any(small[without] & large[without | bit]):
            out.append(i)
    return out


def classify(t: Sequence, sigma) -> TypeClassification:
    """Type 0, else Type I/II, else the Type III triple of powerful elements."""
    tt, s = _validate(t, sigma, Fraction(1, 10))
    i = _type0(tt, s)
    if i is not None:
        return TypeClassification("Type0", (i,))
    mask = _gap_subset(tt, s)
    if mask is not None:
        return TypeClassification("TypeI_II", partition=_partition(mask, len(tt), tt))
    power = powerful_elements(tt, s)
    triple = tuple(sorted(power, key=lambda a: (tt[a], a)))
    if len(triple) != 3 or not is_type_iii(tt, s, triple):
        raise AssertionError(f"constructive classification failed for {tt}, sigma={s}")
    return TypeClassification("TypeIII", triple)


def _search(tt, s, size, test):
    order = sorted(range(len(tt)), key=lambda a: (tt[a], a))
    for combo in itertools.combinations(order, size):
        if test(tt, s, combo):
            return tuple(combo)
    return None


def classify_exhaustive(t: Sequence, sigma, extended: bool = False) -> TypeClassification:
    """Brute-force search for each alternative in the order 0, I/II, III, IV, V."""
    tt, s = _validate(t, sigma, Fraction(1, 14) if extended else Fraction(1, 10))
    for i, v in enumerate(tt):
        if v >= Fraction(1, 2) + s:
            return TypeClassification("Type0", (i,))
    n = len(tt)
    # subset sums as a 0/1 matrix product, in exact integer units
    den = math.lcm(2, s.denominator, *[v.denominator for v in tt])
    ints = [int(v * den) for v in tt]
    wide = den * 2 > 2**62
    bits = (np.arange(1 << n)[:, None] >> np.arange(n)[None, :]) & 1
    sums = bits.astype(object if wide else np.int64) @ np.array(ints, dtype=object if wide else np.int64)
    lo, hi = int((Fraction(1, 2) - s) * den), int((Fraction(1, 2) + s) * den)
    inside = [lo < v < hi for v in sums] if wide else (sums > lo) & (sums < hi)
    for mask in np.flatnonzero(inside):
        part = _partition(int(mask), n, tt)
        if is_type_i_ii(tt, s, part):
            return TypeClassification("TypeI_II", partition=part)
    found = _search(tt, s, 3, is_type_iii)
    if found:
        return TypeClassification("TypeIII", found)
    if not extended:
        return TypeClassification("infeasible")
    iv = _search(tt, s, 4, is_type_iv)
    v = _search(tt, s, 5, is_type_v)
    flags = ("TypeIV_and_TypeV",) if iv and v else ()
    if iv:
        return TypeClassification("TypeIV", iv, flags=flags)
    if v:
        return TypeClassification("TypeV", v, flags=flags)
    return TypeClassification("infeasible")


def classify_extended(t: Sequence, sigma) -> TypeClassification:
    """Classification for 1/14 < sigma < 1/2 admitting Types IV and V.

    Preference order is 0, I/II, III, IV, V; when both IV and V witnesses
    exist the result carries the flag ``TypeIV_and_TypeV``.
    """
    return classify_exhaustive(t, sigma, extended=True)


def verify_classification(t: Sequence, sigma, c: TypeClassification) -> bool:
    tt = [Fraction(v) for v in t]
    s = Fraction(sigma)
    if c.variant == "Type0":
        return tt[c.indices[0]] >= Fraction(1, 2) + s
    if c.variant == "TypeI_II":
        return is_type_i_ii(tt, s, c.partition)
    if c.variant == "TypeIII":
        return is_type_iii(tt, s, c.indices)
    if c.variant == "TypeIV":
        return is_type_iv(tt, s, c.indices)
    if c.variant == "TypeV":
        return is_type_v(tt, s, c.indices)
    return False
