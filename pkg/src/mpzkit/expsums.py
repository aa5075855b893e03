"""Complete exponential sums over Z/qZ for squarefree q.

Hyper-Kloosterman sums are normalised as

    Kl_m(x; q) = q^{-(m-1)/2} sum_{x_1 ... x_m = x} e_q(x_1 + ... + x_m),

with the x_i ranging over all of Z/qZ.  Prime tables come from the
recursion Kl_m(x) = p^{-1/2} sum_{y != 0} Kl_{m-1}(1/y) e_p(x y), which is
one normalised DFT per step; composite moduli are assembled by CRT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import (
    TWO_PI_I,
    as_modulus,
    eq_eval,
    eq_vec,
    gcd_many,
    inverse_table,
    is_prime,
    mobius,
    squarefree_modulus,
)
from .bounds import BoundReport, make_report
from .completion import SmoothCutoff, ft_q, incomplete_sum
from .phase import RationalPhase, phase_derivative, phase_gcd, phase_values

DEFAULT_WEIL_C = 10.0


def _roots(q: int) -> np.ndarray:
    return np.exp(TWO_PI_I * np.arange(q) / q)


# ---------------------------------------------------------------------------
# Ramanujan, Weil and Kloosterman


def ramanujan(b: int, q) -> complex:
    """c_q(b) = sum over units n of e_q(b n), via sum_{d | (b, q)} d mu(q/d)."""
    fm = squarefree_modulus(q)
    g = math.gcd(b, fm.value)
    total = 0
    for p_set in _subsets(fm.prime_list):
        d = math.prod(p_set)
        if g % d == 0:
            total += d * mobius(fm.value // d)
    return complex(total)


def _subsets(primes):
    out = [()]
    for p in primes:
        out += [s + (p,) for s in out]
    return out


def complete_phase_sum(f: RationalPhase, q, C: float = DEFAULT_WEIL_C) -> BoundReport:
    """sum_{n mod q} e_q(f(n)) against C^{Omega(q)} q^{1/2} (f', q) / (f'', q)^{1/2}."""
    fm = squarefree_modulus(q)
    vals = phase_values(f, fm)
    actual = complex(math.fsum(vals.real), math.fsum(vals.imag))
    d1 = phase_derivative(f)
    d2 = phase_derivative(d1)
    g1, g2 = phase_gcd(fm, d1), phase_gcd(fm, d2)
    bound = C**fm.omega * math.sqrt(fm.value) * g1 / math.sqrt(g2)
    return make_report(actual, bound, "ramanujan-weil", gcd_f1=g1, gcd_f2=g2, C=C)


def kloosterman2(a: int, b: int, q) -> complex:
    """S(a, b; q) = sum over units x of e_q(a x + b / x)."""
    fm = squarefree_modulus(q)
    n = fm.value
    if n == 1:
        return 1.0 + 0j
    inv = inverse_table(n)
    x = np.arange(n, dtype=np.int64)
    x = x[inv != 0]
    phase = (a % n * x + b % n * inv[x]) % n
    return complex(_roots(n)[phase].sum())


def kloosterman2_all(p: int) -> np.ndarray:
    """S(1, c; p) for every c in F_p (so S(a, b; p) = S(1, ab; p) for units a)."""
    inv = inverse_table(p)
    g = np.zeros(p, dtype=np.complex128)
    y = np.arange(1, p)
    g[y] = _roots(p)[inv[y]]
    # sum_y e_p(1/y) e_p(c y) for all c
    return ft_q(g) * math.sqrt(p)


# ---------------------------------------------------------------------------
# hyper-Kloosterman sums


@dataclass(frozen=True)
class HKTable:
    m: int
    p: int
    values: np.ndarray

    def __getitem__(self, x):
        return self.values[np.mod(x, self.p)]


@lru_cache(maxsize=256)
def _hk_values(m: int, p: int) -> np.ndarray:
    if m < 1:
        raise ValueError("order must be >= 1")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    vals = _roots(p)
    inv = inverse_table(p)
    y = np.arange(1, p)
    for _ in range(m - 1):
        g = np.zeros(p, dtype=np.complex128)
        g[y] = vals[inv[y]]
        vals = ft_q(g)
    vals.setflags(write=False)
    return vals


def hk_table(m: int, p: int) -> HKTable:
    return HKTable(m, p, _hk_values(m, p))


def hk_direct(m: int, x: int, q: int) -> complex:
    """Kl_m(x; q) straight from the definition; cost q^m, for tiny q only."""
    grids = np.meshgrid(*[np.arange(q, dtype=np.int64)] * m, indexing="ij", sparse=False)
    prod = np.ones_like(grids[0])
    tot = np.zeros_like(grids[0])
    for g in grids:
        prod = prod * g % q
        tot = (tot + g) % q
    mask = prod == x % q
    return complex(_roots(q)[tot[mask]].sum()) / q ** ((m - 1) / 2)


def hk_direct_table(m: int, q: int) -> np.ndarray:
    """All of x -> Kl_m(x; q) from the defining m-fold sum (q^m work, any q)."""
    prod = np.ones(1, dtype=np.int64)
    tot = np.zeros(1, dtype=np.int64)
    r = np.arange(q, dtype=np.int64)
    for _ in range(m):
        prod = (prod[:, None] * r[None, :] % q).ravel()
        tot = ((tot[:, None] + r[None, :]) % q).ravel()
    w = _roots(q)[tot]
    out = np.bincount(prod, weights=w.real, minlength=q) + 1j * np.bincount(prod, weights=w.imag, minlength=q)
    return out / q ** ((m - 1) / 2)


def hyper_kloosterman(m: int, x: int, q) -> complex:
    """Kl_m(x; q) = prod_{p | q} Kl_m(q_p^{-m} x; p) with q_p = q/p."""
    fm = squarefree_modulus(q)
    out = 1.0 + 0j
    for p in fm.prime_list:
        cof = pow(fm.value // p, -m, p) if fm.value > p else 1
        out *= _hk_values(m, p)[x * cof % p]
    return out


def hyper_kloosterman_table(m: int, q) -> np.ndarray:
    """The whole table x -> Kl_m(x; q) on Z/qZ."""
    fm = squarefree_modulus(q)
    n = fm.value
    xs = np.arange(n, dtype=np.int64)
    out = np.ones(n, dtype=np.complex128)
    for p in fm.prime_list:
        cof = pow(n // p, -m, p) if n > p else 1
        out *= _hk_values(m, p)[xs * cof % p]
    return out


# ---------------------------------------------------------------------------
# the triple sum F(h, a; q)


def _triple_prime(h: tuple[int, int, int], a: int, p: int) -> complex:
    inv = inverse_table(p)
    roots = _roots(p)
    n1 = np.arange(1, p, dtype=np.int64)
    n2 = n1[:, None]
    n3 = a % p * inv[n1[None, :] * n2 % p] % p
    phase = (h[0] * n1[None, :] + h[1] * n2 + h[2] * n3) % p
    return complex(roots[phase].sum()) / p


def triple_sum_F(h: tuple[int, int, int], a: int, q, brute_limit: int = 500) -> complex:
    """F(h, a; q) = q^{-1} sum over unit triples with n1 n2 n3 = a of e_q(h . n)."""
    fm = squarefree_modulus(q)
    n = fm.value
    if math.gcd(a, n) != 1:
        raise ValueError("a must be a unit mod q")
    if n == 1:
        return 1.0 + 0j
    if n <= brute_limit:
        inv = inverse_table(n)
        units = np.flatnonzero(inv)
        n1 = units[None, :]
        n2 = units[:, None]
        n3 = a % n * inv[n1 * n2 % n] % n
        phase = (h[0] * n1 + h[1] * n2 + h[2] * n3) % n
        return complex(_roots(n)[phase].sum()) / n
    out = 1.0 + 0j
    for p in fm.prime_list:
        c = pow(n // p, -1, p)
        out *= _triple_prime(tuple(c * v % p for v in h), a, p)
    return out


# ---------------------------------------------------------------------------
# the two-parameter sum K_f


def _kf_raw(a, b, c, d, e, q: int) -> np.ndarray:
    """Table T[x] = sum_y e_q(1/((y+ax+b)(y+cx+d)) + e y) over y with a unit denominator."""
    inv = inverse_table(q)
    roots = _roots(q)
    x = np.arange(q, dtype=np.int64)[:, None]
    y = np.arange(q, dtype=np.int64)[None, :]
    D = (y + a * x + b) % q * ((y + c * x + d) % q) % q
    unit = inv[D] != 0
    phase = (inv[D] + e * y) % q
    return np.where(unit, roots[phase], 0).sum(axis=1)


@lru_cache(maxsize=128)
def _kf_table_cached(a, b, c, d, e, q, sign) -> np.ndarray:
    vals = sign * _kf_raw(a, b, c, d, e, q) / math.sqrt(q)
    vals.setflags(write=False)
    return vals


def kf_table(a: int, b: int, c: int, d: int, e: int, q, normalization: str = "paperMinus") -> np.ndarray:
    """x -> K_f(x; q) for every x in Z/qZ."""
    fm = squarefree_modulus(q)
    if math.gcd(a - c, fm.value) != 1:
        raise ValueError("K_f needs gcd(a - c, q) = 1")
    sign = {"paperMinus": -1.0, "corollaryPlus": 1.0}.get(normalization)
    if sign is None:
        raise ValueError(f"unknown normalization {normalization!r}")
    n = fm.value
    return _kf_table_cached(a % n, b % n, c % n, d % n, e % n, n, sign)


def kf_sum(a: int, b: int, c: int, d: int, e: int, x: int, q, normalization: str = "paperMinus") -> complex:
    return complex(kf_table(a, b, c, d, e, q, normalization)[x % as_modulus(q).value])


def fourier_trace(t: np.ndarray) -> np.ndarray:
    """FT_psi(t)(x) = -p^{-1/2} sum_y t(y) e_p(x y)."""
    return -ft_q(t)


def kf_fourier_closed_form(a: int, b: int, c: int, d: int, e: int, p: int) -> np.ndarray:
    """Closed form of z -> FT_psi(K_f)(z) on F_p.

    With w = (z - e a)/(c - a) the transform is e_p(-e b - w (d - b)) G(w), where
    G(w) = Kl_3(w (e - w); p) except at w = e = 0, where G = -(p - 1)/p.
    For (a, b, c, d) = (1, 0, 0, 0) this is Kl_3(z (e - z); p).
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if (a - c) % p == 0:
        raise ValueError("need a != c mod p")
    kl = _hk_values(3, p)
    z = np.arange(p, dtype=np.int64)
    w = (z - e * a) % p * pow(c - a, -1, p) % p
    G = kl[w * (e - w) % p].copy()
    if e % p == 0:
        G[w == 0] = -(p - 1) / p
    twist = _roots(p)[(-e * b - w * (d - b)) % p]
    return twist * G


def inctrace_estimate(
    params: tuple[int, int, int, int, int],
    q,
    cutoff: SmoothCutoff,
    r: int | None = None,
) -> BoundReport:
    """|sum_n psi_N(n) K(n; q)| for the plus-normalised K_f against q^{1/2}(1 + N/q).

    With a factor r of q (and N <= q) the bound is N^{1/2} r^{1/2} + N^{1/2} s^{1/4}
    where s = q / r; the smaller of the two is used.
    """
    fm = squarefree_modulus(q)
    table = kf_table(*params, fm.value, normalization="corollaryPlus")
    actual = incomplete_sum(table, cutoff)
    N = cutoff.N
    b0 = math.sqrt(fm.value) * (1 + N / fm.value)
    extras = {"bound_complete": b0}
    bound, formula = b0, "inctrace-complete"
    if r is not None:
        if fm.value % r:
            raise ValueError(f"{r} does not divide {fm.value}")
        s = fm.value // r
        if N <= fm.value:
            b1 = math.sqrt(N * r) + math.sqrt(N) * s**0.25
            extras["bound_vdc"] = b1
            if b1 < bound:
                bound, formula = b1, "inctrace-vdc"
    return make_report(actual, bound, formula, **extras)


# ---------------------------------------------------------------------------
# correlations


def kl_correlation(m: int, a: int, b: int, p: int, first_moment: bool = False) -> BoundReport:
    """sum over x in F_p^* of Kl_m(x) conj(Kl_m(a x)) e_p(b x), or sum Kl_m(x) e_p(b x)."""
    kl = _hk_values(m, p)
    x = np.arange(1, p, dtype=np.int64)
    if first_moment:
        terms = kl[x] * _roots(p)[b * x % p]
        formula = "kls-first-moment"
    else:
        if a % p == 1 and b % p == 0:
            raise ValueError("the diagonal case a = 1, b = 0 has no cancellation")
        if a % p == 0:
            raise ValueError("a must be a unit")
        terms = kl[x] * np.conj(kl[a * x % p]) * _roots(p)[b * x % p]
        formula = "kls-correlation"
    actual = complex(terms.sum())
    return make_report(actual, math.sqrt(p), formula, m=m, a=a, b=b, p=p)


def kl_correlation_max(m: int, p: int) -> tuple[float, int, int]:
    """max over (a, b) != (1, 0) of |correlation| / sqrt(p), with the maximiser."""
    kl = _hk_values(m, p)
    x = np.arange(p, dtype=np.int64)
    best = (0.0, 1, 1)
    for a in range(1, p):
        g = kl * np.conj(kl[a * x % p])
        g[0] = 0
        sums = np.abs(ft_q(g))  # already divided by sqrt(p)
        if a == 1:
            sums[0] = 0.0
        b = int(np.argmax(sums))
        if sums[b] > best[0]:
            best = (float(sums[b]), a, b)
    return best


def composite_correlation(
    s: int,
    r1: int,
    r2: int,
    a1: int,
    a2: int,
    n: int = 0,
    cutoff: SmoothCutoff | None = None,
) -> BoundReport:
    """Correlation of Kl_3(a1 h; r1 s) and Kl_3(a2 h; r2 s) over units h mod s[r1, r2].

    Without a cutoff this is the complete sum twisted by e_{[r1,r2]s}(n h);
    with a cutoff psi_H it is the smoothed sum over integers h coprime to
    s[r1, r2] (no twist).
    """
    for v in (s, r1, r2):
        squarefree_modulus(v)
    if math.gcd(s, r1) != 1 or math.gcd(s, r2) != 1:
        raise ValueError("need gcd(s, r1) = gcd(s, r2) = 1")
    L = r1 * r2 // math.gcd(r1, r2)
    M = s * L
    if math.gcd(a1, r1 * s) != 1 or math.gcd(a2, r2 * s) != 1:
        raise ValueError("a1, a2 must be units")
    k1 = hyper_kloosterman_table(3, r1 * s)
    k2 = hyper_kloosterman_table(3, r2 * s)
    g1 = gcd_many([a2 - a1, r1, r2]) if cutoff is not None else gcd_many([a2 - a1, n, r1, r2])
    c2 = a2 * r1**3 - a1 * r2**3
    g2 = math.gcd(c2, s) if cutoff is not None else gcd_many([c2, n, s])
    base = math.sqrt(s * L * g1 * g2)
    if cutoff is None:
        h = np.arange(M, dtype=np.int64)
        h = h[np.gcd(h, M) == 1]
        terms = k1[a1 * h % (r1 * s)] * np.conj(k2[a2 * h % (r2 * s)]) * _roots(M)[n * h % M]
        return make_report(complex(terms.sum()), base, "kl-correlation-complete", modulus=M)
    h, w = cutoff.weights()
    keep = np.gcd(h, M) == 1
    h, w = h[keep], w[keep]
    terms = w * k1[np.mod(a1 * h, r1 * s)] * np.conj(k2[np.mod(a2 * h, r2 * s)])
    bound = (cutoff.N / M + 1) * base
    return make_report(complex(terms.sum()), bound, "kl-correlation-smoothed", modulus=M)


# ---------------------------------------------------------------------------
# the Type I phase and the sums built from it


@dataclass(frozen=True)
class PhiParams:
    h: int
    n: int
    r: int
    q0: int
    q1: int
    q2: int
    a: int
    b1: int
    b2: int
    ell: int


def phi_ell_eval(p: PhiParams) -> complex:
    """e_r(a h/(n q0 q1 q2)) e_{q0 q1}(b1 h/(n r q2)) e_{q2}(b2 h/((n + l r) r q0 q1))."""
    return (
        eq_eval((p.a * p.h, p.n * p.q0 * p.q1 * p.q2), p.r)
        * eq_eval((p.b1 * p.h, p.n * p.r * p.q2), p.q0 * p.q1)
        * eq_eval((p.b2 * p.h, (p.n + p.ell * p.r) * p.r * p.q0 * p.q1), p.q2)
    )


def _phi_vec(h, n, r, q0, q1, q2, a, b1, b2, ell) -> np.ndarray:
    n = np.asarray(n, dtype=np.int64)
    out = np.ones(n.shape, dtype=np.complex128)
    if r > 1:
        out *= eq_vec(a * h % r, np.mod(n, r) * (q0 * q1 * q2 % r) % r, r)
    if q0 * q1 > 1:
        m = q0 * q1
        out *= eq_vec(b1 * h % m, np.mod(n, m) * (r * q2 % m) % m, m)
    if q2 > 1:
        out *= eq_vec(b2 * h % q2, np.mod(n + ell * r, q2) * (r * q0 * q1 % q2) % q2, q2)
    return out


def s_ell_r(
    h1: int,
    h2: int,
    q1: int,
    q2: int,
    s1: int,
    s2: int,
    r: int,
    q0: int,
    a: int,
    b1: int,
    b2: int,
    ell: int,
    cutoff: SmoothCutoff,
) -> complex:
    """sum_n C(n) psi_N(n) Phi(h1, n, r, q0, q1, q2) conj(Phi(h2, n, r, q0, s1, s2)).

    C(n) is the indicator of b1 (n + l r) = b2 n (mod q0), the cross-multiplied
    form of b1/n = b2/(n + l r).
    """
    n, w = cutoff.weights()
    keep = np.mod(b1 * (n + ell * r) - b2 * n, q0) == 0
    n, w = n[keep], w[keep]
    t1 = _phi_vec(h1, n, r, q0, q1, q2, a, b1, b2, ell)
    t2 = _phi_vec(h2, n, r, q0, s1, s2, a, b1, b2, ell)
    return complex(np.sum(w * t1 * np.conj(t2)))


# ---------------------------------------------------------------------------
# sums with two shifted inverses


def dork_sum(d1: int, d2: int, c1: int, c2: int, l1: int, l2: int, C: float = 1.0) -> BoundReport:
    """sum_{n mod [d1, d2]} e_{d1}(c1/(n + l1)) e_{d2}(c2/(n + l2))."""
    squarefree_modulus(d1)
    squarefree_modulus(d2)
    g = math.gcd(d1, d2)
    L = d1 * d2 // g
    n = np.arange(L, dtype=np.int64)
    vals = np.ones(L, dtype=np.complex128)
    if d1 > 1:
        vals *= eq_vec(np.full(L, c1 % d1), np.mod(n + l1, d1), d1)
    if d2 > 1:
        vals *= eq_vec(np.full(L, c2 % d2), np.mod(n + l2, d2), d2)
    actual = complex(vals.sum())
    delta1, delta2 = d1 // g, d2 // g
    base = math.gcd(c1, delta1) * math.gcd(c2, delta2) * g
    omega = as_modulus(L).big_omega
    rep = make_report(actual, C**omega * base, "dork", base=base, omega=omega)
    rep.extras["measured_C"] = (rep.actual_abs / base) ** (1 / omega) if omega and base else 0.0
    return rep


@dataclass(frozen=True)
class TwoVarSumSpec:
    m: int
    alpha: int
    beta: int
    gamma1: int
    gamma2: int
    l: int
    q0: int
    d0: int
    n0: int
    cutoff_d: SmoothCutoff
    cutoff_n: SmoothCutoff
    y: float = 1.0

    def __post_init__(self):
        squarefree_modulus(self.m)
        if self.m % self.q0:
            raise ValueError("q0 must divide m")


def two_var_sum(spec: TwoVarSumSpec) -> BoundReport:
    """sum over d = d0, n = n0 (q0) of psi_D(d) psi'_N(n) e_m(alpha l / ((n + beta d + g1)(n + (beta + l) d + g2)))."""
    m, q0 = spec.m, spec.q0
    d, wd = spec.cutoff_d.weights()
    n, wn = spec.cutoff_n.weights()
    kd = np.mod(d - spec.d0, q0) == 0
    kn = np.mod(n - spec.n0, q0) == 0
    d, wd, n, wn = d[kd], wd[kd], n[kn], wn[kn]
    D1 = np.mod(n[None, :] + spec.beta * d[:, None] + spec.gamma1, m)
    D2 = np.mod(n[None, :] + (spec.beta + spec.l) * d[:, None] + spec.gamma2, m)
    num = spec.alpha * spec.l % m
    if m > 1:
        vals = eq_vec(np.full(D1.shape, num), D1 * D2 % m, m)
    else:
        vals = np.ones(D1.shape, dtype=np.complex128)
    actual = complex(wd @ vals @ wn)
    g = math.gcd(num, m)
    Delta, N, y = spec.cutoff_d.N, spec.cutoff_n.N, spec.y
    front = g * (N / (q0 * math.sqrt(m)) + math.sqrt(m))
    bound1 = front * (1 + math.sqrt(Delta / q0) * m ** (1 / 6) * y ** (1 / 6) + Delta / q0 / math.sqrt(m))
    bound2 = front * (math.sqrt(m) + Delta / q0 / math.sqrt(m))
    rep = make_report(actual, bound2, "two-variable-2", gcd=g)
    rep.extras["bound1"] = bound1
    rep.extras["ratio1"] = rep.actual_abs / bound1
    return rep


def two_var_direct(spec: TwoVarSumSpec) -> complex:
    """Plain double loop, used as an oracle."""
    total = 0j
    for d in spec.cutoff_d.integer_range():
        if (d - spec.d0) % spec.q0:
            continue
        wd = float(spec.cutoff_d(d))
        if wd == 0:
            continue
        for n in spec.cutoff_n.integer_range():
            if (n - spec.n0) % spec.q0:
                continue
            wn = float(spec.cutoff_n(n))
            if wn == 0:
                continue
            den = (n + spec.beta * d + spec.gamma1) * (n + (spec.beta + spec.l) * d + spec.gamma2)
            total += wd * wn * eq_eval((spec.alpha * spec.l, int(den)), spec.m)
    return total

