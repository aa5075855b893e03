"""Normalised Fourier transform on Z/qZ, smooth cutoffs, completion of sums and
the q-van der Corput A-process.

FT_q(f)(h) = q^{-1/2} sum_x f(x) e_q(h x).  With this normalisation the
transform is unitary and FT_q(FT_q(f))(x) = f(-x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import sympy

from .bounds import BoundReport, make_report

MAX_DERIVATIVE = 8


@dataclass(frozen=True)
class PeriodicFunction:
    q: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (int(self.q),):
            raise ValueError(f"expected {self.q} values, got shape {vals.shape}")
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "values", vals)

    def __call__(self, x):
        return self.values[np.mod(x, self.q)]


def _as_values(f) -> np.ndarray:
    if isinstance(f, PeriodicFunction):
        return f.values
    return np.asarray(f, dtype=np.complex128)


def ft_q(f) -> np.ndarray:
    """Normalised DFT; numpy's FFT handles prime lengths via Bluestein internally."""
    vals = _as_values(f)
    q = vals.shape[0]
    return np.fft.ifft(vals) * math.sqrt(q)


def reflect(f) -> np.ndarray:
    """x -> f(-x) on Z/qZ."""
    vals = _as_values(f)
    return np.roll(vals[::-1], 1)


# ---------------------------------------------------------------------------
# smooth cutoffs

_T = sympy.Symbol("t")
_SHAPES = {
    # classical bump on (0, 1)
    "bump": sympy.exp(-1 / (_T * (1 - _T))),
    # flatter profile, same support
    "flatbump": sympy.exp(-1 / (_T * (1 - _T)) ** 2 / 16),
}


@lru_cache(maxsize=None)
def _shape_derivative(shape: str, order: int):
    if shape not in _SHAPES:
        raise ValueError(f"unknown cutoff shape {shape!r}; known: {sorted(_SHAPES)}")
    if not 0 <= order <= MAX_DERIVATIVE:
        raise ValueError(f"derivative order must be in [0, {MAX_DERIVATIVE}]")
    expr = sympy.diff(_SHAPES[shape], _T, order)
    return sympy.lambdify(_T, expr, "numpy")


@dataclass(frozen=True)
class SmoothCutoff:
    """psi_N(x) = psi((x - x0)/N) where psi is a bump supported on [c, C]."""

    x0: float
    N: float
    shape: str = "bump"
    support: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("cutoff scale N must be >= 1")
        c, C = self.support
        if not c < C:
            raise ValueError("support must satisfy c < C")
        _shape_derivative(self.shape, 0)

    @property
    def lo(self) -> float:
        return self.x0 + self.support[0] * self.N

    @property
    def hi(self) -> float:
        return self.x0 + self.support[1] * self.N

    def integer_range(self) -> np.ndarray:
        """All integers m with psi_N(m) possibly nonzero."""
        return np.arange(math.floor(self.lo), math.ceil(self.hi) + 1, dtype=np.int64)

    def derivative(self, order: int, x) -> np.ndarray:
        """d^order/dx^order of psi_N at x (chain rule brings N^{-order})."""
        c, C = self.support
        width = C - c
        t = (np.asarray(x, dtype=np.float64) - self.x0) / self.N
        u = (t - c) / width
        inside = (u > 0) & (u < 1)
        out = np.zeros(np.shape(u), dtype=np.float64)
        if np.any(inside):
            fn = _shape_derivative(self.shape, order)
            with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
                vals = np.asarray(fn(u[inside]), dtype=np.float64)
            # underflow at the very edge of the support can leave 0 * inf
            out[inside] = np.where(np.isfinite(vals), vals, 0.0)
        return out / (self.N * width) ** order

    def __call__(self, x) -> np.ndarray:
        return self.derivative(0, x)

    def weights(self) -> tuple[np.ndarray, np.ndarray]:
        m = self.integer_range()
        return m, self(m)

    def mass(self) -> float:
        """M' = sum over integers of psi_N(m)."""
        return math.fsum(self.weights()[1])


def make_cutoff(x0: float = 0.0, N: float = 1.0, shape: str = "bump", support=(0.0, 1.0)) -> SmoothCutoff:
    return SmoothCutoff(float(x0), float(N), shape, tuple(map(float, support)))


def cutoff_integral(shape: str = "bump") -> float:
    from scipy.integrate import quad

    fn = _shape_derivative(shape, 0)
    return quad(lambda t: float(fn(t)) if 0 < t < 1 else 0.0, 0.0, 1.0)[0]


# ---------------------------------------------------------------------------
# incomplete and completed sums


def incomplete_sum(f, cutoff: SmoothCutoff, congruence: tuple[int, int] | None = None) -> complex:
    """sum_m psi(m) f(m mod q), optionally restricted to m = a (mod d) with d | q."""
    vals = _as_values(f)
    q = vals.shape[0]
    m, w = cutoff.weights()
    if congruence is not None:
        a, d = congruence
        if q % d:
            raise ValueError(f"congruence modulus {d} must divide {q}")
        keep = np.mod(m - a, d) == 0
        m, w = m[keep], w[keep]
    terms = w * vals[np.mod(m, q)]
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def periodised_cutoff(cutoff: SmoothCutoff, q: int) -> np.ndarray:
    """psi_{M,q}(x) = sum_n psi_M(x + q n)."""
    m, w = cutoff.weights()
    return np.bincount(np.mod(m, q), weights=w, minlength=q).astype(np.complex128)


@dataclass
class CompletionReport:
    q: int
    mass: float
    main_term: complex
    exact_sum: complex
    exact_error: complex
    plancherel_residual: float
    sup_bound: float
    truncated_bound: float
    bound_terms: dict = field(default_factory=dict)


def completion_estimate(f, cutoff: SmoothCutoff, check_tol: float | None = 1e-9) -> CompletionReport:
    """Split sum_m psi(m) f(m) into the h = 0 term and the rest via Plancherel.

    The identity sum_m psi(m) f(m) = sum_h FT f(h) FT psi_{M,q}(-h) is checked
    against ``check_tol * q`` (pass ``None`` to skip the assertion).
    """
    vals = _as_values(f)
    q = vals.shape[0]
    exact = incomplete_sum(vals, cutoff)
    mass = cutoff.mass()
    total = complex(math.fsum(vals.real), math.fsum(vals.imag))
    main = mass / q * total
    if np.allclose(vals, vals[0], rtol=0, atol=0):
        # constant f: only h = 0 survives, and the split is exact
        exact_error = 0j
    else:
        exact_error = exact - main
    fhat = ft_q(vals)
    psihat = ft_q(periodised_cutoff(cutoff, q))
    plancherel = complex(np.sum(fhat * reflect(psihat)))
    residual = abs(plancherel - exact)
    if check_tol is not None and residual > check_tol * max(q, 1) * max(1.0, abs(exact)):
        raise AssertionError(f"completion identity failed: residual {residual:.3e}")
    nonzero = np.abs(fhat[1:]) if q > 1 else np.zeros(1)
    sup = math.sqrt(q) * float(nonzero.max(initial=0.0))
    M = cutoff.N
    hmax = int(q // M)
    hs = np.arange(1, q)
    centred = np.minimum(hs, q - hs)
    trunc = M / math.sqrt(q) * float(np.abs(fhat[1:])[centred <= hmax].sum()) if q > 1 else 0.0
    return CompletionReport(
        q=q,
        mass=mass,
        main_term=main,
        exact_sum=exact,
        exact_error=exact_error,
        plancherel_residual=residual,
        sup_bound=sup,
        truncated_bound=trunc,
        bound_terms={"sqrt_q_sup": sup, "truncated": trunc},
    )


def cutoff_decay_ratio(cutoff: SmoothCutoff, q: int) -> float:
    """max_h |Psi(h/q)| / (M (1 + |h| M/q)^{-2}), where Psi is the periodised transform."""
    psihat = np.abs(ft_q(periodised_cutoff(cutoff, q))) * math.sqrt(q)
    h = np.arange(q)
    centred = np.minimum(h, q - h)
    M = cutoff.N
    envelope = M * (1 + centred * M / q) ** -2.0
    return float(np.max(psihat / envelope))


# ---------------------------------------------------------------------------
# q-van der Corput


def vdc_bound(N: float, factors: tuple[int, ...]) -> float:
    """sum_{i<l} N^{1-2^-i} r_i^{2^-i} + N^{1-2^-(l-1)} r_l^{2^-l} for q = r_1 ... r_l."""
    l = len(factors)
    out = 0.0
    for i, r in enumerate(factors[:-1], start=1):
        out += N ** (1 - 2.0**-i) * r ** (2.0**-i)
    out += N ** (1 - 2.0 ** -(l - 1)) * factors[-1] ** (2.0**-l)
    return out


def vdc_estimate(f, cutoff: SmoothCutoff, r: int, s: int, depth: int = 1, s_split: tuple[int, int] | None = None) -> BoundReport:
    """Compare |sum psi_N(n) f(n)| with the van der Corput bound for q = r s.

    depth 1 uses N^{1/2} r^{1/2} + N^{1/2} s^{1/4}; depth 2 splits s = r2 r3
    (``s_split``) and uses the iterated three-factor bound.  Both add the
    (N/q)|complete sum| term, with all implied constants and q^eps set to 1.
    The extras record the diagonal and off-diagonal A(k, l) mass of the
    shifted sum, and check the Cauchy-Schwarz step exactly.
    """
    vals = _as_values(f)
    q = vals.shape[0]
    if r * s != q:
        raise ValueError(f"r s = {r * s} does not equal q = {q}")
    N = cutoff.N
    if N > q:
        raise ValueError("van der Corput estimate needs N <= q")
    actual = incomplete_sum(vals, cutoff)
    complete = abs(complex(np.sum(vals)))
    tail = N / q * complete
    if depth == 1:
        factors = (r, s)
    elif depth == 2:
        if s_split is None or s_split[0] * s_split[1] != s:
            raise ValueError("depth 2 needs s_split = (r2, r3) with r2 r3 = s")
        factors = (r, *s_split)
    else:
        raise ValueError("depth must be 1 or 2")
    bound = vdc_bound(N, factors) + tail
    extras = {"completion_bound": math.sqrt(q) + tail, "complete_sum_abs": complete}
    extras.update(_shift_diagnostics(vals, cutoff, r, actual))
    return make_report(actual, bound, f"vdc-depth{depth}", **extras)


def _shift_diagnostics(vals: np.ndarray, cutoff: SmoothCutoff, r: int, actual: complex) -> dict:
    q = vals.shape[0]
    K = int(cutoff.N // r)
    if K < 1:
        return {"K": 0}
    m = cutoff.integer_range()
    n = np.arange(m[0] - K * r, m[-1] + 1, dtype=np.int64)
    ks = np.arange(1, K + 1, dtype=np.int64)
    shifted = n[None, :] + ks[:, None] * r
    G = cutoff(shifted) * vals[np.mod(shifted, q)]
    A = G @ G.conj().T
    diag = float(np.abs(np.diag(A)).sum())
    off = float(np.abs(A).sum() - diag)
    rows = np.abs(G).sum(axis=0) > 0
    support = int(rows.sum())
    cs_rhs = math.sqrt(support * max(float(A.sum().real), 0.0)) / K
    return {
        "K": K,
        "diag_mass": diag,
        "offdiag_mass": off,
        "cauchy_schwarz_rhs": cs_rhs,
        "cauchy_schwarz_ok": abs(actual) <= cs_rhs * (1 + 1e-9) + 1e-9,
    }
