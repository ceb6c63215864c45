"""Truncated Fock space in the orthonormal monomial basis e_n(z) = z^n / sqrt(n!).

Entire functions appear in two guises here: a ``TaylorSeries`` (coefficients of
z^n) and a ``FockVector`` (coefficients in the orthonormal basis). The two
differ by the factor sqrt(n!), which is always produced from log-Gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.special import gammaln

from .errors import DimensionMismatchError, TruncationOverflowError
from .linalg import Subspace, orthonormalize

DEFAULT_TRUNCATION = 40
MAGNITUDE_GUARD = 1e300
_LOG_GUARD = math.log(MAGNITUDE_GUARD)


def _check_log_magnitude(log_mag, what: str):
    if np.max(log_mag, initial=-np.inf) > _LOG_GUARD:
        raise TruncationOverflowError(f"{what} exceeds {MAGNITUDE_GUARD:g}")


def log_factorials(N: int) -> np.ndarray:
    return gammaln(np.arange(N + 1) + 1.0)


def sqrt_factorials(N: int) -> np.ndarray:
    """sqrt(n!) for n = 0..N, guarded against overflow."""
    if N < 0:
        raise ValueError("truncation must be non-negative")
    half = 0.5 * log_factorials(N)
    _check_log_magnitude(half, f"sqrt({N}!)")
    return np.exp(half)


def _frozen(arr) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficients must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TaylorSeries:
    """f(z) = sum_n coeffs[n] z^n (finite)."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs))

    @property
    def max_degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def derivative(self, k: int = 1) -> "TaylorSeries":
        c = np.array(self.coeffs)
        for _ in range(k):
            if len(c) <= 1:
                return TaylorSeries([0.0])
            c = c[1:] * np.arange(1, len(c))
        return TaylorSeries(c)


@dataclass(frozen=True, eq=False)
class FockVector:
    """Element of the truncated Fock space; ``coeffs[n]`` multiplies e_n."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs))

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


@dataclass(frozen=True)
class KernelSpec:
    """Parameters of the generalized kernel x -> (a x + b)^k exp(x conj(z))."""

    z: complex
    a: complex = 1.0
    b: complex = 0.0
    k: int = 0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise ValueError("kernel order k must be a non-negative integer")
        for name in ("z", "a", "b"):
            if not np.isfinite(complex(getattr(self, name))):
                raise ValueError(f"kernel parameter {name} must be finite")


def _coeff_array(v) -> np.ndarray:
    if isinstance(v, (FockVector, TaylorSeries)):
        return v.coeffs
    return np.asarray(v, dtype=complex)


def taylor_to_fock(t: TaylorSeries, N: int) -> FockVector:
    if N < 0:
        raise ValueError("truncation must be non-negative")
    out = np.zeros(N + 1, dtype=complex)
    n = min(N, t.max_degree)
    out[: n + 1] = t.coeffs[: n + 1]
    return FockVector(out * sqrt_factorials(N))


def fock_to_taylor(v: FockVector) -> TaylorSeries:
    return TaylorSeries(v.coeffs / sqrt_factorials(v.truncation))


def inner(f, g) -> complex:
    """<f, g>, linear in the first slot."""
    fc, gc = _coeff_array(f), _coeff_array(g)
    if fc.shape != gc.shape:
        raise DimensionMismatchError(f"truncations differ: {len(fc) - 1} vs {len(gc) - 1}")
    return complex(np.vdot(gc, fc))


def binomial_poly(alpha: complex, beta: complex, k: int) -> np.ndarray:
    """Coefficients (ascending) of (alpha x + beta)^k."""
    out = np.zeros(k + 1, dtype=complex)
    for j in range(k + 1):
        out[j] = math.comb(k, j) * complex(alpha) ** j * complex(beta) ** (k - j)
    return out


def exp_poly_taylor(scale: complex, rate: complex, poly, N: int) -> np.ndarray:
    """Taylor coefficients (degree <= N) of scale * exp(rate x) * p(x).

    Closed-form finite sums; each output coefficient is exact up to rounding.
    """
    poly = np.asarray(poly, dtype=complex)
    if N < 0:
        return np.zeros(0, dtype=complex)
    n = np.arange(N + 1)
    lf = log_factorials(N)
    out = np.zeros(N + 1, dtype=complex)
    rate = complex(rate)
    for j, pj in enumerate(poly[: N + 1]):
        if pj == 0:
            continue
        shift = n[j:] - j
        if rate == 0:
            series = np.where(shift == 0, 1.0 + 0j, 0j)
        else:
            log_mag = shift * math.log(abs(rate)) - lf[shift]
            _check_log_magnitude(log_mag + math.log(abs(pj)), "exponential series term")
            series = np.exp(log_mag + 1j * shift * np.angle(rate))
        out[j:] += pj * series
    return complex(scale) * out


def antiderivative(coeffs, m: int) -> np.ndarray:
    """m-fold antiderivative with all jets of order < m vanishing at 0.

    The output keeps the input length; degrees pushed past it are dropped.
    """
    c = np.asarray(coeffs, dtype=complex)
    L = len(c)
    out = c.copy()
    for _ in range(m):
        nxt = np.zeros(L, dtype=complex)
        nxt[1:] = out[:-1] / np.arange(1, L)
        out = nxt
    return out


def multiply_series(p, q, N: int) -> np.ndarray:
    """Cauchy product truncated at degree N (exact for degrees <= N)."""
    out = np.convolve(np.asarray(p, dtype=complex), np.asarray(q, dtype=complex))[: N + 1]
    if len(out) < N + 1:
        out = np.concatenate([out, np.zeros(N + 1 - len(out), dtype=complex)])
    return out


def kernel_vector(spec: KernelSpec, N: int) -> FockVector:
    """Fock coefficients of (a x + b)^k exp(x conj(z)), truncated at degree N."""
    poly = binomial_poly(spec.a, spec.b, spec.k)
    taylor = exp_poly_taylor(1.0, np.conj(complex(spec.z)), poly, N)
    return FockVector(taylor * sqrt_factorials(N))


def eval_derivative(f: FockVector, z: complex, k: int) -> complex:
    """k-th derivative of f at z through the reproducing kernel pairing."""
    if k < 0:
        raise ValueError("derivative order must be non-negative")
    return inner(f, kernel_vector(KernelSpec(z, 1.0, 0.0, k), f.truncation))


def monomial_fock(j: int, N: int) -> FockVector:
    """The normalized monomial e_j as a Fock vector."""
    out = np.zeros(N + 1, dtype=complex)
    out[j] = 1.0
    return FockVector(out)


def vanishing_subspace(m: int, y: complex, N: int) -> Subspace:
    """Polynomials of degree <= N vanishing to order m at y (dimension N + 1 - m)."""
    if m < 1:
        raise ValueError("vanishing order m must be at least 1")
    if N < m:
        raise ValueError(f"truncation N={N} is below the vanishing order m={m}")
    root = binomial_poly(1.0, -complex(y), m)
    sf = sqrt_factorials(N)
    vectors = []
    for j in range(N - m + 1):
        t = np.zeros(N + 1, dtype=complex)
        t[j : j + m + 1] = root
        v = t * sf
        vectors.append(v / np.linalg.norm(v))
    return orthonormalize(vectors, ambient_dim=N + 1)


Evaluable = Union[TaylorSeries, Callable[[complex], complex]]


def m_quantity(f: Evaluable, g: Evaluable, z) -> float:
    """|f(z)|^2 exp(|g(z)|^2 - |z|^2)."""
    fz, gz = f(z), g(z)
    return np.abs(fz) ** 2 * np.exp(np.abs(gz) ** 2 - np.abs(z) ** 2)


def sup_m_estimate(f: Evaluable, g: Evaluable, radius: float, grid: int) -> float:
    """Grid maximum of ``m_quantity`` over the square [-radius, radius]^2.

    This is only a lower bound for the supremum over the whole plane.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if grid < 2:
        raise ValueError("grid must have at least 2 points per side")
    xs = np.linspace(-radius, radius, grid)
    Z = xs[None, :] + 1j * xs[:, None]
    values = np.vectorize(lambda z: m_quantity(f, g, z), otypes=[float])(Z)
    return float(np.max(values))
