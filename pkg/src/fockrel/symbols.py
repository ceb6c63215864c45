"""Weighted composition symbols, conjugations, and the maximal relation they induce.

A ``SymbolTriple`` fixes

    psi(z) = C exp(D z),   phi(z) = A z + B,   phi_sym(z) = (E z + F)^m

and the relation S_max collects every pair (f, g) with
psi * (f o phi) = phi_sym * g^(m).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .errors import InvalidConjugationError, InvalidSymbolError, TruncationOverflowError
from .fock import (
    MAGNITUDE_GUARD,
    FockVector,
    KernelSpec,
    antiderivative,
    binomial_poly,
    exp_poly_taylor,
    kernel_vector,
    multiply_series,
    sqrt_factorials,
)
from .relation import LinearRelation, RelationPair, from_pairs

PARAM_TOL = 1e-12
CLASSIFY_TOL = 1e-10


def _close(x, y, tol=CLASSIFY_TOL) -> bool:
    return abs(complex(x) - complex(y)) <= tol * max(1.0, abs(complex(x)), abs(complex(y)))


@dataclass(frozen=True)
class SymbolTriple:
    C: complex
    D: complex
    A: complex
    B: complex
    E: complex
    F: complex
    m: int

    def __post_init__(self):
        for name in "CDABEF":
            value = complex(getattr(self, name))
            if not cmath.isfinite(value):
                raise InvalidSymbolError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if int(self.m) != self.m or self.m < 0:
            raise InvalidSymbolError("m must be a non-negative integer")
        object.__setattr__(self, "m", int(self.m))
        if self.C == 0:
            raise InvalidSymbolError("C = 0: the weight psi must be zero-free")
        if self.A == 0:
            raise InvalidSymbolError("A = 0: phi must be a non-constant affine map")
        if self.m >= 1 and self.E == 0 and self.F == 0:
            raise InvalidSymbolError("(E, F) = (0, 0) with m >= 1 makes phi_sym vanish identically")

    @classmethod
    def adjoint_form(cls, C, D, A, B, m, a, b) -> "SymbolTriple":
        """Triple with phi_sym(z) = (a A z + a B + b)^m."""
        return cls(C, D, A, B, a * A, a * B + b, m)

    def psi(self, z):
        return self.C * np.exp(self.D * z)

    def phi(self, z):
        return self.A * z + self.B

    def phi_sym(self, z):
        return (self.E * z + self.F) ** self.m

    def vanishing_root(self) -> Optional[complex]:
        """Point where every domain element must vanish to order m (None if no constraint)."""
        if self.m == 0 or self.E == 0:
            return None
        return self.B - self.A * self.F / self.E

    def matches_adjoint_form(self, a, b, tol: float = PARAM_TOL) -> bool:
        return _close(self.E, a * self.A, tol) and _close(self.F, a * self.B + b, tol)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in "CDABEF"} | {"m": self.m}


@dataclass(frozen=True)
class ConjugationParams:
    """Parameters of f -> c exp(b z) conj(f(conj(a z + b)))."""

    a: complex
    b: complex
    c: complex

    def __post_init__(self):
        for name in "abc":
            object.__setattr__(self, name, complex(getattr(self, name)))
        violations = conjugation_violations(self.a, self.b, self.c)
        if violations:
            raise InvalidConjugationError(violations)

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c}


def conjugation_violations(a, b, c, tol: float = PARAM_TOL) -> list[str]:
    a, b, c = complex(a), complex(b), complex(c)
    out = []
    if abs(abs(a) - 1.0) > tol:
        out.append(f"|a| = 1 fails (|a| = {abs(a):.6g})")
    residual = a.conjugate() * b + b.conjugate()
    if abs(residual) > tol:
        out.append(f"conj(a) b + conj(b) = 0 fails (residual {abs(residual):.3g})")
    weight = abs(c) ** 2 * math.exp(abs(b) ** 2)
    if abs(weight - 1.0) > tol:
        out.append(f"|c|^2 exp(|b|^2) = 1 fails (value {weight:.6g})")
    return out


def validate_conjugation(a, b, c) -> ConjugationParams:
    return ConjugationParams(a, b, c)


@dataclass(frozen=True)
class ClassificationResult:
    kind: str
    canonical_params: Optional[dict] = None
    witness: str = ""
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in {"hermitian", "c_selfadjoint", "unitary", "bounded-domain-condition", "none"}:
            raise ValueError(f"unknown classification kind {self.kind!r}")
        if self.kind == "none" and not self.witness:
            raise ValueError("a negative classification needs a witness")

    @property
    def positive(self) -> bool:
        return self.kind != "none"


# ---------------------------------------------------------------- matrices


def _powers(x: complex, n: int) -> np.ndarray:
    out = np.ones(n + 1, dtype=complex)
    for k in range(1, n + 1):
        out[k] = out[k - 1] * x
    return out


def wco_matrix(C, D, A, B, N: int) -> np.ndarray:
    """Matrix of f -> C exp(D z) f(A z + B) in the orthonormal basis, truncated at N.

    Entry (i, j) is <W e_j, e_i>, a finite closed-form sum.
    """
    C, D, A, B = (complex(x) for x in (C, D, A, B))
    lf = gammaln(np.arange(N + 1) + 1.0)
    i = np.arange(N + 1)[:, None]
    j = np.arange(N + 1)[None, :]
    out = np.zeros((N + 1, N + 1), dtype=complex)
    log_guard = math.log(MAGNITUDE_GUARD)
    with np.errstate(over="ignore", invalid="ignore"):
        pA, pB, pD = _powers(A, N), _powers(B, N), _powers(D, N)
        _accumulate_wco(out, lf, i, j, pA, pB, pD, N, log_guard)
    out *= C
    if not np.all(np.isfinite(out)) or np.max(np.abs(out), initial=0.0) > MAGNITUDE_GUARD:
        raise TruncationOverflowError(f"wco_matrix overflowed at N={N}")
    return out


def _accumulate_wco(out, lf, i, j, pA, pB, pD, N, log_guard):
    for l in range(N + 1):
        mask = (i >= l) & (j >= l)
        ii = np.broadcast_to(i, mask.shape)[mask]
        jj = np.broadcast_to(j, mask.shape)[mask]
        log_w = (
            0.5 * lf[ii] - 0.5 * lf[jj] - lf[ii - l]
            + lf[jj] - lf[l] - lf[jj - l]  # log binom(j, l)
        )
        if np.max(log_w) > log_guard:
            raise TruncationOverflowError(f"wco_matrix weights exceed {MAGNITUDE_GUARD:g} at N={N}")
        out[ii, jj] += np.exp(log_w) * pA[l] * pB[jj - l] * pD[ii - l]


def conjugation_matrix(p: ConjugationParams, N: int) -> np.ndarray:
    """Matrix M with C_{a,b,c} v = M conj(v) on truncated coefficient vectors."""
    return wco_matrix(p.c, p.b, p.a, p.b, N)


def apply_conjugation(M: np.ndarray, v) -> np.ndarray:
    if isinstance(v, FockVector):
        v = v.coeffs
    return M @ np.conj(np.asarray(v, dtype=complex))


# ---------------------------------------------------------------- S_max


def default_budget(N: int) -> int:
    return N // 2


@dataclass(frozen=True)
class Generators:
    """Closed-form spanning data of a truncated relation."""

    pairs: tuple
    multivalued: tuple
    truncation: int

    def relation(self) -> LinearRelation:
        return from_pairs(self.pairs, self.multivalued, space_dim=self.truncation + 1)

    def all_pairs(self) -> list:
        """Pairs followed by the pure-output directions (0, h)."""
        zero = FockVector(np.zeros(self.truncation + 1))
        return list(self.pairs) + [RelationPair(zero, h) for h in self.multivalued]


def _check_budget(m: int, N: int, budget: int):
    if budget < 0:
        raise ValueError("degree budget must be non-negative")
    if budget + m > N:
        raise ValueError(f"degree budget {budget} + m {m} exceeds truncation N={N}")


def _raw_smax_generators(C, D, A, B, E, F, m, N, budget, w0) -> tuple[list, list]:
    """Taylor data (f_k, g_k) with psi f_k(phi) = (E z + F)^m g_k^(m).

    With w0 the forced root, f_k = (w - w0)^m w^k and f_k(A z + B) factors
    as (A/E)^m (E z + F)^m (A z + B)^k, so g_k^(m) = (A/E)^m C e^{Dz} (Az+B)^k
    exactly. Without a forced root (m = 0 or E = 0), f_k = w^k and phi_sym is
    the constant F^m.
    """
    if w0 is None:
        kappa = 1.0 if m == 0 else F ** (-m)
        root = np.ones(1, dtype=complex)
    else:
        kappa = (A / E) ** m
        root = binomial_poly(1.0, -w0, m)
    fs, gs = [], []
    for k in range(budget + 1):
        f = np.zeros(N + 1, dtype=complex)
        f[k : k + len(root)] = root
        rhs = exp_poly_taylor(kappa * C, D, binomial_poly(A, B, k), N - m)
        g = antiderivative(np.concatenate([rhs, np.zeros(m, dtype=complex)]), m)
        fs.append(f)
        gs.append(g)
    return fs, gs


def _to_pairs(fs, gs, N) -> tuple:
    sf = sqrt_factorials(N)
    return tuple(RelationPair(FockVector(f * sf), FockVector(g * sf)) for f, g in zip(fs, gs))


def smax_generators(t: SymbolTriple, N: int, degree_budget: Optional[int] = None) -> Generators:
    budget = default_budget(N) if degree_budget is None else degree_budget
    _check_budget(t.m, N, budget)
    fs, gs = _raw_smax_generators(t.C, t.D, t.A, t.B, t.E, t.F, t.m, N, budget, t.vanishing_root())
    eye = np.eye(N + 1, dtype=complex)
    mult = tuple(FockVector(eye[j]) for j in range(t.m))
    return Generators(_to_pairs(fs, gs, N), mult, N)


def build_smax(t: SymbolTriple, N: int, degree_budget: Optional[int] = None) -> LinearRelation:
    """Truncated graph of S_max: closed-form generator pairs plus (0, z^j), j < m."""
    return smax_generators(t, N, degree_budget).relation()


def smax_adjoint_generators(
    t: SymbolTriple, p: ConjugationParams, N: int, degree_budget: Optional[int] = None
) -> Generators:
    """Generators of the relation

        conj(C) e^{conj(B) z} u(conj(A) z + conj(D))
            = (conj(A) z + conj(D))^m sum_j binom(m, j) conj(a)^j conj(b)^(m-j) v^(j)(z).

    With lam = conj(b)/conj(a) the right side equals
    conj(a)^m (conj(A) z + conj(D))^m e^{-lam z} (e^{lam z} v)^(m), so h = e^{lam z} v
    solves an S_max-type equation; v is recovered by multiplying by e^{-lam z}.
    """
    if not t.matches_adjoint_form(p.a, p.b):
        raise InvalidSymbolError("triple is not in adjoint form: need E = a A and F = a B + b")
    budget = default_budget(N) if degree_budget is None else degree_budget
    m = t.m
    _check_budget(m, N, budget)
    a_bar, b_bar = p.a.conjugate(), p.b.conjugate()
    lam = b_bar / a_bar
    Ah, Dh = t.A.conjugate(), t.D.conjugate()
    fs, hs = _raw_smax_generators(
        t.C.conjugate() / a_bar**m, t.B.conjugate() + lam, Ah, Dh, Ah, Dh, m, N, budget,
        None if m == 0 else 0.0,
    )
    damp = exp_poly_taylor(1.0, -lam, [1.0], N)
    vs = [multiply_series(damp, h, N) for h in hs]
    sf = sqrt_factorials(N)
    mult = []
    for j in range(m):
        mono = np.zeros(j + 1, dtype=complex)
        mono[j] = 1.0
        mult.append(FockVector(multiply_series(damp, mono, N) * sf))
    return Generators(_to_pairs(fs, vs, N), tuple(mult), N)


def build_smax_adjoint(
    t: SymbolTriple, p: ConjugationParams, N: int, degree_budget: Optional[int] = None
) -> LinearRelation:
    return smax_adjoint_generators(t, p, N, degree_budget).relation()


def vartheta_pair(t: SymbolTriple, p: ConjugationParams, z: complex, k: int, N: int) -> RelationPair:
    """Kernel K_{z,a,b}^[k] together with its canonical image under S_max.

    The image has m-th derivative
    C e^{B conj(z)} (aAx + aB + b)^(k-m) exp(x (A conj(z) + D)) and vanishing
    jets of order < m at 0.
    """
    if k < t.m:
        raise ValueError(f"k={k} < m={t.m}: this kernel lies outside the domain")
    if not t.matches_adjoint_form(p.a, p.b):
        raise InvalidSymbolError("triple is not in adjoint form: need E = a A and F = a B + b")
    z = complex(z)
    f = kernel_vector(KernelSpec(z, p.a, p.b, k), N)
    scale = t.C * cmath.exp(t.B * z.conjugate())
    poly = binomial_poly(p.a * t.A, p.a * t.B + p.b, k - t.m)
    rhs = exp_poly_taylor(scale, t.A * z.conjugate() + t.D, poly, N - t.m)
    g = antiderivative(np.concatenate([rhs, np.zeros(t.m, dtype=complex)]), t.m)
    return RelationPair(f, FockVector(g * sqrt_factorials(N)))


def wco_relation(C, D, A, B, N: int, degree_budget: Optional[int] = None) -> LinearRelation:
    """Graph of the truncated single-valued weighted composition on degree <= budget."""
    budget = N if degree_budget is None else degree_budget
    M = wco_matrix(C, D, A, B, N)
    eye = np.eye(N + 1, dtype=complex)
    pairs = [RelationPair(FockVector(eye[j]), FockVector(M[:, j])) for j in range(budget + 1)]
    return from_pairs(pairs)



# ---------------------------------------------------------------- classifiers


def _real(x, tol=CLASSIFY_TOL) -> bool:
    x = complex(x)
    return abs(x.imag) <= tol * max(1.0, abs(x))


def classify_hermitian(t: SymbolTriple) -> ClassificationResult:
    failures = []
    diag = {"A": t.A, "D": t.D, "conj_B": t.B.conjugate()}
    if not _real(t.A):
        failures.append("A is not real")
    if not _close(t.D, t.B.conjugate()):
        failures.append("D != conj(B)")
    if t.m == 0:
        const = t.C
    else:
        if not _close(t.A * t.F, t.B * t.E):
            failures.append("root of phi_sym differs from the root of phi")
            const = None
        else:
            const = t.C * (t.A / t.E) ** t.m
    if const is not None:
        diag["constant"] = const
        if not _real(const):
            failures.append("normalized constant C (A/E)^m is not real")
    if failures:
        return ClassificationResult("none", None, "; ".join(failures), diag)
    return ClassificationResult(
        "hermitian", {"A": t.A.real, "B": t.B, "C": complex(const).real, "m": t.m}, "", diag
    )


def classify_c_selfadjoint(t: SymbolTriple, p: ConjugationParams) -> ClassificationResult:
    failures = []
    target = p.b + p.a * t.B - p.b * t.A
    diag = {"D": t.D, "required_D": target}
    if not _close(t.D, target):
        failures.append("D != b + a B - b A")
    const = t.C
    if t.m >= 1:
        if t.E == 0 or not _close(t.E * (p.a * t.B + p.b), t.F * p.a * t.A):
            failures.append("phi_sym is not proportional to (a(Az+B)+b)^m")
            const = None
        else:
            const = t.C * (p.a * t.A / t.E) ** t.m
    if const is not None:
        diag["constant"] = const
    if failures:
        return ClassificationResult("none", None, "; ".join(failures), diag)
    return ClassificationResult(
        "c_selfadjoint", {"A": t.A, "B": t.B, "C": const, "m": t.m} | p.as_dict(), "", diag
    )


def classify_unitary(t: SymbolTriple) -> ClassificationResult:
    failures = []
    diag = {"abs_A": abs(t.A), "A_conjB_plus_D": t.A * t.B.conjugate() + t.D}
    if t.m != 0:
        failures.append(f"m = {t.m} != 0 (unitary relations are single-valued)")
    if abs(abs(t.A) - 1.0) > CLASSIFY_TOL:
        failures.append("|A| != 1")
    if not _close(t.D, -t.A * t.B.conjugate()):
        failures.append("D != -A conj(B)")
    phase = t.C * math.exp(abs(t.B) ** 2 / 2)
    diag["unimodular_factor"] = phase
    if abs(abs(phase) - 1.0) > CLASSIFY_TOL:
        failures.append("|C| != exp(-|B|^2 / 2)")
    if failures:
        return ClassificationResult("none", None, "; ".join(failures), diag)
    return ClassificationResult("unitary", {"A": t.A, "B": t.B, "unimodular": phase}, "", diag)


def classify_bounded_domain_condition(t: SymbolTriple) -> ClassificationResult:
    shift = t.A * t.B.conjugate() + t.D
    diag = {"abs_A": abs(t.A), "A_conjB_plus_D": shift}
    if abs(t.A) < 1 - CLASSIFY_TOL:
        return ClassificationResult("bounded-domain-condition", {"branch": 1}, "", diag)
    if abs(abs(t.A) - 1) <= CLASSIFY_TOL and abs(shift) <= CLASSIFY_TOL * max(1.0, abs(t.D)):
        return ClassificationResult("bounded-domain-condition", {"branch": 2}, "", diag)
    if abs(t.A) > 1:
        witness = "|A| > 1"
    else:
        witness = "|A| = 1 but A conj(B) + D != 0"
    return ClassificationResult("none", None, witness, diag)
