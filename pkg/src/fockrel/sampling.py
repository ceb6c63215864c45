"""Random parameter families for sweeps and property tests.

Every sampler takes a ``numpy.random.Generator`` so that a seed fixes the whole
sweep. Magnitudes are capped by ``cap``; the derived parameters (for example
D in the C-selfadjoint family) may exceed it.
"""

from __future__ import annotations

import cmath
import math

from .symbols import ConjugationParams, SymbolTriple

MAX_CAP = 2.0


def _check_cap(cap: float):
    if not 0 < cap <= MAX_CAP:
        raise ValueError(f"magnitude cap must lie in (0, {MAX_CAP}]")


def _disc(rng, lo: float, hi: float) -> complex:
    return rng.uniform(lo, hi) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))


def conjugation(rng, cap: float = 1.0) -> ConjugationParams:
    """a = e^{i theta}, b = r i e^{i theta / 2} (so conj(a) b + conj(b) = 0), |c| = e^{-r^2/2}."""
    _check_cap(cap)
    theta = rng.uniform(0, 2 * math.pi)
    r = rng.uniform(-min(cap, 1.0), min(cap, 1.0))
    a = cmath.exp(1j * theta)
    b = r * 1j * cmath.exp(0.5j * theta)
    c = math.exp(-(r**2) / 2) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
    return ConjugationParams(a, b, c)


def adjoint_form_triple(rng, p: ConjugationParams, m: int, cap: float = 1.0) -> SymbolTriple:
    _check_cap(cap)
    C = _disc(rng, 0.3, cap)
    D = _disc(rng, 0.0, cap)
    A = _disc(rng, 0.2, cap)
    B = _disc(rng, 0.0, cap)
    return SymbolTriple.adjoint_form(C, D, A, B, m, p.a, p.b)


def c_selfadjoint_triple(rng, p: ConjugationParams, m: int, cap: float = 1.0) -> SymbolTriple:
    """Adjoint-form triple with D = b + a B - b A."""
    t = adjoint_form_triple(rng, p, m, cap)
    D = p.b + p.a * t.B - p.b * t.A
    return SymbolTriple(t.C, D, t.A, t.B, t.E, t.F, m)


def hermitian_triple(rng, m: int, cap: float = 1.0) -> SymbolTriple:
    """Real A, D = conj(B), phi_sym = (s (A z + B))^m and C (A/E)^m real."""
    _check_cap(cap)
    A = rng.choice([-1.0, 1.0]) * rng.uniform(0.2, cap)
    B = _disc(rng, 0.0, cap)
    s = _disc(rng, 0.5, 1.5)
    c0 = rng.choice([-1.0, 1.0]) * rng.uniform(0.3, cap)
    C = c0 * s**m
    return SymbolTriple(C, B.conjugate(), A, B, s * A, s * B, m)


def unitary_triple(rng, cap: float = 1.0) -> SymbolTriple:
    _check_cap(cap)
    A = cmath.exp(1j * rng.uniform(0, 2 * math.pi))
    B = _disc(rng, 0.0, min(cap, 1.0))
    phase = cmath.exp(1j * rng.uniform(0, 2 * math.pi))
    C = phase * math.exp(-abs(B) ** 2 / 2)
    return SymbolTriple(C, -A * B.conjugate(), A, B, 1.0, 0.0, 0)


def generic_triple(rng, m: int, cap: float = 1.0) -> SymbolTriple:
    _check_cap(cap)
    E = _disc(rng, 0.3, cap)
    return SymbolTriple(_disc(rng, 0.3, cap), _disc(rng, 0, cap), _disc(rng, 0.2, cap),
                        _disc(rng, 0, cap), E, _disc(rng, 0, cap), m)


def expansive_triple(rng, m: int, modulus: float = 2.0, cap: float = 1.0) -> SymbolTriple:
    _check_cap(cap)
    A = modulus * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
    return SymbolTriple(_disc(rng, 0.3, cap), _disc(rng, 0, cap), A, _disc(rng, 0, cap),
                        _disc(rng, 0.3, cap), _disc(rng, 0, cap), m)


def contractive_triple(rng, m: int, max_modulus: float = 0.8, cap: float = 1.0) -> SymbolTriple:
    """Generic triple with 0.2 <= |A| <= max_modulus < 1."""
    t = generic_triple(rng, m, cap)
    A = _disc(rng, 0.2, max_modulus)
    return SymbolTriple(t.C, t.D, A, t.B, t.E, t.F, m)


def isometric_shift_triple(rng, m: int, cap: float = 1.0) -> SymbolTriple:
    """|A| = 1 and D = -A conj(B), with phi_sym = (s (A z + B))^m."""
    _check_cap(cap)
    A = cmath.exp(1j * rng.uniform(0, 2 * math.pi))
    B = _disc(rng, 0.0, cap)
    s = _disc(rng, 0.5, 1.5)
    return SymbolTriple(_disc(rng, 0.3, cap), -A * B.conjugate(), A, B, s * A, s * B, m)
