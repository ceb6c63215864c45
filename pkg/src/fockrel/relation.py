"""Linear relations (multi-valued operators) stored as graph subspaces of H + H.

A relation on C^n is a subspace of C^{2n}; the first n coordinates hold the
input component and the last n the output component.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatchError
from .fock import FockVector
from .linalg import (
    DEFAULT_RANK_TOL,
    Subspace,
    complement,
    max_angle,
    null_space,
    orthonormalize,
    zero_subspace,
)


@dataclass(frozen=True, eq=False)
class LinearRelation:
    space_dim: int
    graph: Subspace

    def __post_init__(self):
        if self.graph.ambient_dim != 2 * self.space_dim:
            raise DimensionMismatchError(
                f"graph ambient dimension {self.graph.ambient_dim} != 2 * {self.space_dim}"
            )

    @property
    def dim(self) -> int:
        return self.graph.dim

    @property
    def top(self) -> np.ndarray:
        return self.graph.frame[: self.space_dim]

    @property
    def bottom(self) -> np.ndarray:
        return self.graph.frame[self.space_dim :]

    def __repr__(self):
        return f"LinearRelation(space_dim={self.space_dim}, graph_dim={self.dim})"


@dataclass(frozen=True, eq=False)
class RelationPair:
    f: FockVector
    g: FockVector

    def __post_init__(self):
        if self.f.truncation != self.g.truncation:
            raise DimensionMismatchError("pair components have different truncations")

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.f.coeffs, self.g.coeffs])

    def normalized(self) -> "RelationPair":
        scale = np.linalg.norm(self.stacked())
        if scale == 0:
            return self
        return RelationPair(FockVector(self.f.coeffs / scale), FockVector(self.g.coeffs / scale))


def _relation_from_columns(n: int, columns: np.ndarray, rank_tol: float) -> LinearRelation:
    return LinearRelation(n, orthonormalize(columns, rank_tol=rank_tol, ambient_dim=2 * n))


def from_pairs(
    pairs: Sequence[RelationPair],
    extra_multivalued: Sequence[FockVector] = (),
    rank_tol: float = DEFAULT_RANK_TOL,
    space_dim: int | None = None,
) -> LinearRelation:
    """Relation spanned by the pairs (f_i, g_i) and the pure outputs (0, h_j).

    Every generator is scaled to unit length before orthonormalization so that
    rank decisions do not favour large generators.
    """
    sizes = {p.f.truncation + 1 for p in pairs} | {h.truncation + 1 for h in extra_multivalued}
    if space_dim is not None:
        sizes.add(space_dim)
    if len(sizes) > 1:
        raise DimensionMismatchError(f"mixed truncations in generators: {sorted(sizes)}")
    if not sizes:
        raise ValueError("space_dim is required when no generators are given")
    n = sizes.pop()
    cols = [p.stacked() for p in pairs]
    cols += [np.concatenate([np.zeros(n, dtype=complex), h.coeffs]) for h in extra_multivalued]
    cols = [c / np.linalg.norm(c) for c in cols if np.any(c)]
    V = np.column_stack(cols) if cols else np.zeros((2 * n, 0), dtype=complex)
    return _relation_from_columns(n, V, rank_tol)


def from_matrix(M: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> LinearRelation:
    """Graph of the single-valued map x -> M x."""
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    if M.shape != (n, n):
        raise DimensionMismatchError("matrix must be square")
    return _relation_from_columns(n, np.vstack([np.eye(n), M]), rank_tol)


def identity_relation(n: int) -> LinearRelation:
    return from_matrix(np.eye(n))


def _null_tol(A: LinearRelation) -> float:
    return A.graph.rank_tol


def multivalued_part(A: LinearRelation) -> Subspace:
    """{g : (0, g) in G(A)}."""
    null = null_space(A.top, _null_tol(A))
    n = A.space_dim
    if null.shape[1] == 0:
        return zero_subspace(n)
    return orthonormalize(A.bottom @ null, rank_tol=A.graph.rank_tol, ambient_dim=n)


def domain(A: LinearRelation) -> Subspace:
    return orthonormalize(A.top, rank_tol=A.graph.rank_tol, ambient_dim=A.space_dim)


def range_(A: LinearRelation) -> Subspace:
    return orthonormalize(A.bottom, rank_tol=A.graph.rank_tol, ambient_dim=A.space_dim)


def kernel(A: LinearRelation) -> Subspace:
    """{f : (f, 0) in G(A)}."""
    null = null_space(A.bottom, _null_tol(A))
    n = A.space_dim
    if null.shape[1] == 0:
        return zero_subspace(n)
    return orthonormalize(A.top @ null, rank_tol=A.graph.rank_tol, ambient_dim=n)


def inverse(A: LinearRelation) -> LinearRelation:
    n = A.space_dim
    frame = np.vstack([A.bottom, A.top])
    return LinearRelation(n, Subspace(2 * n, frame, A.graph.rank_tol))


def adjoint(A: LinearRelation) -> LinearRelation:
    """{(u, v) : <g, u> = <f, v> for all (f, g) in G(A)}.

    This is the orthogonal complement of the flipped graph {(-g, f)}.
    """
    n = A.space_dim
    flipped = Subspace(2 * n, np.vstack([-A.bottom, A.top]), A.graph.rank_tol)
    return LinearRelation(n, complement(flipped))


def s_adjoint(A: LinearRelation, S_matrix, antilinear: bool = False) -> LinearRelation:
    """Adjoint of ``A`` with respect to a bounded operator S.

    For a linear S the defining pairing <g, Su> = <f, Sv> is solved directly.
    For an antilinear S (v -> S_matrix conj(v)), S is taken to be a
    conjugation and the result is the transport {(Sx, Sy) : (x, y) in G(A*)}.
    """
    S_matrix = np.asarray(S_matrix, dtype=complex)
    n = A.space_dim
    if S_matrix.shape != (n, n):
        raise DimensionMismatchError(f"S has shape {S_matrix.shape}, expected {(n, n)}")
    if antilinear:
        star = adjoint(A)
        top = S_matrix @ np.conj(star.top)
        bottom = S_matrix @ np.conj(star.bottom)
        return _relation_from_columns(n, np.vstack([top, bottom]), A.graph.rank_tol)
    Sh = S_matrix.conj().T
    pulled = _relation_from_columns(n, np.vstack([Sh @ A.top, Sh @ A.bottom]), A.graph.rank_tol)
    return adjoint(pulled)


def relation_norm(A: LinearRelation) -> float:
    """Norm of the quotient map dom(A) -> H / A(0).

    Outputs are reduced modulo the multivalued part, which makes the induced
    map single-valued; the result is its largest singular value. A purely
    multivalued relation has norm 0. Relations built from generators never
    produce an undefined quotient map, so no infinite value is returned.
    """
    ratios = _quotient_singular_values(A)
    return float(ratios[0]) if ratios.size else 0.0


def quotient_lower_bound(A: LinearRelation) -> float:
    """min ||[g]|| / ||f|| over graph pairs with f != 0."""
    ratios = _quotient_singular_values(A)
    return float(ratios[-1]) if ratios.size else 0.0


def _quotient_singular_values(A: LinearRelation) -> np.ndarray:
    mul = multivalued_part(A)
    G = A.bottom - mul.frame @ (mul.frame.conj().T @ A.bottom)
    U, s, Vh = np.linalg.svd(A.top, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros(0)
    r = int(np.sum(s > A.graph.rank_tol * s[0]))
    # coefficients c = V_r diag(1/s_r) y give f = U_r y with ||f|| = ||y||
    T = G @ (Vh[:r].conj().T / s[:r])
    return np.linalg.svd(T, compute_uv=False)


class GraphComparison(NamedTuple):
    """Outcome of comparing two graphs: verdict plus the largest principal angle."""

    equal: bool
    max_angle: float
    dims: tuple
    multivalued_dim: int = 0

    def __bool__(self):
        return self.equal


def compare_graphs(A: LinearRelation, B: LinearRelation, tol: float) -> GraphComparison:
    angle = max_angle(A.graph, B.graph)
    equal = A.dim == B.dim and angle <= tol
    return GraphComparison(equal, angle, (A.dim, B.dim), multivalued_part(A).dim)


def is_hermitian(A: LinearRelation, tol: float = 1e-6) -> GraphComparison:
    return compare_graphs(adjoint(A), A, tol)


def is_c_selfadjoint(A: LinearRelation, C_matrix, tol: float = 1e-6) -> GraphComparison:
    return compare_graphs(s_adjoint(A, C_matrix, antilinear=True), A, tol)


def is_unitary(A: LinearRelation, tol: float = 1e-6) -> GraphComparison:
    return compare_graphs(adjoint(A), inverse(A), tol)


def window(A: LinearRelation, K: int) -> LinearRelation:
    """Compression to the leading K+1 coordinates.

    Keeps the pairs whose input lies in the window and cuts their outputs to
    it: {(P u, P v) : (u, v) in G(A), u = P u}.
    """
    n = A.space_dim
    if not 0 <= K < n:
        raise ValueError(f"window size {K} outside 0..{n - 1}")
    null = null_space(A.top[K + 1 :], _null_tol(A))
    if null.shape[1] == 0:
        return LinearRelation(K + 1, zero_subspace(2 * (K + 1)))
    kept = A.graph.frame @ null
    cols = np.vstack([kept[: K + 1], kept[n : n + K + 1]])
    return _relation_from_columns(K + 1, cols, A.graph.rank_tol)
