"""Dense complex subspace toolkit.

Subspaces are stored as orthonormal frames (columns). Every rank decision is an
SVD with a threshold relative to the largest singular value, so results do not
depend on the overall scale of the generating vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError

DEFAULT_RANK_TOL = 1e-10


def as_cvector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector has non-finite entries")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace of C^ambient_dim given by an orthonormal frame."""

    ambient_dim: int
    frame: np.ndarray
    rank_tol: float = DEFAULT_RANK_TOL

    def __post_init__(self):
        frame = np.asarray(self.frame, dtype=complex)
        if frame.ndim != 2 or frame.shape[0] != self.ambient_dim:
            raise DimensionMismatchError(
                f"frame of shape {frame.shape} does not live in dimension {self.ambient_dim}"
            )
        if frame.shape[1] > self.ambient_dim:
            raise DimensionMismatchError("more frame columns than ambient dimension")
        object.__setattr__(self, "frame", _frozen(frame))

    @property
    def dim(self) -> int:
        return self.frame.shape[1]

    def projector(self) -> np.ndarray:
        return self.frame @ self.frame.conj().T

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def zero_subspace(ambient_dim: int) -> Subspace:
    return Subspace(ambient_dim, np.zeros((ambient_dim, 0), dtype=complex))


def full_space(ambient_dim: int) -> Subspace:
    return Subspace(ambient_dim, np.eye(ambient_dim, dtype=complex))


def coordinate_subspace(ambient_dim: int, indices) -> Subspace:
    """Span of the standard basis vectors listed in ``indices``."""
    eye = np.eye(ambient_dim, dtype=complex)
    return Subspace(ambient_dim, eye[:, list(indices)])


def _stack_columns(vectors, ambient_dim):
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        if ambient_dim is not None and vectors.shape[0] != ambient_dim:
            raise DimensionMismatchError("column length differs from ambient_dim")
        return np.asarray(vectors, dtype=complex)
    vectors = [as_cvector(v) for v in vectors]
    if not vectors:
        if ambient_dim is None:
            raise ValueError("ambient_dim is required for an empty generator list")
        return np.zeros((ambient_dim, 0), dtype=complex)
    dims = {len(v) for v in vectors}
    if len(dims) != 1:
        raise DimensionMismatchError(f"generators have mixed dimensions {sorted(dims)}")
    if ambient_dim is not None and dims != {ambient_dim}:
        raise DimensionMismatchError("generator dimension differs from ambient_dim")
    return np.column_stack(vectors)


def orthonormalize(vectors, rank_tol: float = DEFAULT_RANK_TOL, ambient_dim: int | None = None) -> Subspace:
    """Orthonormal frame for the span of ``vectors``.

    ``vectors`` is a sequence of 1-D arrays or a 2-D array whose columns are the
    generators. Directions with singular value below ``rank_tol`` times the
    largest one are dropped.
    """
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    V = _stack_columns(vectors, ambient_dim)
    n = V.shape[0]
    if not np.all(np.isfinite(V)):
        raise ValueError("generators have non-finite entries")
    if V.shape[1] == 0 or not np.any(V):
        return Subspace(n, np.zeros((n, 0), dtype=complex), rank_tol)
    U, s, _ = np.linalg.svd(V, full_matrices=False)
    rank = int(np.sum(s > rank_tol * s[0]))
    return Subspace(n, U[:, :rank], rank_tol)


def complement(S: Subspace) -> Subspace:
    """Orthogonal complement of ``S`` in its ambient space."""
    n = S.ambient_dim
    if S.dim == 0:
        return Subspace(n, np.eye(n, dtype=complex), S.rank_tol)
    U, _, _ = np.linalg.svd(S.frame, full_matrices=True)
    return Subspace(n, U[:, S.dim:], S.rank_tol)


def principal_angles(S1: Subspace, S2: Subspace) -> np.ndarray:
    """Principal angles in radians, ascending; ``min(dim S1, dim S2)`` values.

    Small angles come from sines and large ones from cosines, which keeps
    resolution near zero (plain ``arccos`` bottoms out around 1e-8).
    """
    if S1.ambient_dim != S2.ambient_dim:
        raise DimensionMismatchError(
            f"ambient dimensions differ: {S1.ambient_dim} vs {S2.ambient_dim}"
        )
    if S1.dim > S2.dim:
        S1, S2 = S2, S1
    if S1.dim == 0:
        return np.zeros(0)
    Q1, Q2 = S1.frame, S2.frame
    cos = np.linalg.svd(Q1.conj().T @ Q2, compute_uv=False)
    cos = np.clip(np.sort(cos)[::-1], 0.0, 1.0)
    residual = Q1 - Q2 @ (Q2.conj().T @ Q1)
    sin = np.linalg.svd(residual, compute_uv=False)
    sin = np.clip(np.sort(sin), 0.0, 1.0)
    from_cos = np.arccos(cos)
    from_sin = np.arcsin(sin)
    angles = np.where(from_sin < np.pi / 4, from_sin, from_cos)
    return np.sort(angles)


def max_angle(S1: Subspace, S2: Subspace) -> float:
    angles = principal_angles(S1, S2)
    return float(angles[-1]) if angles.size else 0.0


def subspace_equal(S1: Subspace, S2: Subspace, tol: float = 1e-8) -> bool:
    if S1.ambient_dim != S2.ambient_dim:
        raise DimensionMismatchError("ambient dimensions differ")
    if S1.dim != S2.dim:
        return False
    return max_angle(S1, S2) <= tol


def project(S: Subspace, v) -> np.ndarray:
    v = as_cvector(v)
    if len(v) != S.ambient_dim:
        raise DimensionMismatchError(f"vector of length {len(v)} vs ambient {S.ambient_dim}")
    Q = S.frame
    return Q @ (Q.conj().T @ v)


def null_space(M: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of ker M; singular values below ``tol`` count as zero.

    ``tol`` is absolute: callers pass slices of orthonormal frames whose
    singular values already live in [0, 1].
    """
    M = np.asarray(M, dtype=complex)
    k = M.shape[1]
    if k == 0:
        return np.zeros((0, 0), dtype=complex)
    if M.shape[0] == 0:
        return np.eye(k, dtype=complex)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > tol))
    return Vh[rank:].conj().T


def embed(S: Subspace, ambient_dim: int) -> Subspace:
    """Zero-pad ``S`` into a larger leading-coordinate space."""
    if ambient_dim < S.ambient_dim:
        raise DimensionMismatchError("cannot embed into a smaller space")
    frame = np.zeros((ambient_dim, S.dim), dtype=complex)
    frame[: S.ambient_dim] = S.frame
    return Subspace(ambient_dim, frame, S.rank_tol)
