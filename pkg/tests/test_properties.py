import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fockrel import sampling
from fockrel.checks import pairing_residual
from fockrel.fock import FockVector, TaylorSeries, eval_derivative, taylor_to_fock
from fockrel.linalg import complement, orthonormalize, principal_angles, project, subspace_equal
from fockrel.relation import adjoint, compare_graphs, domain, from_pairs, multivalued_part, RelationPair
from fockrel.symbols import conjugation_matrix, smax_adjoint_generators, smax_generators, wco_matrix

PROPS = settings(max_examples=30, deadline=None)

finite = st.floats(-1, 1, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite).map(lambda z: z / abs(z) if abs(z) > 1 else z)


def cmatrix(rows, cols):
    return st.tuples(
        arrays(np.float64, (rows, cols), elements=finite),
        arrays(np.float64, (rows, cols), elements=finite),
    ).map(lambda ri: ri[0] + 1j * ri[1])


@PROPS
@given(cmatrix(6, 3), cmatrix(6, 1))
def test_projection_parseval(V, v):
    S = orthonormalize(V)
    v = v[:, 0]
    p = project(S, v)
    assert abs(np.linalg.norm(v) ** 2 - np.linalg.norm(p) ** 2 - np.linalg.norm(v - p) ** 2) <= 1e-10 * max(
        1, np.linalg.norm(v) ** 2
    )


@PROPS
@given(cmatrix(5, 2))
def test_double_complement(V):
    S = orthonormalize(V)
    assert subspace_equal(complement(complement(S)), S, 1e-8)


@PROPS
@given(cmatrix(5, 2), cmatrix(5, 3))
def test_principal_angles_symmetric(V, W):
    a = principal_angles(orthonormalize(V), orthonormalize(W))
    b = principal_angles(orthonormalize(W), orthonormalize(V))
    assert np.allclose(a, b, atol=1e-10)


@PROPS
@given(arrays(np.complex128, 8, elements=cplx), cplx)
def test_reproducing_property(coeffs, w):
    f = taylor_to_fock(TaylorSeries(coeffs), 20)
    direct = np.polynomial.polynomial.polyval(w, coeffs)
    assert abs(eval_derivative(f, w, 0) - direct) <= 1e-10 * (1 + f.norm())


def random_relation(n, k, extra, seed):
    rng = np.random.default_rng(seed)
    pairs = [
        RelationPair(FockVector(rng.normal(size=n) + 1j * rng.normal(size=n)),
                     FockVector(rng.normal(size=n) + 1j * rng.normal(size=n)))
        for _ in range(k)
    ]
    mult = [FockVector(rng.normal(size=n)) for _ in range(extra)]
    return from_pairs(pairs, mult)


@PROPS
@given(st.integers(1, 5), st.integers(0, 2), st.integers(0, 2**32 - 1))
def test_relation_adjoint_invariants(k, extra, seed):
    n = 7
    A = random_relation(n, k, extra, seed)
    star = adjoint(A)
    assert A.dim + star.dim == 2 * n
    assert compare_graphs(adjoint(star), A, 1e-8).equal
    assert subspace_equal(multivalued_part(star), complement(domain(A)), 1e-8)


seeds = st.integers(0, 2**32 - 1)


@PROPS
@given(seeds)
def test_conjugation_is_isometric_involution(seed):
    rng = np.random.default_rng(seed)
    p = sampling.conjugation(rng)
    N = 40
    M = conjugation_matrix(p, N)
    k = N // 2
    assert np.max(np.abs((M @ M.conj())[:k, :k] - np.eye(k))) < 1e-8
    v = np.zeros(N + 1, dtype=complex)
    v[:6] = rng.normal(size=6) + 1j * rng.normal(size=6)
    assert abs(np.linalg.norm(M @ v.conj()) - np.linalg.norm(v)) < 1e-8 * np.linalg.norm(v)


@PROPS
@given(cplx, cplx, cplx, cplx)
def test_wco_adjoint_identity(C, D, A, B):
    W = wco_matrix(C, D, A, B, 20)
    W_hat = wco_matrix(np.conj(C), np.conj(B), np.conj(A), np.conj(D), 20)
    assert np.max(np.abs(W_hat - W.conj().T)) < 1e-10


@PROPS
@given(seeds, st.integers(0, 3))
def test_adjoint_pairing_identity(seed, m):
    rng = np.random.default_rng(seed)
    p = sampling.conjugation(rng)
    t = sampling.adjoint_form_triple(rng, p, m)
    N = 30
    S = smax_generators(t, N)
    Shat = smax_adjoint_generators(t, p, N)
    assert pairing_residual(S.all_pairs(), Shat.all_pairs()) < 1e-8


@PROPS
@given(seeds, st.integers(0, 3))
def test_c_selfadjoint_family_pairing(seed, m):
    rng = np.random.default_rng(seed)
    p = sampling.conjugation(rng)
    t = sampling.c_selfadjoint_triple(rng, p, m)
    # budget 20 generators, paired with 20 extra coefficients
    M = conjugation_matrix(p, 60)
    pairs = smax_generators(t, 60, 20).all_pairs()
    assert pairing_residual(pairs, pairs, lambda X: M @ np.conj(X)) < 1e-8
