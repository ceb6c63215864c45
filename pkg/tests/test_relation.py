import numpy as np
import pytest

from fockrel.errors import DimensionMismatchError
from fockrel.fock import FockVector
from fockrel.linalg import (
    complement,
    coordinate_subspace,
    subspace_equal,
    zero_subspace,
)
from fockrel.relation import (
    LinearRelation,
    RelationPair,
    adjoint,
    compare_graphs,
    domain,
    from_matrix,
    from_pairs,
    identity_relation,
    inverse,
    is_c_selfadjoint,
    is_hermitian,
    is_unitary,
    kernel,
    multivalued_part,
    quotient_lower_bound,
    range_,
    relation_norm,
    s_adjoint,
    window,
)


def e(j, n):
    v = np.zeros(n, dtype=complex)
    v[j] = 1
    return FockVector(v)


def pair(f, g):
    return RelationPair(FockVector(f), FockVector(g))


def random_unitary(n, seed):
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return Q


N3 = 3


def test_from_pairs_examples():
    assert from_pairs([RelationPair(e(0, N3), e(0, N3))]).dim == 1
    purely = from_pairs([], [e(0, N3)], space_dim=N3)
    assert purely.dim == 1
    assert subspace_equal(multivalued_part(purely), coordinate_subspace(N3, [0]))
    dup = from_pairs([RelationPair(e(1, N3), e(1, N3))] * 2)
    assert dup.dim == 1


def test_from_pairs_rejects_mixed_truncations():
    with pytest.raises(DimensionMismatchError):
        from_pairs([RelationPair(e(0, 2), e(0, 2)), RelationPair(e(0, 3), e(0, 3))])


def test_relation_pair_rejects_mixed_truncations():
    with pytest.raises(DimensionMismatchError):
        RelationPair(e(0, 2), e(0, 3))


def test_graph_ambient_check():
    with pytest.raises(DimensionMismatchError):
        LinearRelation(2, zero_subspace(3))


def test_identity_structure():
    I = identity_relation(4)
    assert multivalued_part(I).dim == 0
    assert domain(I).dim == range_(I).dim == 4
    assert kernel(I).dim == 0
    assert compare_graphs(inverse(I), I, 1e-12).equal
    assert compare_graphs(adjoint(I), I, 1e-12).equal


def test_purely_multivalued_structure():
    A = from_pairs([], [e(0, N3)], space_dim=N3)
    assert domain(A).dim == 0
    assert subspace_equal(range_(A), coordinate_subspace(N3, [0]))
    assert subspace_equal(kernel(inverse(A)), coordinate_subspace(N3, [0]))
    star = adjoint(A)
    assert subspace_equal(domain(star), coordinate_subspace(N3, [1, 2]))
    assert relation_norm(A) == 0


def test_injective_example():
    # solve for x with (x, 0) in span{(e1, e1 + e2)}: only x = 0
    f = np.array([0, 1, 0])
    g = np.array([0, 1, 1])
    A = from_pairs([pair(f, g)])
    assert kernel(A).dim == 0


def test_adjoint_of_real_diagonal_is_itself():
    n = 6
    D = np.diag(2.0 ** -np.arange(n))
    A = from_matrix(D)
    assert compare_graphs(adjoint(A), A, 1e-10).equal
    assert is_hermitian(A).equal
    assert not is_unitary(A).equal


def test_adjoint_matches_conjugate_transpose():
    rng = np.random.default_rng(2)
    M = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    assert compare_graphs(adjoint(from_matrix(M)), from_matrix(M.conj().T), 1e-10).equal


def test_s_adjoint_with_identity_is_adjoint():
    rng = np.random.default_rng(4)
    M = rng.normal(size=(4, 4))
    A = from_matrix(M)
    assert compare_graphs(s_adjoint(A, np.eye(4)), adjoint(A), 1e-10).equal


def test_identity_is_c_selfadjoint_for_any_conjugation():
    n = 5
    # coefficientwise conjugation and e_n -> (-1)^n conj(e_n)
    for M in (np.eye(n), np.diag((-1.0) ** np.arange(n))):
        assert is_c_selfadjoint(identity_relation(n), M).equal


def test_one_dimensional_c_adjoint_hand_computation():
    # A = span{(e0, i e0)}. <i e0, u> = <e0, v> gives v = -i u, so A* = span{(1, -i)};
    # transporting by coefficientwise conjugation gives span{(1, i)} = A.
    A = from_pairs([pair([1], [1j])])
    star = adjoint(A)
    assert compare_graphs(star, from_pairs([pair([1], [-1j])]), 1e-12).equal
    c_star = s_adjoint(A, np.eye(1), antilinear=True)
    assert compare_graphs(c_star, from_pairs([pair([1], [1j])]), 1e-12).equal
    assert not is_hermitian(A).equal
    assert is_c_selfadjoint(A, np.eye(1)).equal


def test_s_adjoint_size_mismatch():
    with pytest.raises(DimensionMismatchError):
        s_adjoint(identity_relation(3), np.eye(2))


def test_relation_norm_examples():
    assert relation_norm(identity_relation(3)) == pytest.approx(1)
    assert relation_norm(from_pairs([pair([1, 0], [3, 0])])) == pytest.approx(3)
    assert relation_norm(inverse(identity_relation(3))) == pytest.approx(1)


def test_relation_norm_ignores_multivalued_component():
    # (e1, e0 + 2 e1) with e0 multivalued: quotient output is 2 e1
    A = from_pairs([pair([0, 1], [1, 2])], [FockVector([1, 0])])
    assert relation_norm(A) == pytest.approx(2)
    assert quotient_lower_bound(A) == pytest.approx(2)


def test_relation_norm_unitary_invariance():
    rng = np.random.default_rng(5)
    n = 5
    M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    U = random_unitary(n, 6)
    A = from_pairs([pair(M[:, j], M @ M[:, j]) for j in range(3)], [FockVector(M[:, 4])])
    B = from_pairs(
        [pair(U @ M[:, j], U @ (M @ M[:, j])) for j in range(3)], [FockVector(U @ M[:, 4])]
    )
    assert abs(relation_norm(A) - relation_norm(B)) < 1e-8
    assert abs(quotient_lower_bound(A) - quotient_lower_bound(B)) < 1e-8


def test_unitary_matrix_relation():
    U = random_unitary(4, 7)
    A = from_matrix(U)
    assert is_unitary(A).equal
    assert relation_norm(A) == pytest.approx(1, abs=1e-8)


def test_multivalued_part_of_adjoint_is_domain_complement():
    rng = np.random.default_rng(8)
    n = 6
    pairs = [pair(rng.normal(size=n), rng.normal(size=n)) for _ in range(3)]
    A = from_pairs(pairs, [FockVector(rng.normal(size=n))])
    assert subspace_equal(multivalued_part(adjoint(A)), complement(domain(A)), 1e-8)


def test_window_of_identity():
    W = window(identity_relation(5), 2)
    assert W.space_dim == 3
    assert compare_graphs(W, identity_relation(3), 1e-12).equal
    with pytest.raises(ValueError):
        window(identity_relation(3), 3)


def test_window_cuts_outputs_and_drops_wide_inputs():
    # (e0, e0 + e3) survives as (e0, e0); (e3, e0) is dropped
    A = from_pairs([pair([1, 0, 0, 0], [1, 0, 0, 1]), pair([0, 0, 0, 1], [1, 0, 0, 0])])
    W = window(A, 1)
    assert compare_graphs(W, from_pairs([pair([1, 0], [1, 0])]), 1e-12).equal


def test_compare_graphs_reports_dims():
    cmp = compare_graphs(identity_relation(2), from_pairs([pair([1, 0], [1, 0])]), 1e-8)
    assert not cmp
    assert cmp.dims == (2, 1)
