import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import unit
from definetti.fock_core import (
    SpaceShape,
    SymOperator,
    SymVector,
    annihilation_matrix,
    apply_annihilation,
    apply_creation,
    creation_matrix,
    embed_full,
    embedding_matrix,
    enumerate_basis,
    hartree_vector,
    sym_dimension,
    sym_tensor_op,
    sym_tensor_op_oracle,
)


def brute_force_count(d, N):
    return sum(1 for c in itertools.product(range(N + 1), repeat=d) if sum(c) == N)


def basis_vec(shape, counts):
    v = np.zeros(shape.dim, dtype=complex)
    v[shape.index(counts)] = 1
    return SymVector(shape, v)


def test_sym_dimension_examples():
    assert sym_dimension(2, 3) == 4
    assert sym_dimension(5, 0) == 1
    assert sym_dimension(3, 4) == brute_force_count(3, 4) == 15


@pytest.mark.parametrize("d,N", [(1, 7), (2, 5), (3, 6), (4, 4)])
def test_sym_dimension_matches_enumeration(d, N):
    assert sym_dimension(d, N) == brute_force_count(d, N)


def test_sym_dimension_large_is_exact():
    assert sym_dimension(32, 32) == math.comb(63, 31)


def test_sym_dimension_rejects_zero_modes():
    with pytest.raises(ValueError):
        sym_dimension(0, 3)


def test_enumerate_basis_order():
    assert enumerate_basis(SpaceShape(2, 2)) == [(2, 0), (1, 1), (0, 2)]
    assert enumerate_basis(SpaceShape(1, 5)) == [(5,)]
    b = enumerate_basis(SpaceShape(3, 2))
    assert len(b) == sym_dimension(3, 2) == 6
    assert b[0] == (2, 0, 0) and b[-1] == (0, 0, 2)
    assert b == sorted(b, reverse=True)


def test_hartree_vector_examples():
    v = hartree_vector([1, 0], 3)
    assert np.allclose(v.amplitudes, [1, 0, 0, 0])
    s = 1 / np.sqrt(2)
    assert np.allclose(hartree_vector([s, s], 2).amplitudes, [0.5, s, 0.5], atol=1e-15)


@pytest.mark.parametrize("N", [0, 1, 4, 17, 30])
def test_hartree_norm(rng, N):
    for d in (2, 3):
        assert abs(hartree_vector(unit(rng, d), N).norm() - 1) < 1e-12


def test_hartree_embeds_to_kronecker_power(rng):
    for d, N in [(2, 4), (3, 3), (3, 4)]:
        u = unit(rng, d)
        kron = np.ones(1, dtype=complex)
        for _ in range(N):
            kron = np.kron(kron, u)
        assert np.allclose(embed_full(hartree_vector(u, N)), kron, atol=1e-12)


def test_embed_full_examples():
    s = SpaceShape(2, 2)
    r = 1 / np.sqrt(2)
    assert np.allclose(embed_full(basis_vec(s, (1, 1))), [0, r, r, 0])
    assert np.allclose(embed_full(basis_vec(s, (2, 0))), [1, 0, 0, 0])


def test_embedding_is_isometric_and_symmetric():
    for d, N in [(2, 4), (3, 3)]:
        E = embedding_matrix(d, N).toarray()
        assert np.allclose(E.conj().T @ E, np.eye(E.shape[1]), atol=1e-12)
        T = E.reshape((d,) * N + (E.shape[1],))
        for perm in itertools.permutations(range(N)):
            assert np.allclose(np.transpose(T, list(perm) + [N]), T)


def test_embedding_size_guard():
    with pytest.raises(ValueError):
        embedding_matrix(2, 21)


def test_creation_examples():
    vac = SymVector(SpaceShape(2, 0), [1])
    out = apply_creation([1, 0], vac)
    assert np.allclose(out.amplitudes, [1, 0])
    out = apply_creation([1, 0], basis_vec(SpaceShape(2, 1), (1, 0)))
    assert np.allclose(out.amplitudes, [np.sqrt(2), 0, 0])


def test_annihilation_examples():
    out = apply_annihilation([1, 0], basis_vec(SpaceShape(2, 1), (1, 0)))
    assert np.allclose(out.amplitudes, [1])
    out = apply_annihilation([0, 1], basis_vec(SpaceShape(2, 2), (2, 0)))
    assert np.allclose(out.amplitudes, 0)


def test_annihilation_rejects_vacuum():
    with pytest.raises(ValueError):
        apply_annihilation([1, 0], SymVector(SpaceShape(2, 0), [1]))


def test_creation_rejects_wrong_length():
    with pytest.raises(ValueError):
        apply_creation([1, 0, 0], SymVector(SpaceShape(2, 0), [1]))


def test_adjointness_and_norm_identity(rng):
    for d, N in [(2, 3), (3, 4)]:
        f = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        shape, up = SpaceShape(d, N), SpaceShape(d, N + 1)
        phi = SymVector(shape, rng.standard_normal(shape.dim) + 1j * rng.standard_normal(shape.dim))
        psi = SymVector(up, rng.standard_normal(up.dim) + 1j * rng.standard_normal(up.dim))
        lhs = apply_creation(f, phi).inner(psi)
        rhs = phi.inner(apply_annihilation(f, psi))
        assert abs(lhs - rhs) < 1e-12
        created = apply_creation(f, phi)
        assert abs(created.norm() ** 2 - phi.inner(apply_annihilation(f, created)).real) < 1e-12


def test_dense_matrices_match_sparse_action(rng):
    shape = SpaceShape(3, 3)
    f = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    v = SymVector(shape, rng.standard_normal(shape.dim) + 0j)
    assert np.allclose(creation_matrix(f, shape) @ v.amplitudes, apply_creation(f, v).amplitudes)
    assert np.allclose(annihilation_matrix(f, shape) @ v.amplitudes, apply_annihilation(f, v).amplitudes)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(0, 6), st.integers(0, 2**32 - 1))
def test_ccr_on_basis(d, N, seed):
    gen = np.random.default_rng(seed)
    f, g = unit(gen, d), unit(gen, d)
    shape = SpaceShape(d, N)
    for col in np.eye(shape.dim):
        v = SymVector(shape, col)
        out = apply_annihilation(f, apply_creation(g, v)).amplitudes
        if N:
            out = out - apply_creation(g, apply_annihilation(f, v)).amplitudes
        assert np.max(np.abs(out - np.vdot(f, g) * col)) < 1e-12


def test_creation_intertwines_full_space(rng):
    # full-space creation: sqrt(N+1) * Sym(f (x) psi)
    for d, N in [(2, 3), (3, 2)]:
        shape = SpaceShape(d, N)
        f = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        v = SymVector(shape, rng.standard_normal(shape.dim) + 1j * rng.standard_normal(shape.dim))
        full = np.kron(f, embed_full(v)).reshape((d,) * (N + 1))
        sym = sum(np.transpose(full, p) for p in itertools.permutations(range(N + 1)))
        sym = sym.reshape(-1) * np.sqrt(N + 1) / math.factorial(N + 1)
        assert np.allclose(embed_full(apply_creation(f, v)), sym, atol=1e-12)


def test_vector_symmetric_product_is_creation(rng):
    # f (x)_s Psi with the 1/sqrt(l! (k-l)! k!) normalization, l = k - 1 slots for Psi
    for d, l in [(2, 1), (2, 3), (3, 2), (2, 4)]:
        k = l + 1
        shape = SpaceShape(d, l)
        f = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        psi = SymVector(shape, rng.standard_normal(shape.dim) + 1j * rng.standard_normal(shape.dim))
        full = np.kron(embed_full(psi), f).reshape((d,) * k)
        total = sum(np.transpose(full, p) for p in itertools.permutations(range(k)))
        total = total.reshape(-1) / math.sqrt(math.factorial(l) * math.factorial(k - l) * math.factorial(k))
        assert np.allclose(total, embed_full(apply_creation(f, psi)), atol=1e-12)


def test_sym_tensor_op_identity_cases(rng):
    shape = SpaceShape(2, 2)
    x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    A = SymOperator(shape, x + x.conj().T)
    assert np.allclose(sym_tensor_op(A, 2).matrix, A.matrix)
    assert np.allclose(sym_tensor_op(1.0, 3, d=2).matrix, np.eye(4))


def test_sym_tensor_op_one_on_two():
    # frozen from the permutation-sum oracle: n_1 on (d=2, k=2)
    A = SymOperator(SpaceShape(2, 1), np.diag([1, 0]))
    expected = np.diag([2.0, 1.0, 0.0])
    assert np.allclose(sym_tensor_op_oracle(A, 2).matrix, expected)
    assert np.allclose(sym_tensor_op(A, 2).matrix, expected)
    assert np.trace(expected) == 3


@pytest.mark.parametrize("d,l,k", [(2, 1, 3), (2, 2, 4), (3, 1, 2), (3, 2, 3), (3, 0, 2), (2, 3, 3)])
def test_sym_tensor_op_matches_permutation_oracle(rng, d, l, k):
    shape = SpaceShape(d, l)
    x = rng.standard_normal((shape.dim,) * 2) + 1j * rng.standard_normal((shape.dim,) * 2)
    A = SymOperator(shape, x)
    assert np.allclose(sym_tensor_op(A, k).matrix, sym_tensor_op_oracle(A, k).matrix, atol=1e-12)


def test_sym_tensor_op_rejects_l_above_k():
    with pytest.raises(ValueError):
        sym_tensor_op(SymOperator(SpaceShape(2, 3), np.eye(4)), 2)
