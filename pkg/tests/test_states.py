import warnings

import numpy as np
import pytest
import scipy.linalg

from conftest import unit
from definetti.fock_core import SpaceShape, SymVector
from definetti.metrics import trace_distance
from definetti.states import (
    DegenerateGroundStateWarning,
    MixedState,
    bose_hubbard_ground_state,
    haar_random_pure,
    hartree_state,
    hartree_superposition,
    make_state,
    maximally_mixed,
    number_operator_check,
    parse_family,
    pure_state,
    random_mixed,
)


def assert_state(G):
    assert np.max(np.abs(G.matrix - G.matrix.conj().T)) <= 1e-12
    assert abs(np.trace(G.matrix) - 1) <= 1e-12
    assert np.linalg.eigvalsh(G.matrix)[0] >= -1e-10


def test_pure_state_basis_vector():
    s = SpaceShape(2, 3)
    v = np.zeros(4)
    v[0] = 1
    G = pure_state(SymVector(s, v))
    assert np.allclose(G.matrix, np.diag([1, 0, 0, 0]))


def test_pure_state_is_projector(rng):
    s = SpaceShape(3, 3)
    z = rng.standard_normal(s.dim) + 1j * rng.standard_normal(s.dim)
    G = pure_state(SymVector(s, z / np.linalg.norm(z)))
    assert abs(G.trace() - 1) < 1e-12
    assert np.max(np.abs(G.matrix @ G.matrix - G.matrix)) < 1e-12


def test_pure_state_rejects_unnormalized():
    with pytest.raises(ValueError):
        pure_state(SymVector(SpaceShape(2, 1), [1, 1]))


def test_mixed_state_rejects_bad_trace():
    with pytest.raises(ValueError):
        MixedState(SpaceShape(2, 1), np.eye(2))


def test_hartree_state():
    assert np.allclose(hartree_state([1, 0], 2).matrix, np.diag([1, 0, 0]))
    G = hartree_state(unit(np.random.default_rng(3), 3), 4)
    assert np.linalg.matrix_rank(G.matrix, tol=1e-10) == 1
    with pytest.raises(ValueError):
        hartree_state([1, 1], 2)


def test_hartree_superposition(rng):
    r = 1 / np.sqrt(2)
    G = hartree_superposition([1, 0], [0, 1], 1)
    assert np.allclose(G.matrix, 0.5 * np.ones((2, 2)))
    # <u, v> = 1/sqrt(2), N = 2: norm^2 = 2 (1 + 1/2) = 3
    u, v = np.array([1, 0]), np.array([r, r])
    raw = np.array([1, 0, 0]) + np.array([0.5, r, 0.5])
    assert np.isclose(raw @ raw, 3)
    G = hartree_superposition(u, v, 2)
    assert np.allclose(G.matrix, np.outer(raw, raw) / 3)
    for N in range(1, 11):
        assert_state(hartree_superposition(unit(rng, 3), unit(rng, 3), N))
    with pytest.raises(ValueError):
        hartree_superposition(u, 1j * u, 3)


def test_haar_random_pure_deterministic():
    s = SpaceShape(2, 3)
    a, b = haar_random_pure(s, 5), haar_random_pure(s, 5)
    assert np.array_equal(a.matrix, b.matrix)
    assert abs(a.trace() - 1) < 1e-12
    assert not np.array_equal(a.matrix, haar_random_pure(s, 6).matrix)


def test_haar_random_pure_average_is_maximally_mixed():
    s = SpaceShape(2, 2)
    mats = np.array([haar_random_pure(s, seed).matrix for seed in range(10_000)])
    mean = mats.mean(axis=0)
    stderr = np.sqrt(np.mean(np.abs(mats - mean) ** 2, axis=0) / len(mats))
    dev = np.abs(mean - np.eye(3) / 3)
    assert np.all(dev <= 5 * stderr)


def test_random_mixed(rng):
    s = SpaceShape(3, 2)
    G = random_mixed(s, 1, 4)
    assert np.max(np.abs(G.matrix @ G.matrix - G.matrix)) < 1e-12
    for rank in (1, 2, 4):
        G = random_mixed(s, rank, 9)
        assert np.sum(np.linalg.eigvalsh(G.matrix) > 1e-10) <= rank
        assert_state(G)
    with pytest.raises(ValueError):
        random_mixed(s, 7, 0)
    with pytest.raises(ValueError):
        random_mixed(s, 0, 0)


def test_maximally_mixed():
    assert np.allclose(maximally_mixed(SpaceShape(2, 1)).matrix, np.diag([0.5, 0.5]))
    assert np.allclose(maximally_mixed(SpaceShape(2, 3)).matrix, np.eye(4) / 4)


def brute_force_dimer(N, J, U):
    """Hamiltonian written directly from occupation-number matrix elements."""
    basis = [(N - j, j) for j in range(N + 1)]
    H = np.zeros((N + 1, N + 1))
    for col, (n1, n2) in enumerate(basis):
        H[col, col] = U / 2 * (n1 * (n1 - 1) + n2 * (n2 - 1))
        if n2 > 0:  # a1* a2
            H[basis.index((n1 + 1, n2 - 1)), col] += -J * np.sqrt((n1 + 1) * n2)
        if n1 > 0:  # a2* a1
            H[basis.index((n1 - 1, n2 + 1)), col] += -J * np.sqrt(n1 * (n2 + 1))
    return H


def test_bose_hubbard_noninteracting_is_hartree():
    r = 1 / np.sqrt(2)
    for N in range(1, 13):
        G = bose_hubbard_ground_state(N, 1.0, 0.0)
        assert trace_distance(G, hartree_state([r, r], N)) < 1e-10


def test_bose_hubbard_noninteracting_energy():
    from definetti.states import bose_hubbard_hamiltonian

    for N in (1, 4, 7):
        assert np.isclose(np.linalg.eigvalsh(bose_hubbard_hamiltonian(N, 1.0, 0.0))[0], -N)


def test_bose_hubbard_no_hopping():
    G = bose_hubbard_ground_state(2, 0.0, 1.0)
    assert np.allclose(G.matrix, np.diag([0, 1, 0]))


def test_bose_hubbard_matches_dense_solve():
    H = brute_force_dimer(4, 1.0, 1.0)
    _, vecs = scipy.linalg.eigh(H)
    v = vecs[:, 0]
    assert trace_distance(bose_hubbard_ground_state(4, 1.0, 1.0), np.outer(v, v)) < 1e-10


def test_bose_hubbard_degenerate_warns():
    with pytest.warns(DegenerateGroundStateWarning):
        bose_hubbard_ground_state(3, 0.0, 1.0)
    with pytest.raises(ValueError):
        bose_hubbard_ground_state(3, 0.0, 0.0)


def test_number_operator():
    for d, N in [(1, 3), (2, 4), (3, 3)]:
        assert number_operator_check(SpaceShape(d, N)) < 1e-12


@pytest.mark.parametrize("family", ["hartree", "hartree-sup", "random-pure", "random-mixed", "max-mixed", "bose-hubbard"])
def test_every_family_is_a_state(family):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateGroundStateWarning)
        for N in (1, 3, 6):
            assert_state(make_state(family, 2, N, seed=2))


def test_family_parsing():
    assert parse_family("bose-hubbard:J=1:U=0.5") == ("bose-hubbard", {"J": 1.0, "U": 0.5})
    with pytest.raises(ValueError):
        parse_family("thermal")
    with pytest.raises(ValueError):
        make_state("bose-hubbard", 3, 2)
