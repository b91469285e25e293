"""Reduced k-body density matrices (normalized to unit trace)."""

from __future__ import annotations

import math

import numpy as np

from .fock_core import (
    SpaceShape,
    SymOperator,
    as_one_body,
    embedding_matrix,
    hartree_amplitudes,
    shift_tables,
)
from .states import MixedState

ORACLE_LIMIT = 10**5


def _matrix(G) -> tuple[SpaceShape, np.ndarray]:
    if isinstance(G, SymOperator):
        return G.shape, G.matrix
    raise TypeError(f"expected a SymOperator, got {type(G).__name__}")


def reduce_matrix(shape: SpaceShape, G: np.ndarray, k: int) -> np.ndarray:
    """Unnormalized-input version of :func:`reduce` working on a raw matrix.

    In occupation coordinates,

        <alpha| gamma |beta> = binom(N, k)^-1 (alpha! beta!)^-1/2 Tr[G a*^beta a^alpha]

    and ``Tr[G a*^beta a^alpha]`` collapses to a sum over the spectator
    occupation ``eta`` of ``G[eta + alpha, eta + beta]`` with weights from
    :func:`shift_tables`.
    """
    d, N = shape.d, shape.N
    if not 0 <= k <= N:
        raise ValueError(f"k must lie in [0, N={N}], got {k}")
    index, weight = shift_tables(d, k, N - k)
    block = G[index[:, :, None], index[:, None, :]]
    w = weight[:, :, None] * weight[:, None, :]
    return np.sum(w * block, axis=0) / math.comb(N, k)


def reduce(G: SymOperator, k: int) -> MixedState:
    """k-body reduced density matrix of ``G`` with unit trace; ``k = 0`` gives ``[[1]]``."""
    shape, mat = _matrix(G)
    out = reduce_matrix(shape, mat, k)
    return MixedState(SpaceShape(shape.d, k), out)


def reduce_oracle(G: SymOperator, k: int) -> MixedState:
    """Brute-force partial trace over the last ``N - k`` tensor factors."""
    shape, mat = _matrix(G)
    d, N = shape.d, shape.N
    if not 0 <= k <= N:
        raise ValueError(f"k must lie in [0, N={N}], got {k}")
    if d**N > ORACLE_LIMIT:
        raise ValueError(f"d^N = {d**N} exceeds the oracle limit {ORACLE_LIMIT}")
    E = embedding_matrix(d, N)
    head, tail = d**k, d ** (N - k)
    # G_full = E G E*, rows of E split as (head, tail)
    left = np.asarray(E @ mat).reshape(head, tail * shape.dim)
    right = E.reshape((head, tail * shape.dim)).tocsr()
    # full partial trace is left @ right^*; compress both factors first so the
    # d^k x d^k matrix is never formed
    Ek_adj = embedding_matrix(d, k).conj().T.tocsr()
    a = np.asarray(Ek_adj @ left)
    b = (Ek_adj @ right).tocsr()
    out = np.asarray(b.conj() @ a.T).T
    return MixedState(SpaceShape(d, k), out)


def partial_trace_step(g: SymOperator) -> MixedState:
    """Trace out one particle of a k-body density matrix."""
    return reduce(g, g.shape.N - 1)


def hartree_expectation(g: SymOperator, u) -> float:
    """``<u^k, g u^k>`` for a Hermitian k-body operator ``g``."""
    shape, mat = _matrix(g)
    u = as_one_body(u, shape.d)
    c = hartree_amplitudes(u[None, :], shape.N)[0]
    return float(np.real(np.vdot(c, mat @ c)))


def hartree_expectations(g: SymOperator, us: np.ndarray) -> np.ndarray:
    """Vectorized :func:`hartree_expectation` over rows of ``us``."""
    shape, mat = _matrix(g)
    c = hartree_amplitudes(np.asarray(us, dtype=complex).reshape(-1, shape.d), shape.N)
    return np.real(np.einsum("bi,ij,bj->b", c.conj(), mat, c))
