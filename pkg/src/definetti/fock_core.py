"""Occupation-number representation of the bosonic symmetric space.

The N-boson space over a d-dimensional one-body space is indexed by
occupation vectors ``alpha`` (length d, ``sum(alpha) == N``) listed in
reverse-lexicographic order. That order is the global basis convention for
every matrix in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np
import scipy.sparse as sp

TOL = 1e-12
EMBED_LIMIT = 10**6
SYM_TENSOR_ORACLE_LIMIT = 10**5


def sym_dimension(d: int, N: int) -> int:
    """Dimension ``binom(N + d - 1, d - 1)`` of the N-boson space in d modes."""
    if d < 1:
        raise ValueError(f"mode count d must be >= 1, got {d}")
    if N < 0:
        raise ValueError(f"particle number N must be >= 0, got {N}")
    return math.comb(N + d - 1, d - 1)


@dataclass(frozen=True)
class SpaceShape:
    d: int
    N: int

    def __post_init__(self):
        sym_dimension(self.d, self.N)

    @property
    def dim(self) -> int:
        return sym_dimension(self.d, self.N)

    @property
    def basis(self) -> tuple[tuple[int, ...], ...]:
        return _basis(self.d, self.N)

    def index(self, counts) -> int:
        return _index_map(self.d, self.N)[tuple(counts)]

    def counts_array(self) -> np.ndarray:
        """Basis as an integer array of shape ``(dim, d)``."""
        return _counts_array(self.d, self.N)


@dataclass(frozen=True, eq=False)
class SymVector:
    shape: SpaceShape
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.shape.dim,):
            raise ValueError(f"expected {self.shape.dim} amplitudes, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: SymVector) -> complex:
        """``<self, other>``, antilinear in ``self``."""
        _check_same_shape(self.shape, other.shape)
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class SymOperator:
    shape: SpaceShape
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        n = self.shape.dim
        if mat.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got shape {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise ValueError("operator entries must be finite")
        object.__setattr__(self, "matrix", mat)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def is_hermitian(self, tol: float = TOL) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)


def _check_same_shape(a: SpaceShape, b: SpaceShape) -> None:
    if a != b:
        raise ValueError(f"shape mismatch: {a} vs {b}")


def as_one_body(f, d: int | None = None) -> np.ndarray:
    f = np.asarray(f, dtype=complex).reshape(-1)
    if d is not None and f.shape[0] != d:
        raise ValueError(f"one-body vector has length {f.shape[0]}, expected d={d}")
    return f


# ---------------------------------------------------------------------------
# basis bookkeeping (cached per shape)


def _compositions(N: int, d: int):
    if d == 1:
        yield (N,)
        return
    for first in range(N, -1, -1):
        for rest in _compositions(N - first, d - 1):
            yield (first, *rest)


@lru_cache(maxsize=None)
def _basis(d: int, N: int) -> tuple[tuple[int, ...], ...]:
    return tuple(_compositions(N, d))


def enumerate_basis(shape: SpaceShape) -> list[tuple[int, ...]]:
    """All occupation vectors of ``shape`` in reverse-lexicographic order."""
    return list(shape.basis)


@lru_cache(maxsize=None)
def _index_map(d: int, N: int) -> dict[tuple[int, ...], int]:
    return {alpha: i for i, alpha in enumerate(_basis(d, N))}


@lru_cache(maxsize=None)
def _counts_array(d: int, N: int) -> np.ndarray:
    arr = np.array(_basis(d, N), dtype=np.int64).reshape(-1, d)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def _sqrt_multinomial(d: int, N: int) -> np.ndarray:
    """``sqrt(N! / prod(alpha_i!))`` for every basis vector."""
    fN = math.factorial(N)
    vals = [fN // math.prod(math.factorial(a) for a in alpha) for alpha in _basis(d, N)]
    out = np.sqrt(np.array(vals, dtype=float))
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _raise_map(d: int, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Targets and weights of the mode creators from (d, N) into (d, N + 1).

    ``targets[j, i]`` is the index of ``alpha_j + e_i`` and ``weights[j, i]``
    is ``sqrt(alpha_j[i] + 1)``.
    """
    idx = _index_map(d, N + 1)
    basis = _basis(d, N)
    targets = np.empty((len(basis), d), dtype=np.int64)
    weights = np.empty((len(basis), d), dtype=float)
    for j, alpha in enumerate(basis):
        for i in range(d):
            up = list(alpha)
            up[i] += 1
            targets[j, i] = idx[tuple(up)]
            weights[j, i] = math.sqrt(alpha[i] + 1)
    targets.setflags(write=False)
    weights.setflags(write=False)
    return targets, weights


@lru_cache(maxsize=None)
def shift_tables(d: int, k: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Index and weight tables for adding an (d, m) occupation to a (d, k) one.

    Returns ``(index, weight)`` of shape ``(dim(d, m), dim(d, k))`` with
    ``index[e, a]`` the position of ``eta_e + alpha_a`` in the (d, k + m)
    basis and ``weight[e, a] = sqrt((eta + alpha)! / (eta! alpha!))``.
    These drive both the reduced density matrices and the symmetric tensor
    product of operators.
    """
    target = _index_map(d, k + m)
    inner = _basis(d, k)
    outer = _basis(d, m)
    index = np.empty((len(outer), len(inner)), dtype=np.int64)
    weight = np.empty((len(outer), len(inner)), dtype=float)
    for e, eta in enumerate(outer):
        for a, alpha in enumerate(inner):
            s = tuple(x + y for x, y in zip(eta, alpha))
            index[e, a] = target[s]
            ratio = math.prod(math.comb(x + y, x) for x, y in zip(eta, alpha))
            weight[e, a] = math.sqrt(ratio)
    index.setflags(write=False)
    weight.setflags(write=False)
    return index, weight


# ---------------------------------------------------------------------------
# vectors and second quantization


def hartree_vector(u, N: int) -> SymVector:
    """Coefficients of ``u^{(x)N}``: ``sqrt(N!/alpha!) * prod_i u_i^alpha_i``."""
    u = as_one_body(u)
    shape = SpaceShape(u.shape[0], N)
    return SymVector(shape, hartree_amplitudes(u[None, :], N)[0])


def hartree_amplitudes(us: np.ndarray, N: int) -> np.ndarray:
    """Batched Hartree coefficients for an array of one-body vectors ``(B, d)``."""
    us = np.asarray(us, dtype=complex)
    d = us.shape[-1]
    counts = _counts_array(d, N)
    monomials = np.prod(us[:, None, :] ** counts[None, :, :], axis=-1)
    return monomials * _sqrt_multinomial(d, N)[None, :]


def apply_creation(f, v: SymVector) -> SymVector:
    """``a*(f) v`` with ``a*(f) = sum_i f_i a*_i``."""
    d, N = v.shape.d, v.shape.N
    f = as_one_body(f, d)
    targets, weights = _raise_map(d, N)
    out = np.zeros(sym_dimension(d, N + 1), dtype=complex)
    for i in range(d):
        if f[i] != 0:
            np.add.at(out, targets[:, i], f[i] * weights[:, i] * v.amplitudes)
    return SymVector(SpaceShape(d, N + 1), out)


def apply_annihilation(f, v: SymVector) -> SymVector:
    """``a(f) v`` with ``a(f) = sum_i conj(f_i) a_i``, the adjoint of :func:`apply_creation`."""
    d, N = v.shape.d, v.shape.N
    if N == 0:
        raise ValueError("cannot annihilate a particle in the vacuum sector (N = 0)")
    f = as_one_body(f, d)
    targets, weights = _raise_map(d, N - 1)
    out = np.zeros(sym_dimension(d, N - 1), dtype=complex)
    for i in range(d):
        if f[i] != 0:
            out += np.conj(f[i]) * weights[:, i] * v.amplitudes[targets[:, i]]
    return SymVector(SpaceShape(d, N - 1), out)


def creation_matrix(f, shape: SpaceShape) -> np.ndarray:
    """Dense matrix of ``a*(f)`` from ``shape`` to ``(d, N + 1)``."""
    d, N = shape.d, shape.N
    f = as_one_body(f, d)
    targets, weights = _raise_map(d, N)
    mat = np.zeros((sym_dimension(d, N + 1), shape.dim), dtype=complex)
    cols = np.arange(shape.dim)
    for i in range(d):
        np.add.at(mat, (targets[:, i], cols), f[i] * weights[:, i])
    return mat


def annihilation_matrix(f, shape: SpaceShape) -> np.ndarray:
    """Dense matrix of ``a(f)`` from ``shape`` to ``(d, N - 1)``."""
    if shape.N == 0:
        raise ValueError("cannot annihilate a particle in the vacuum sector (N = 0)")
    return creation_matrix(f, SpaceShape(shape.d, shape.N - 1)).conj().T


# ---------------------------------------------------------------------------
# full tensor space oracle


@lru_cache(maxsize=32)
def embedding_matrix(d: int, N: int) -> sp.csr_matrix:
    """Isometry from the symmetric basis into ``(C^d)^{(x)N}`` as a sparse matrix.

    Row ``w`` is the word ``(w_1, ..., w_N)`` read as a base-d integer with the
    first tensor factor most significant.
    """
    full = d**N
    if full > EMBED_LIMIT:
        raise ValueError(f"full tensor space d^N = {full} exceeds the oracle limit {EMBED_LIMIT}")
    words = np.arange(full, dtype=np.int64)
    counts = np.zeros((full, d), dtype=np.int64)
    rest = words.copy()
    for _ in range(N):
        rest, digit = np.divmod(rest, d)
        np.add.at(counts, (np.arange(full), digit), 1)
    # mixed-radix key identifies an occupation vector
    radix = (N + 1) ** np.arange(d, dtype=np.int64)
    keys = counts @ radix
    basis_keys = _counts_array(d, N) @ radix
    order = np.argsort(basis_keys)
    cols = order[np.searchsorted(basis_keys[order], keys)]
    vals = 1.0 / _sqrt_multinomial(d, N)[cols]
    return sp.csr_matrix((vals.astype(complex), (words, cols)), shape=(full, sym_dimension(d, N)))


def embed_full(v: SymVector) -> np.ndarray:
    """Image of ``v`` in the full tensor space, length ``d**N``."""
    return embedding_matrix(v.shape.d, v.shape.N) @ v.amplitudes


def compress_full(x: np.ndarray, shape: SpaceShape) -> np.ndarray:
    """Project a full-space vector or matrix back to symmetric coordinates."""
    E = embedding_matrix(shape.d, shape.N)
    x = np.asarray(x)
    if x.ndim == 1:
        return E.conj().T @ x
    return (E.conj().T @ (E.conj().T @ x.conj().T).conj().T)


def full_operator(A: SymOperator) -> np.ndarray:
    """Dense ``E A E^*`` on the full tensor space (small sizes only)."""
    E = embedding_matrix(A.shape.d, A.shape.N).toarray()
    return E @ A.matrix @ E.conj().T


# ---------------------------------------------------------------------------
# symmetric tensor product of operators


def sym_tensor_op(A: SymOperator | complex | float, k: int, d: int | None = None) -> SymOperator:
    """``A (x)_s 1_{k - l}``: ``A`` placed on every l-subset of k factors, summed.

    Equivalent to ``1 / (l! (k-l)!) * sum_{sigma in S_k} sigma (A (x) 1) sigma*``
    restricted to the symmetric space. A scalar ``A`` is read as an operator
    on the 0-particle space and requires ``d``.
    """
    A = _as_sym_operator(A, d)
    d, l = A.shape.d, A.shape.N
    if l > k:
        raise ValueError(f"operator acts on l={l} particles, more than k={k}")
    index, weight = shift_tables(d, l, k - l)
    out = np.zeros((sym_dimension(d, k),) * 2, dtype=complex)
    for e in range(index.shape[0]):
        rows = index[e]
        out[np.ix_(rows, rows)] += np.outer(weight[e], weight[e]) * A.matrix
    return SymOperator(SpaceShape(d, k), out)


def sym_tensor_op_oracle(A: SymOperator | complex | float, k: int, d: int | None = None) -> SymOperator:
    """Literal permutation sum of ``A (x) 1`` in the full tensor space, compressed back."""
    A = _as_sym_operator(A, d)
    d, l = A.shape.d, A.shape.N
    if l > k:
        raise ValueError(f"operator acts on l={l} particles, more than k={k}")
    if d**k > SYM_TENSOR_ORACLE_LIMIT or k > 4:
        raise ValueError("full-tensor symmetrization oracle limited to k <= 4 and d^k <= 1e5")
    A_full = full_operator(A) if l > 0 else A.matrix.reshape(1, 1)
    X = np.kron(A_full, np.eye(d ** (k - l)))
    T = X.reshape((d,) * (2 * k))
    acc = np.zeros_like(T)
    for sigma in permutations(range(k)):
        axes = list(sigma) + [k + s for s in sigma]
        acc += np.transpose(T, axes)
    acc = acc.reshape(d**k, d**k) / (math.factorial(l) * math.factorial(k - l))
    return SymOperator(SpaceShape(d, k), compress_full(acc, SpaceShape(d, k)))


def _as_sym_operator(A, d: int | None) -> SymOperator:
    if isinstance(A, SymOperator):
        return A
    if d is None:
        raise ValueError("a scalar operator needs the mode count d")
    return SymOperator(SpaceShape(d, 0), np.array([[A]], dtype=complex))
