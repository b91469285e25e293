"""Test-state factories on the N-boson symmetric space."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from .fock_core import (
    SpaceShape,
    SymOperator,
    SymVector,
    apply_annihilation,
    as_one_body,
    creation_matrix,
    hartree_vector,
)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
NORM_TOL = 1e-10

FAMILIES = ("hartree", "hartree-sup", "random-pure", "random-mixed", "max-mixed", "bose-hubbard")


class DegenerateGroundStateWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class MixedState(SymOperator):
    """Density matrix on the symmetric space: Hermitian, unit trace.

    Positivity is checked by :meth:`check_invariants` rather than at
    construction, since it needs a full eigendecomposition.
    """

    def __post_init__(self):
        super().__post_init__()
        if not self.is_hermitian(HERMITIAN_TOL):
            raise ValueError("density matrix is not Hermitian")
        if abs(self.trace() - 1) > TRACE_TOL:
            raise ValueError(f"density matrix has trace {self.trace()}, expected 1")

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def check_invariants(self) -> None:
        lo = self.min_eigenvalue()
        if lo < -PSD_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")


def pure_state(v: SymVector) -> MixedState:
    if abs(v.norm() - 1) > NORM_TOL:
        raise ValueError(f"state vector has norm {v.norm()}, expected 1")
    a = v.amplitudes
    return MixedState(v.shape, np.outer(a, a.conj()))


def _unit(u, name: str = "u") -> np.ndarray:
    u = as_one_body(u)
    if abs(np.linalg.norm(u) - 1) > NORM_TOL:
        raise ValueError(f"one-body vector {name} is not normalized")
    return u


def hartree_state(u, N: int) -> MixedState:
    return pure_state(hartree_vector(_unit(u), N))


def hartree_superposition(u, v, N: int) -> MixedState:
    """Pure state of ``u^N + v^N``, normalized with ``2 (1 + Re <u, v>^N)``."""
    u, v = _unit(u), _unit(v, "v")
    overlap = np.vdot(u, v)
    if abs(abs(overlap) - 1) < 1e-12:
        raise ValueError("u and v are colinear")
    norm2 = 2 * (1 + (overlap**N).real)
    amps = (hartree_vector(u, N).amplitudes + hartree_vector(v, N).amplitudes) / np.sqrt(norm2)
    return pure_state(SymVector(SpaceShape(u.shape[0], N), amps))


def haar_random_pure(shape: SpaceShape, seed: int) -> MixedState:
    gen = _rng.generator(seed, _rng.STREAM_STATES)
    z = _rng.complex_gaussian(gen, shape.dim)
    return pure_state(SymVector(shape, z / np.linalg.norm(z)))


def random_mixed(shape: SpaceShape, rank: int, seed: int) -> MixedState:
    """Dirichlet-weighted mixture of ``rank`` independent random pure states."""
    if not 1 <= rank <= shape.dim:
        raise ValueError(f"rank must lie in [1, {shape.dim}], got {rank}")
    gen = _rng.generator(seed, _rng.STREAM_STATES)
    weights = gen.dirichlet(np.ones(rank)) if rank > 1 else np.ones(1)
    z = _rng.complex_gaussian(gen, (rank, shape.dim))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    mat = np.einsum("r,ri,rj->ij", weights, z, z.conj())
    mat = (mat + mat.conj().T) / 2
    return MixedState(shape, mat / np.trace(mat).real)


def maximally_mixed(shape: SpaceShape) -> MixedState:
    return MixedState(shape, np.eye(shape.dim, dtype=complex) / shape.dim)


def bose_hubbard_hamiltonian(N: int, J: float, U: float) -> np.ndarray:
    """``-J (a1* a2 + a2* a1) + U/2 sum_i n_i (n_i - 1)`` on the two-mode space."""
    shape = SpaceShape(2, N)
    if N == 0:
        return np.zeros((1, 1), dtype=complex)
    lower = SpaceShape(2, N - 1)
    e1, e2 = np.array([1, 0]), np.array([0, 1])
    hop = creation_matrix(e1, lower) @ creation_matrix(e2, lower).conj().T
    counts = shape.counts_array()
    onsite = 0.5 * np.sum(counts * (counts - 1), axis=1)
    return -J * (hop + hop.conj().T) + U * np.diag(onsite).astype(complex)


def bose_hubbard_ground_state(N: int, J: float, U: float) -> MixedState:
    """Ground state of the two-mode Bose-Hubbard dimer.

    A degenerate ground level emits :class:`DegenerateGroundStateWarning` and
    returns the first eigenvector in solver order.
    """
    if J == 0 and U == 0:
        raise ValueError("(J, U) = (0, 0) has no distinguished ground state")
    H = bose_hubbard_hamiltonian(N, J, U)
    energies, vecs = np.linalg.eigh(H)
    if len(energies) > 1 and energies[1] - energies[0] < 1e-9 * max(1.0, abs(energies[0])):
        warnings.warn(f"degenerate ground state at N={N}, J={J}, U={U}", DegenerateGroundStateWarning)
    v = vecs[:, 0]
    # fix the global phase so the output does not depend on the solver
    v = v * np.exp(-1j * np.angle(v[np.argmax(np.abs(v))]))
    return pure_state(SymVector(SpaceShape(2, N), v / np.linalg.norm(v)))


def number_operator_check(shape: SpaceShape) -> float:
    """Max deviation of ``sum_i a*_i a_i`` from ``N * 1`` on ``shape``."""
    if shape.N == 0:
        return 0.0
    total = np.zeros((shape.dim, shape.dim), dtype=complex)
    for i in range(shape.d):
        e = np.zeros(shape.d)
        e[i] = 1
        cols = [apply_annihilation(e, SymVector(shape, col)).amplitudes for col in np.eye(shape.dim)]
        total += creation_matrix(e, SpaceShape(shape.d, shape.N - 1)) @ np.array(cols).T
    return float(np.max(np.abs(total - shape.N * np.eye(shape.dim))))


# ---------------------------------------------------------------------------
# named families used by the command line


def parse_family(spec: str) -> tuple[str, dict[str, float]]:
    """Split ``"name:key=value:key=value"`` into the family name and parameters."""
    name, *parts = spec.strip().split(":")
    if name not in FAMILIES:
        raise ValueError(f"unknown state family {name!r}; expected one of {', '.join(FAMILIES)}")
    params = {}
    for part in parts:
        key, sep, value = part.partition("=")
        if not sep:
            raise ValueError(f"malformed family parameter {part!r}")
        params[key.strip()] = float(value)
    return name, params


def make_state(spec: str, d: int, N: int, seed: int = 0) -> MixedState:
    """Build a member of a named family.

    ``hartree`` uses ``u = e1``; ``hartree-sup`` superposes ``e1`` with
    ``(e1 + e2)/sqrt(2)``; ``random-mixed`` takes ``rank`` (default 2, capped
    at the dimension); ``bose-hubbard`` takes ``J`` and ``U`` (default 1, 1)
    and needs ``d = 2``.
    """
    name, params = parse_family(spec)
    shape = SpaceShape(d, N)
    e1 = np.zeros(d, dtype=complex)
    e1[0] = 1
    if name == "hartree":
        return hartree_state(e1, N)
    if name == "hartree-sup":
        if d < 2:
            raise ValueError("hartree-sup needs d >= 2")
        v = e1.copy()
        v[1] = 1
        return hartree_superposition(e1, v / np.sqrt(2), N)
    if name == "random-pure":
        return haar_random_pure(shape, seed)
    if name == "random-mixed":
        rank = min(int(params.get("rank", 2)), shape.dim)
        return random_mixed(shape, rank, seed)
    if name == "max-mixed":
        return maximally_mixed(shape)
    if d != 2:
        raise ValueError("bose-hubbard is a two-mode model (d = 2)")
    return bose_hubbard_ground_state(N, params.get("J", 1.0), params.get("U", 1.0))
