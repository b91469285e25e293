"""Recover a k-body operator from its Hartree expectations ``u -> <u^k, g u^k>``.

For ``u = z`` (not necessarily normalized)

    Q(z) = sum_{alpha, beta} k! / sqrt(alpha! beta!) g[alpha, beta] conj(z)^alpha z^beta,

a polynomial whose monomials are separated by a phase grid (which fixes
``beta - alpha``) and a radial grid (which fixes ``alpha`` within a phase
class). Both grids are exact for the known degree, so no derivatives are
approximated.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from itertools import product

import numpy as np

from .fock_core import SpaceShape, SymOperator, SymVector, apply_creation, as_one_body, hartree_vector

Evaluator = Callable[[np.ndarray], float]

RESIDUAL_TOL = 1e-8


class InconsistentEvaluatorError(ValueError):
    """The evaluator is not the Hartree expectation of any k-body operator."""


def hartree_evaluator(g: SymOperator) -> Evaluator:
    """Evaluator ``u -> <u^k, g u^k>`` for a known operator."""

    def Q(u):
        c = hartree_vector(u, g.shape.N).amplitudes
        return float(np.real(np.vdot(c, g.matrix @ c)))

    return Q


def _call(Q: Evaluator, u: np.ndarray) -> float:
    val = Q(u)
    if not np.isfinite(val):
        raise ValueError(f"evaluator returned a non-finite value at u={u}")
    return float(val)


# ---------------------------------------------------------------------------
# polarization along a line


def expansion_vector(u, v, k: int, j: int) -> SymVector:
    """Coefficient of ``t^j`` in ``(u + t v)^{(x)k}``: ``binom(k,j) sqrt((k-j)!/k!) a*(v)^j u^(k-j)``."""
    out = hartree_vector(u, k - j)
    for _ in range(j):
        out = apply_creation(v, out)
    scale = math.comb(k, j) * math.sqrt(math.factorial(k - j) / math.factorial(k))
    return SymVector(out.shape, scale * out.amplitudes)


def polarize(Q: Evaluator, u, v, k: int, bra: int = 1, ket: int = 1) -> complex:
    """Extract ``<S_bra, g S_ket>`` where ``S_j`` is the ``t^j`` term of ``(u + t v)^k``.

    ``Q(u + e^{i theta} t v) = sum_{i,j} e^{i (j - i) theta} t^(i+j) <S_i, g S_j>``:
    interpolation in real ``t`` at ``2k + 1`` nodes isolates the power
    ``i + j`` and a discrete Fourier transform over ``2k + 1`` phases
    isolates ``j - i``. The default ``bra = ket = 1`` gives
    ``k <v (x)_s u^(k-1), g v (x)_s u^(k-1)>`` (with ``v (x)_s Psi = a*(v) Psi``),
    which for ``k = 1`` is simply ``<v, g v>``.
    """
    u = as_one_body(u)
    v = as_one_body(v, u.shape[0])
    if not (0 <= bra <= k and 0 <= ket <= k):
        raise ValueError("expansion orders must lie in [0, k]")
    n = 2 * k + 1
    ts = np.linspace(-1.0, 1.0, n)
    thetas = 2 * np.pi * np.arange(n) / n
    vander = np.vander(ts, n, increasing=True)
    values = np.array([[_call(Q, u + np.exp(1j * th) * t * v) for t in ts] for th in thetas])
    # coefficient of t^p for each phase
    power_coeffs = np.linalg.solve(vander, values.T)  # (power, phase)
    row = power_coeffs[bra + ket]
    shift = ket - bra
    return complex(np.mean(row * np.exp(-1j * shift * thetas)))


# ---------------------------------------------------------------------------
# full reconstruction


def reconstruct(Q: Evaluator, d: int, k: int, check: bool = True, seed: int = 0) -> SymOperator:
    """Hermitian operator on ``(d, k)`` whose Hartree expectations equal ``Q``.

    Phases ``z_i = r_i w^(m_i)`` with ``w`` of order ``2k + 2`` and ``m_1 = 0``
    (``Q`` is invariant under a global phase); radii ``r_1 = 1`` and
    ``r_i^2`` on ``k + 1`` nodes in ``(0, 1]`` for ``i >= 2``. Only the upper
    triangle (in basis order) is solved for; the rest follows by Hermiticity.

    With ``check`` the result is validated against ``Q`` at random points and
    :class:`InconsistentEvaluatorError` is raised if the residual exceeds
    ``RESIDUAL_TOL`` times the scale of ``Q``.
    """
    shape = SpaceShape(d, k)
    basis = shape.basis
    D = shape.dim
    if k == 0:
        return SymOperator(shape, np.array([[_call(Q, np.ones(d) / math.sqrt(d))]], dtype=complex))
    order = 2 * k + 2
    assert order > 2 * k, "phase grid too coarse for the degree"
    omega = np.exp(2j * np.pi / order)
    x_nodes = np.arange(1, k + 2) / (k + 1)  # values of r_i^2
    r_nodes = np.sqrt(x_nodes)

    phase_grid = list(product(range(order), repeat=d - 1))
    radius_grid = list(product(range(k + 1), repeat=d - 1))
    values = np.empty((len(radius_grid), len(phase_grid)))
    for ri, rix in enumerate(radius_grid):
        radii = np.concatenate([[1.0], r_nodes[list(rix)]])
        for pi, ms in enumerate(phase_grid):
            z = radii * omega ** np.concatenate([[0], ms])
            values[ri, pi] = _call(Q, z)

    # Fourier over the phase torus: coefficient of w^(m . delta) for delta in (-k..k)^(d-1)
    ms = np.array(phase_grid, dtype=float).reshape(len(phase_grid), d - 1)
    vander = np.vander(x_nodes, k + 1, increasing=True)
    vinv = np.linalg.inv(vander)

    out = np.zeros((D, D), dtype=complex)
    for ia, alpha in enumerate(basis):
        for ib in range(ia, D):
            beta = basis[ib]
            delta = np.array(beta[1:]) - np.array(alpha[1:])
            fourier = values @ np.exp(-2j * np.pi * (ms @ delta) / order) / len(phase_grid)
            # fourier[radius] = sum over alpha' in the class of K[alpha', alpha' + delta] * r^(2 alpha' + delta)
            # divide out r^delta, then invert the tensor Vandermonde in r^2
            rfac = np.array([np.prod(r_nodes[list(rix)] ** delta) for rix in radius_grid])
            g = (fourier / rfac).reshape((k + 1,) * (d - 1))
            for axis in range(d - 1):
                g = np.moveaxis(np.tensordot(vinv, g, axes=(1, axis)), 0, axis)
            coeff = g[tuple(alpha[1:])]
            scale = math.sqrt(math.prod(math.factorial(x) for x in alpha)
                              * math.prod(math.factorial(x) for x in beta)) / math.factorial(k)
            out[ia, ib] = coeff * scale
    diag = np.real(np.diag(out))
    out = np.triu(out, 1)
    out = out + out.conj().T + np.diag(diag)
    result = SymOperator(shape, out)
    if check:
        _check_residual(Q, result, seed)
    return result


def _check_residual(Q: Evaluator, g: SymOperator, seed: int, count: int = 16) -> None:
    gen = np.random.default_rng(seed)
    fitted = hartree_evaluator(g)
    us = gen.standard_normal((count, g.shape.d)) + 1j * gen.standard_normal((count, g.shape.d))
    us /= np.linalg.norm(us, axis=1, keepdims=True)
    target = np.array([_call(Q, u) for u in us])
    got = np.array([fitted(u) for u in us])
    scale = max(1.0, float(np.max(np.abs(target))))
    resid = float(np.max(np.abs(target - got)))
    if resid > RESIDUAL_TOL * scale:
        raise InconsistentEvaluatorError(f"reconstruction residual {resid:.3e} exceeds tolerance")


def reconstruct_lstsq(Q: Evaluator, d: int, k: int, seed: int = 0, oversample: int = 2) -> SymOperator:
    """Least-squares cross-check: fit Hermitian unknowns to random unit Hartree evaluations."""
    shape = SpaceShape(d, k)
    D = shape.dim
    gen = np.random.default_rng(seed)
    m = oversample * D * D + 8
    us = gen.standard_normal((m, d)) + 1j * gen.standard_normal((m, d))
    us /= np.linalg.norm(us, axis=1, keepdims=True)
    rows = []
    for u in us:
        c = hartree_vector(u, k).amplitudes
        outer = np.outer(c.conj(), c)  # Q = sum_ab outer[a, b] g[a, b]
        feats = []
        for a in range(D):
            feats.append(outer[a, a].real)
            for b in range(a + 1, D):
                # g[a,b] = x + i y, g[b,a] = x - i y
                feats.append(2 * outer[a, b].real)
                feats.append(-2 * outer[a, b].imag)
        rows.append(feats)
    target = np.array([_call(Q, u) for u in us])
    sol, *_ = np.linalg.lstsq(np.array(rows), target, rcond=None)
    out = np.zeros((D, D), dtype=complex)
    pos = 0
    for a in range(D):
        out[a, a] = sol[pos]
        pos += 1
        for b in range(a + 1, D):
            out[a, b] = sol[pos] + 1j * sol[pos + 1]
            out[b, a] = np.conj(out[a, b])
            pos += 2
    return SymOperator(shape, out)


def random_hermitian(d: int, k: int, seed: int) -> SymOperator:
    """Random Hermitian operator on ``(d, k)`` with unit Frobenius norm."""
    shape = SpaceShape(d, k)
    gen = np.random.default_rng([seed, d, k])
    x = gen.standard_normal((shape.dim,) * 2) + 1j * gen.standard_normal((shape.dim,) * 2)
    h = (x + x.conj().T) / 2
    return SymOperator(shape, h / np.linalg.norm(h))
