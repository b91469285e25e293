"""Lower-symbol de Finetti construction and its three evaluation routes.

``gamma_tilde^(k) = dim(d, N) * int <u^N, G u^N> |u^k><u^k| du`` is computed

* in closed form from the reduced density matrices of ``G``
  (:func:`definetti_rdm_formula`),
* exactly, term by term, from Haar moments of the sphere
  (:func:`definetti_rdm_oracle`),
* by Monte Carlo over Haar samples (:func:`definetti_rdm_mc`).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import rng as _rng
from .fock_core import (
    SpaceShape,
    SymOperator,
    as_one_body,
    hartree_amplitudes,
    sym_dimension,
    sym_tensor_op,
)
from .rdm import reduce
from .states import NORM_TOL, MixedState

SCHUR_LIMIT = 10**4
ORACLE_LIMIT = 10**8
PROJECTOR_LIMIT = 10**5


@dataclass(frozen=True)
class MomentIndexPair:
    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise ValueError("multi-indices must have the same length")
        if min(self.a + self.b, default=0) < 0:
            raise ValueError("multi-index entries must be non-negative")


@dataclass(frozen=True, eq=False)
class McEstimate:
    mean: SymOperator
    stderr: np.ndarray
    samples: int


def worker_count() -> int:
    raw = os.environ.get("DEFINETTI_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


# ---------------------------------------------------------------------------
# Haar sphere


def haar_sample(d: int, seed: int, index: int) -> np.ndarray:
    """Haar-random unit vector number ``index`` of the stream ``seed``."""
    block, row = divmod(index, _rng.HAAR_BLOCK)
    return _rng.haar_block(d, seed, block)[row].copy()


def haar_samples(d: int, seed: int, count: int) -> np.ndarray:
    """The first ``count`` vectors of the stream, shape ``(count, d)``."""
    nblocks = -(-count // _rng.HAAR_BLOCK)
    return np.concatenate([_rng.haar_block(d, seed, b) for b in range(nblocks)])[:count]


@lru_cache(maxsize=None)
def _monomial_integral(a: tuple[int, ...], b: tuple[int, ...]) -> Fraction:
    if a != b:
        return Fraction(0)
    d = len(a)
    num = math.factorial(d - 1) * math.prod(math.factorial(x) for x in a)
    return Fraction(num, math.factorial(sum(a) + d - 1))


def haar_monomial_integral(d: int, pair: MomentIndexPair) -> Fraction:
    """Exact ``int prod_i u_i^a_i conj(u_i)^b_i du`` over the normalized Haar measure.

    Zero unless ``a == b``; otherwise ``(d-1)! prod a_i! / (|a| + d - 1)!``.
    Use ``float()`` on the result for the real value.
    """
    if len(pair.a) != d:
        raise ValueError(f"multi-index length {len(pair.a)} does not match d={d}")
    return _monomial_integral(tuple(pair.a), tuple(pair.b))


def _fraction_sqrt(x: Fraction) -> Fraction | float:
    rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return math.sqrt(x)


def _multinomial(alpha) -> int:
    return math.factorial(sum(alpha)) // math.prod(math.factorial(x) for x in alpha)


def schur_identity_check(d: int, N: int, exact: bool = True) -> Fraction | float:
    """Max deviation of ``dim(d, N) int |u^N><u^N| du`` from the identity.

    The exact path works in rationals and returns a :class:`Fraction`; the
    floating path multiplies ``sqrt`` of the multinomials as the Hartree
    coefficients do and returns a float.
    """
    shape = SpaceShape(d, N)
    D = shape.dim
    if D > SCHUR_LIMIT:
        raise ValueError(f"dimension {D} exceeds {SCHUR_LIMIT}")
    basis = shape.basis
    if exact:
        # entries squared are rational: (D m)^2 mult(alpha) mult(beta)
        worst_sq = Fraction(0)
        for i, alpha in enumerate(basis):
            for j, beta in enumerate(basis):
                moment = _monomial_integral(alpha, beta)
                if i == j:
                    dev_sq = (D * _multinomial(alpha) * moment - 1) ** 2
                else:
                    dev_sq = (D * moment) ** 2 * _multinomial(alpha) * _multinomial(beta)
                worst_sq = max(worst_sq, dev_sq)
        return _fraction_sqrt(worst_sq)
    roots = np.sqrt([float(_multinomial(a)) for a in basis])
    mat = np.zeros((D, D))
    for i, alpha in enumerate(basis):
        for j, beta in enumerate(basis):
            m = _monomial_integral(alpha, beta)
            if m:
                mat[i, j] = D * roots[i] * roots[j] * float(m)
    return float(np.max(np.abs(mat - np.eye(D))))


# ---------------------------------------------------------------------------
# lower symbol


def lower_symbol_density(G: SymOperator, u) -> float:
    """Density ``dim(d, N) <u^N, G u^N>`` of the lower-symbol measure."""
    u = as_one_body(u, G.shape.d)
    if abs(np.linalg.norm(u) - 1) > NORM_TOL:
        raise ValueError("lower symbol is evaluated on unit vectors only")
    return float(lower_symbol_densities(G, u[None, :])[0])


def lower_symbol_densities(G: SymOperator, us: np.ndarray) -> np.ndarray:
    c = hartree_amplitudes(us, G.shape.N)
    vals = np.real(np.einsum("bi,ij,bj->b", c.conj(), G.matrix, c))
    return G.shape.dim * vals


def lower_symbol_mass(G: SymOperator) -> complex:
    """Exact-moment integral of the lower-symbol density over the sphere."""
    shape = G.shape
    total = 0j
    for i, alpha in enumerate(shape.basis):
        # only alpha == beta survives the phase average
        total += G.matrix[i, i] * float(shape.dim * _multinomial(alpha) * _monomial_integral(alpha, alpha))
    return total


# ---------------------------------------------------------------------------
# gamma tilde: closed form


def formula_weight(d: int, N: int, k: int, l: int) -> Fraction:
    """Coefficient ``binom(N, l) / binom(N + k + d - 1, k)`` of the l-body term."""
    return Fraction(math.comb(N, l), math.comb(N + k + d - 1, k))


def definetti_rdm_formula(G: SymOperator, k: int) -> MixedState:
    """``gamma_tilde^(k)`` as a combination of ``gamma^(l) (x)_s 1`` for ``l <= k``."""
    d, N = G.shape.d, G.shape.N
    if not 0 <= k <= N:
        raise ValueError(f"k must lie in [0, N={N}], got {k}")
    out = np.zeros((sym_dimension(d, k),) * 2, dtype=complex)
    for l in range(k + 1):
        term = sym_tensor_op(reduce(G, l), k)
        out += float(formula_weight(d, N, k, l)) * term.matrix
    return MixedState(SpaceShape(d, k), out)


# ---------------------------------------------------------------------------
# gamma tilde: exact moment oracle


@lru_cache(maxsize=64)
def _oracle_terms(d: int, N: int, k: int):
    """Sparse tensor ``T[a, b, g, h]`` with ``gamma_tilde[a, b] = sum T * G[g, h]``."""
    big, small = SpaceShape(d, N), SpaceShape(d, k)
    D = big.dim
    fN, fk = math.factorial(N), math.factorial(k)
    fact = {}

    def ff(alpha):
        if alpha not in fact:
            fact[alpha] = math.prod(math.factorial(x) for x in alpha)
        return fact[alpha]

    rows, cols, gs, hs, coefs = [], [], [], [], []
    index = {g: i for i, g in enumerate(big.basis)}
    for ia, alpha in enumerate(small.basis):
        for ib, beta in enumerate(small.basis):
            for ig, gam in enumerate(big.basis):
                # monomial conj(u)^(gam + beta) u^(delta + alpha) needs delta = gam + beta - alpha
                delta = tuple(g + b - a for g, b, a in zip(gam, beta, alpha))
                if min(delta) < 0:
                    continue
                moment = _monomial_integral(tuple(x + y for x, y in zip(delta, alpha)),
                                            tuple(x + y for x, y in zip(gam, beta)))
                coef_sq = (D * moment) ** 2 * Fraction(fN * fN * fk * fk, ff(gam) * ff(delta) * ff(alpha) * ff(beta))
                rows.append(ia)
                cols.append(ib)
                gs.append(ig)
                hs.append(index[delta])
                coefs.append(math.sqrt(coef_sq))
    return (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64),
            np.array(gs, dtype=np.int64), np.array(hs, dtype=np.int64), np.array(coefs))


def definetti_rdm_oracle(G: SymOperator, k: int) -> MixedState:
    """``gamma_tilde^(k)`` integrated entry by entry with exact Haar moments."""
    d, N = G.shape.d, G.shape.N
    if not 0 <= k <= N:
        raise ValueError(f"k must lie in [0, N={N}], got {k}")
    Dk = sym_dimension(d, k)
    if (G.shape.dim * Dk) ** 2 > ORACLE_LIMIT:
        raise ValueError("moment oracle size guard exceeded")
    rows, cols, gs, hs, coefs = _oracle_terms(d, N, k)
    out = np.zeros(Dk * Dk, dtype=complex)
    np.add.at(out, rows * Dk + cols, coefs * G.matrix[gs, hs])
    return MixedState(SpaceShape(d, k), out.reshape(Dk, Dk))


# ---------------------------------------------------------------------------
# gamma tilde: Monte Carlo


def _mc_block(G: SymOperator, k: int, seed: int, block: int, count: int):
    us = _rng.haar_block(G.shape.d, seed, block)[:count]
    weights = lower_symbol_densities(G, us)
    c = hartree_amplitudes(us, k)
    x = weights[:, None, None] * c[:, :, None] * c[:, None, :].conj()
    return x.sum(axis=0), (np.abs(x) ** 2).sum(axis=0)


def definetti_rdm_mc(G: SymOperator, k: int, samples: int, seed: int, workers: int | None = None) -> McEstimate:
    """Monte Carlo estimate of ``gamma_tilde^(k)`` with entrywise standard errors.

    Samples come in fixed blocks addressed by ``(seed, block)`` and block sums
    are reduced in block order, so the result is identical for any number of
    workers.
    """
    if samples < 2:
        raise ValueError("need at least two samples for a standard error")
    if not 0 <= k <= G.shape.N:
        raise ValueError(f"k must lie in [0, N={G.shape.N}], got {k}")
    B = _rng.HAAR_BLOCK
    jobs = [(b, min(B, samples - b * B)) for b in range(-(-samples // B))]
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _mc_block(G, k, seed, *job), jobs))
    else:
        parts = [_mc_block(G, k, seed, *job) for job in jobs]
    s1 = np.zeros_like(parts[0][0])
    s2 = np.zeros_like(parts[0][1])
    for p1, p2 in parts:
        s1 += p1
        s2 += p2
    mean = s1 / samples
    var = np.maximum(s2 / samples - np.abs(mean) ** 2, 0.0) * samples / (samples - 1)
    return McEstimate(SymOperator(SpaceShape(G.shape.d, k), mean), np.sqrt(var / samples), samples)


# ---------------------------------------------------------------------------
# projector integral used in the trace-norm estimate


def projector_integral(d: int, N: int, k: int) -> np.ndarray:
    """``int (1_k - P_u^k) (x) P_u^(N-k) du`` compressed to the symmetric space.

    Each symmetric basis vector is split in the full tensor space into
    a head word over the first k factors and a symmetric tail over the rest.
    The tail block ``int P_u^(N-k) du`` and ``int P_u^N du`` are both
    assembled from exact monomial moments.
    """
    if not 0 <= k <= N:
        raise ValueError(f"k must lie in [0, N={N}], got {k}")
    if d**N > PROJECTOR_LIMIT:
        raise ValueError(f"d^N = {d**N} exceeds {PROJECTOR_LIMIT}")
    big = SpaceShape(d, N)
    tail_shape = SpaceShape(d, N - k)
    D = big.dim
    tail_index = {t: i for i, t in enumerate(tail_shape.basis)}

    # tail moment matrix in symmetric tail coordinates:
    # <s_g| int P_u^(N-k) |s_h> = sqrt(mult(g) mult(h)) * int conj(u)^g u^h
    Dt = tail_shape.dim
    tail_moment = np.zeros((Dt, Dt))
    for i, g in enumerate(tail_shape.basis):
        for j, h in enumerate(tail_shape.basis):
            m = _monomial_integral(h, g)
            if m:
                tail_moment[i, j] = math.sqrt(_multinomial(g) * _multinomial(h)) * float(m)

    # e_alpha = sum_p |p> (x) coef * |s_(alpha - counts(p))>; head words p with
    # equal counts contribute identically, so sum over counts with multiplicity
    head_shape = SpaceShape(d, k)
    coef = np.zeros((D, head_shape.dim, Dt))
    for a, alpha in enumerate(big.basis):
        for p, pc in enumerate(head_shape.basis):
            rest = tuple(x - y for x, y in zip(alpha, pc))
            if min(rest) < 0:
                continue
            coef[a, p, tail_index[rest]] = math.sqrt(_multinomial(rest) / _multinomial(alpha))
    mult = np.array([_multinomial(pc) for pc in head_shape.basis], dtype=float)
    first = np.einsum("apg,gh,bph,p->ab", coef, tail_moment, coef, mult, optimize=True)

    second = np.zeros((D, D))
    for i, g in enumerate(big.basis):
        for j, h in enumerate(big.basis):
            m = _monomial_integral(h, g)
            if m:
                second[i, j] = math.sqrt(_multinomial(g) * _multinomial(h)) * float(m)
    return first - second


def projector_integral_check(d: int, N: int, k: int) -> float:
    """Max deviation of :func:`projector_integral` from ``(1/dim_{N-k} - 1/dim_N) * 1``."""
    target = 1 / sym_dimension(d, N - k) - 1 / sym_dimension(d, N)
    mat = projector_integral(d, N, k)
    return float(np.max(np.abs(mat - target * np.eye(mat.shape[0]))))
