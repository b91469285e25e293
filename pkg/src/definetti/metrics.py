"""Spectral helpers, trace distance and the trace-norm error bounds.

Trace distances use the undivided convention ``Tr|X - Y|``, so two states
are at most 2 apart. Rational bounds are available exactly through the
``*_exact`` variants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .fock_core import SymOperator, sym_dimension

HERMITIAN_TOL = 1e-10


def _as_array(X) -> np.ndarray:
    return X.matrix if isinstance(X, SymOperator) else np.asarray(X, dtype=complex)


def hermitian_eig(M) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and unitary eigenvectors of a Hermitian matrix."""
    M = _as_array(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    if np.max(np.abs(M - M.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise ValueError("matrix is not Hermitian")
    return np.linalg.eigh((M + M.conj().T) / 2)


def trace_norm(X) -> float:
    vals, _ = hermitian_eig(X)
    return float(np.sum(np.abs(vals)))


def trace_distance(X, Y) -> float:
    """``Tr|X - Y|`` for Hermitian ``X`` and ``Y`` of the same shape."""
    if isinstance(X, SymOperator) and isinstance(Y, SymOperator) and X.shape != Y.shape:
        raise ValueError(f"shape mismatch: {X.shape} vs {Y.shape}")
    a, b = _as_array(X), _as_array(Y)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return trace_norm(a - b)


# ---------------------------------------------------------------------------
# bounds


def _check_k(k: int, N: int) -> None:
    if k > N:
        raise ValueError(f"k={k} exceeds N={N}")


def bound_eq26_exact(d: int, k: int, N: int) -> Fraction:
    """``2`` if ``N <= 2kd`` else ``2kd / (N - kd)``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    _check_k(k, N)
    if N <= 2 * k * d:
        return Fraction(2)
    return Fraction(2 * k * d, N - k * d)


def bound_eq26(d: int, k: int, N: int) -> float:
    return float(bound_eq26_exact(d, k, N))


def bound_eq27_exact(d: int, k: int, N: int) -> Fraction:
    if k < 1 or N < 1:
        raise ValueError("k and N must be at least 1")
    return Fraction(4 * k * d, N)


def bound_eq27(d: int, k: int, N: int) -> float:
    return float(bound_eq27_exact(d, k, N))


def c_constant_exact(d: int, k: int, N: int) -> Fraction:
    """``(N+d-1)! / (N+k+d-1)! * N! / (N-k)!``, computed as a product and checked."""
    _check_k(k, N)
    prod = Fraction(1)
    for j in range(k):
        prod *= Fraction(N - j, N + j + d)
    ratio = Fraction(math.factorial(N + d - 1) * math.factorial(N),
                     math.factorial(N + k + d - 1) * math.factorial(N - k))
    if prod != ratio:
        raise ArithmeticError("product and factorial forms of C(d, k, N) disagree")
    return prod


def c_constant(d: int, k: int, N: int) -> float:
    return float(c_constant_exact(d, k, N))


def bound_eq210_exact(d: int, k: int, N: int) -> Fraction:
    if k < 1 or N < 1:
        raise ValueError("k and N must be at least 1")
    return Fraction(2 * k * (d + 2 * k), N)


def bound_eq210(d: int, k: int, N: int) -> float:
    return float(bound_eq210_exact(d, k, N))


def bound_two_one_minus_c_exact(d: int, k: int, N: int) -> Fraction:
    """Intermediate bound ``2 (1 - C(d, k, N))``."""
    return 2 * (1 - c_constant_exact(d, k, N))


def bound_two_one_minus_c(d: int, k: int, N: int) -> float:
    return float(bound_two_one_minus_c_exact(d, k, N))


def bernoulli_middle_exact(d: int, k: int, N: int) -> Fraction:
    """Middle link ``2k (2k + d - 2) / (N + d + k - 1)`` of the chain to the last bound."""
    return Fraction(2 * k * (2 * k + d - 2), N + d + k - 1)


@dataclass(frozen=True)
class DimensionRatio:
    ratio: Fraction
    bernoulli_ok: bool
    eq33_bound: float


def dimension_ratio_bounds(d: int, k: int, N: int) -> DimensionRatio:
    """``dim(N-k)/dim(N)``, the check ``ratio >= 1 - dk/N`` and ``2 (dim(N)/dim(N-k) - 1)``."""
    _check_k(k, N)
    ratio = Fraction(sym_dimension(d, N - k), sym_dimension(d, N))
    ok = ratio >= 1 - Fraction(d * k, N) if N > 0 else True
    return DimensionRatio(ratio, ok, float(2 * (1 / ratio - 1)))


def eq33_bound(d: int, k: int, N: int) -> float:
    return dimension_ratio_bounds(d, k, N).eq33_bound


def sharp_rate(d: int, k: int, N: int) -> float:
    """``2kd/N``, the sharper rate quoted without proof; informational only."""
    return 2 * k * d / N


@dataclass
class BoundReport:
    d: int
    N: int
    k: int
    trace_distance: float
    bound_eq26: float
    bound_eq27: float
    bound_2_1_minus_C: float
    bound_eq210: float
    C_dkN: float
    eq33_bound: float
    satisfied: dict[str, bool] = field(default_factory=dict)

    @property
    def all_satisfied(self) -> bool:
        return all(self.satisfied.values())


def bound_report(d: int, k: int, N: int, distance: float, tol: float = 1e-10) -> BoundReport:
    """Evaluate every bound at ``(d, k, N)`` and compare with a measured distance."""
    if distance < 0:
        raise ValueError("trace distance must be non-negative")
    b26, b27 = bound_eq26(d, k, N), bound_eq27(d, k, N)
    b1c, b210 = bound_two_one_minus_c(d, k, N), bound_eq210(d, k, N)
    b33 = eq33_bound(d, k, N)
    satisfied = {
        "bound_eq26": distance <= b26 + tol,
        "bound_eq27": distance <= b27 + tol,
        "bound_2_1_minus_C": distance <= b1c + tol,
        "bound_eq210": distance <= b210 + tol,
        "eq33_bound": distance <= b33 + tol,
        "trivial": distance <= 2 + tol,
    }
    return BoundReport(d, N, k, distance, b26, b27, b1c, b210, c_constant(d, k, N), b33, satisfied)
