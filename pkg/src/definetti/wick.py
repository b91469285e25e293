"""Exact single-mode CCR algebra: normal ordering and Laguerre coefficients.

Polynomials in ``a*`` and ``a`` are kept in normal order as a mapping
``(p, q) -> c`` meaning ``sum c * a*^p a^q``, with Python integers
throughout and zero coefficients dropped.
"""

from __future__ import annotations

import math
import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

MAX_WORD = 40

A = "a"
ADAG = "a*"


@dataclass(frozen=True)
class NormalForm:
    """``sum_k coeffs[k] * a*^k a^k``."""

    coeffs: tuple[int, ...]

    def as_poly(self) -> dict[tuple[int, int], int]:
        return {(k, k): c for k, c in enumerate(self.coeffs) if c}


@dataclass(frozen=True)
class LaguerrePoly:
    """Polynomial with exact rational coefficients in ascending powers of x."""

    coeffs: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other: LaguerrePoly) -> LaguerrePoly:
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return LaguerrePoly(tuple(x + y for x, y in zip(a, b)))

    def scale(self, c) -> LaguerrePoly:
        return LaguerrePoly(tuple(Fraction(c) * x for x in self.coeffs))

    def times_x(self) -> LaguerrePoly:
        return LaguerrePoly((Fraction(0),) + self.coeffs)

    def trimmed(self) -> tuple[Fraction, ...]:
        out = list(self.coeffs)
        while len(out) > 1 and out[-1] == 0:
            out.pop()
        return tuple(out)

    def __call__(self, x):
        return sum(c * x**i for i, c in enumerate(self.coeffs))


def wick_coefficients(n: int) -> NormalForm:
    """``c_{n,k} = binom(n, k) n! / k!`` so that ``a^n a*^n = sum_k c_{n,k} a*^k a^k``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return NormalForm(tuple(math.comb(n, k) * math.factorial(n) // math.factorial(k) for k in range(n + 1)))


def laguerre(n: int) -> LaguerrePoly:
    """``L_n(x) = sum_k binom(n, k) (-1)^k x^k / k!``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return LaguerrePoly(tuple(Fraction(math.comb(n, k) * (-1) ** k, math.factorial(k)) for k in range(n + 1)))


def modified_laguerre(n: int) -> LaguerrePoly:
    """``n! L_n(-x)``."""
    L = laguerre(n)
    return LaguerrePoly(tuple(math.factorial(n) * c * (-1) ** k for k, c in enumerate(L.coeffs)))


# ---------------------------------------------------------------------------
# normal ordering


def parse_word(word) -> tuple[str, ...]:
    """Accept ``"a a* a"`` or a sequence of ``"a"`` / ``"a*"`` tokens."""
    tokens = tuple(word.split()) if isinstance(word, str) else tuple(word)
    for t in tokens:
        if t not in (A, ADAG):
            raise ValueError(f"unknown letter {t!r}; words are made of 'a' and 'a*'")
    return tokens


def _canonical(poly) -> dict[tuple[int, int], int]:
    return {key: c for key, c in sorted(poly.items()) if c}


def normal_order(word, strategy: str = "multiply", seed: int | None = None) -> dict[tuple[int, int], int]:
    """Normal-ordered form of a word in ``a`` and ``a*``.

    ``strategy="multiply"`` folds the word left to right using
    ``a^q a* = a* a^q + q a^(q-1)``. ``"leftmost"``, ``"rightmost"`` and
    ``"random"`` instead rewrite one adjacent ``a a*`` pair at a time with
    ``a a* -> a* a + 1`` until none remain; all strategies must agree.
    """
    tokens = parse_word(word)
    if len(tokens) > MAX_WORD:
        raise ValueError(f"word length {len(tokens)} exceeds {MAX_WORD}")
    if strategy == "multiply":
        poly = {(0, 0): 1}
        for t in tokens:
            poly = _times_letter(poly, t)
        return _canonical(poly)
    if strategy not in ("leftmost", "rightmost", "random"):
        raise ValueError(f"unknown strategy {strategy!r}")
    return _rewrite(tokens, strategy, random.Random(seed))


def _times_letter(poly, letter: str):
    out = defaultdict(int)
    for (p, q), c in poly.items():
        if letter == A:
            out[(p, q + 1)] += c
        else:
            out[(p + 1, q)] += c
            if q:
                out[(p, q - 1)] += q * c
    return out


def _rewrite(tokens, strategy: str, rnd: random.Random):
    pending = {tokens: 1}
    done = defaultdict(int)
    while pending:
        nxt = defaultdict(int)
        for w, c in pending.items():
            spots = [i for i in range(len(w) - 1) if w[i] == A and w[i + 1] == ADAG]
            if not spots:
                p = w.count(ADAG)
                done[(p, len(w) - p)] += c
                continue
            i = spots[0] if strategy == "leftmost" else spots[-1] if strategy == "rightmost" else rnd.choice(spots)
            nxt[w[:i] + (ADAG, A) + w[i + 2:]] += c
            nxt[w[:i] + w[i + 2:]] += c
        pending = nxt
    return _canonical(done)


def poly_combine(*terms) -> dict[tuple[int, int], int]:
    """Linear combination of normal-ordered polynomials given as ``(coef, poly)`` pairs."""
    out = defaultdict(int)
    for coef, poly in terms:
        for key, c in poly.items():
            out[key] += coef * c
    return _canonical(out)


def sandwich(poly) -> dict[tuple[int, int], int]:
    """``a* P a`` for a normal-ordered ``P``; stays normal-ordered."""
    return _canonical({(p + 1, q + 1): c for (p, q), c in poly.items()})


def word_power(n: int, m: int) -> tuple[str, ...]:
    """The word ``a^n a*^m``."""
    return (A,) * n + (ADAG,) * m


# ---------------------------------------------------------------------------
# verification


@dataclass
class RecurrenceReport:
    n_max: int
    laguerre_ok: dict[int, bool]
    modified_ok: dict[int, bool]
    operator_ok: dict[int, bool]
    wick_ok: dict[int, bool]

    @property
    def all_passed(self) -> bool:
        return all(all(d.values()) for d in (self.laguerre_ok, self.modified_ok, self.operator_ok, self.wick_ok))


def verify_recurrences(n_max: int) -> RecurrenceReport:
    """Check the Laguerre three-term relations and the operator recursion exactly.

    For each ``1 <= n < n_max``:

    * ``(n+1) L_{n+1} = (2n+1) L_n - x L_n - n L_{n-1}``
    * ``Lt_{n+1} = (2n+1) Lt_n + x Lt_n - n^2 Lt_{n-1}``
    * ``a^{n+1} a*^{n+1} = a* (a^n a*^n) a + (2n+1) a^n a*^n - n^2 a^{n-1} a*^{n-1}``
      with every word normal-ordered independently.

    ``wick_ok[n]`` records that ``a^n a*^n`` normal-orders to
    :func:`wick_coefficients` for ``0 <= n <= n_max``.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    lag, mod, op, wk = {}, {}, {}, {}
    for n in range(1, n_max):
        lhs = laguerre(n + 1).scale(n + 1)
        rhs = laguerre(n).scale(2 * n + 1) + laguerre(n).times_x().scale(-1) + laguerre(n - 1).scale(-n)
        lag[n] = lhs.trimmed() == rhs.trimmed()
        rhs_mod = (modified_laguerre(n).scale(2 * n + 1) + modified_laguerre(n).times_x()
                   + modified_laguerre(n - 1).scale(-n * n))
        mod[n] = modified_laguerre(n + 1).trimmed() == rhs_mod.trimmed()
        if 2 * (n + 1) <= MAX_WORD:
            cur = normal_order(word_power(n, n))
            prev = normal_order(word_power(n - 1, n - 1))
            op[n] = normal_order(word_power(n + 1, n + 1)) == poly_combine(
                (1, sandwich(cur)), (2 * n + 1, cur), (-n * n, prev))
    for n in range(0, n_max + 1):
        if 2 * n <= MAX_WORD:
            wk[n] = normal_order(word_power(n, n)) == wick_coefficients(n).as_poly()
    return RecurrenceReport(n_max, lag, mod, op, wk)


def ladder_matrices(M: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncated single-mode ``a`` and ``a*`` on levels ``0..M``."""
    a = np.diag(np.sqrt(np.arange(1, M + 1, dtype=float)), k=1)
    return a, a.T.copy()


def _integer_ladders(M: int) -> tuple[np.ndarray, np.ndarray]:
    """``S^-1 a S`` and ``S^-1 a* S`` with ``S = diag(sqrt(m!))``.

    In these coordinates ``a|m> = m|m-1>`` and ``a*|m> = |m+1>``: integer
    matrices, so products stay exact.
    """
    a = np.zeros((M + 1, M + 1), dtype=object)
    ad = np.zeros((M + 1, M + 1), dtype=object)
    for m in range(1, M + 1):
        a[m - 1, m] = m
        ad[m, m - 1] = 1
    return a, ad


def _mpow(x: np.ndarray, n: int) -> np.ndarray:
    out = np.eye(x.shape[0], dtype=x.dtype)
    if x.dtype == object:
        out = np.array([[int(i == j) for j in range(x.shape[0])] for i in range(x.shape[0])], dtype=object)
    for _ in range(n):
        out = out @ x
    return out


def truncated_fock_check(n: int, M: int, exact: bool = True) -> float:
    """Max deviation between ``a^n a*^n`` and ``sum_k c_{n,k} a*^k a^k`` on levels ``0..M-n``.

    With ``exact=True`` the check runs on the factorial-rescaled integer
    ladders, a similarity transform of the truncated matrices that leaves the
    identity unchanged and gives an exact answer. ``exact=False`` uses the
    floating ``sqrt(m)`` matrices and reports the deviation relative to the
    largest entry of the block.
    """
    if n >= M:
        raise ValueError(f"need n < M, got n={n}, M={M}")
    if M > 200:
        raise ValueError("cutoff M limited to 200")
    c = wick_coefficients(n).coeffs
    if exact:
        a, ad = _integer_ladders(M)
    else:
        a, ad = ladder_matrices(M)
    lhs = _mpow(a, n) @ _mpow(ad, n)
    rhs = sum(ck * (_mpow(ad, k) @ _mpow(a, k)) for k, ck in enumerate(c))
    keep = slice(0, M - n + 1)
    diff = lhs[keep, keep] - rhs[keep, keep]
    if exact:
        return float(max(abs(int(x)) for x in diff.ravel()))
    scale = max(1.0, float(np.max(np.abs(lhs[keep, keep]))))
    return float(np.max(np.abs(diff))) / scale
