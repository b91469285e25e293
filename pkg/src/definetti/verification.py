"""Invariant suites behind ``definetti verify``."""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import ckmr, fock_core, metrics, rdm, states, tomography, wick
from .fock_core import SpaceShape, SymVector

LEVELS = {"quick": {"d_max": 2, "N_max": 6}, "full": {"d_max": 3, "N_max": 10}}


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def expect(self, cond: bool, what: str) -> None:
        self.checks += 1
        if not cond:
            self.failures.append(what)


def _grid(d_max: int, N_max: int):
    for d in range(1, d_max + 1):
        for N in range(0, N_max + 1):
            yield d, N


def _family_states(d: int, N: int, seed: int = 11):
    fams = ["hartree", "random-pure", "random-mixed", "max-mixed"]
    if d >= 2:
        fams.append("hartree-sup")
    if d == 2 and N >= 1:
        fams.append("bose-hubbard")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", states.DegenerateGroundStateWarning)
        for fam in fams:
            yield fam, states.make_state(fam, d, N, seed)


def suite_fock(d_max: int, N_max: int) -> SuiteResult:
    res = SuiteResult("fock_core")
    gen = np.random.default_rng(1)
    for d, N in _grid(d_max, N_max):
        shape = SpaceShape(d, N)
        res.expect(len(fock_core.enumerate_basis(shape)) == fock_core.sym_dimension(d, N), f"basis size d={d} N={N}")
        f = gen.standard_normal(d) + 1j * gen.standard_normal(d)
        g = gen.standard_normal(d) + 1j * gen.standard_normal(d)
        f, g = f / np.linalg.norm(f), g / np.linalg.norm(g)
        for col in np.eye(shape.dim):
            v = SymVector(shape, col)
            lhs = fock_core.apply_annihilation(f, fock_core.apply_creation(g, v)).amplitudes
            if N > 0:
                lhs = lhs - fock_core.apply_creation(g, fock_core.apply_annihilation(f, v)).amplitudes
            res.expect(np.max(np.abs(lhs - np.vdot(f, g) * col)) <= 1e-12, f"CCR d={d} N={N}")
        res.expect(states.number_operator_check(shape) <= 1e-12, f"number operator d={d} N={N}")
        u = gen.standard_normal(d) + 1j * gen.standard_normal(d)
        u /= np.linalg.norm(u)
        h = fock_core.hartree_vector(u, N)
        res.expect(abs(h.norm() - 1) <= 1e-12, f"Hartree norm d={d} N={N}")
        if d**N <= 10**4:
            kron = np.ones(1, dtype=complex)
            for _ in range(N):
                kron = np.kron(kron, u)
            res.expect(np.max(np.abs(fock_core.embed_full(h) - kron)) <= 1e-12, f"embedding d={d} N={N}")
    return res


def suite_rdm(d_max: int, N_max: int) -> SuiteResult:
    res = SuiteResult("rdm")
    for d, N in _grid(d_max, N_max):
        if N == 0:
            continue
        for fam, G in _family_states(d, N):
            for k in range(0, N + 1):
                g = rdm.reduce(G, k)
                if k < N:
                    step = rdm.partial_trace_step(rdm.reduce(G, k + 1))
                    res.expect(np.max(np.abs(step.matrix - g.matrix)) <= 1e-12, f"consistency {fam} d={d} N={N} k={k}")
                if d**N <= 10**4:
                    o = rdm.reduce_oracle(G, k)
                    res.expect(np.max(np.abs(o.matrix - g.matrix)) <= 1e-12, f"oracle {fam} d={d} N={N} k={k}")
                res.expect(g.min_eigenvalue() >= -1e-10, f"PSD {fam} d={d} N={N} k={k}")
    return res


def suite_ckmr(d_max: int, N_max: int) -> SuiteResult:
    res = SuiteResult("ckmr")
    for d, N in _grid(d_max, N_max):
        if N == 0:
            continue
        if fock_core.sym_dimension(d, N) <= 200:
            res.expect(ckmr.schur_identity_check(d, N) == 0, f"Schur exact d={d} N={N}")
        for k in range(0, N + 1):
            if d**N <= 10**4:
                res.expect(ckmr.projector_integral_check(d, N, k) <= 1e-12, f"projector integral d={d} N={N} k={k}")
        for fam, G in _family_states(d, N):
            for k in range(0, min(N, 3) + 1):
                f = ckmr.definetti_rdm_formula(G, k)
                o = ckmr.definetti_rdm_oracle(G, k)
                res.expect(np.max(np.abs(f.matrix - o.matrix)) <= 1e-10, f"formula vs oracle {fam} d={d} N={N} k={k}")
                res.expect(f.min_eigenvalue() >= -1e-10, f"positivity {fam} d={d} N={N} k={k}")
                C = metrics.c_constant(d, k, N)
                B = f.matrix - C * rdm.reduce(G, k).matrix
                res.expect(np.linalg.eigvalsh(B)[0] >= -1e-10, f"B >= 0 {fam} d={d} N={N} k={k}")
                res.expect(abs(np.trace(B).real - (1 - C)) <= 1e-12, f"Tr B {fam} d={d} N={N} k={k}")
    return res


def suite_bounds(d_max: int, N_max: int) -> SuiteResult:
    res = SuiteResult("bounds")
    for d, N in _grid(d_max, N_max):
        for k in range(1, min(N, 3) + 1):
            res.expect(metrics.bound_two_one_minus_c_exact(d, k, N) <= metrics.bernoulli_middle_exact(d, k, N)
                       <= metrics.bound_eq210_exact(d, k, N), f"bound chain d={d} N={N} k={k}")
            if N > 2 * k * d:
                res.expect(metrics.bound_eq26_exact(d, k, N) <= metrics.bound_eq27_exact(d, k, N), f"eq26<=eq27 d={d} N={N} k={k}")
            res.expect(metrics.dimension_ratio_bounds(d, k, N).bernoulli_ok, f"Bernoulli d={d} N={N} k={k}")
            for fam, G in _family_states(d, N):
                dist = metrics.trace_distance(rdm.reduce(G, k), ckmr.definetti_rdm_formula(G, k))
                rep = metrics.bound_report(d, k, N, dist)
                res.expect(rep.all_satisfied, f"bounds {fam} d={d} N={N} k={k}: {rep.satisfied}")
    return res


def suite_wick(n_max: int) -> SuiteResult:
    res = SuiteResult("wick")
    rep = wick.verify_recurrences(n_max)
    res.expect(rep.all_passed, f"recurrences up to {n_max}")
    for n in range(0, 21):
        lt = wick.modified_laguerre(n).coeffs
        res.expect(tuple(lt) == wick.wick_coefficients(n).coeffs, f"modified Laguerre n={n}")
    for n in range(1, 7):
        res.expect(wick.truncated_fock_check(n, 60) <= 1e-9, f"truncated Fock n={n}")
    return res


def suite_tomography(d_max: int, k_max: int = 3, count: int = 5) -> SuiteResult:
    res = SuiteResult("tomography")
    for d in range(1, d_max + 1):
        for k in range(1, k_max + 1):
            for s in range(count):
                g = tomography.random_hermitian(d, k, s)
                r = tomography.reconstruct(tomography.hartree_evaluator(g), d, k)
                res.expect(metrics.trace_distance(r, g) <= 1e-8, f"round trip d={d} k={k} seed={s}")
    return res


def run_suites(level: str = "quick") -> list[SuiteResult]:
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}")
    p = LEVELS[level]
    d_max, N_max = p["d_max"], p["N_max"]
    plan = [
        ("fock_core", lambda: suite_fock(d_max, N_max)),
        ("rdm", lambda: suite_rdm(d_max, N_max)),
        ("ckmr", lambda: suite_ckmr(d_max, N_max)),
        ("bounds", lambda: suite_bounds(d_max, N_max)),
        ("wick", lambda: suite_wick(12)),
        ("tomography", lambda: suite_tomography(d_max)),
    ]
    out = []
    for name, job in plan:
        t0 = time.perf_counter()
        try:
            r = job()
        except Exception as exc:  # a crashing suite is a failed suite
            r = SuiteResult(name, 1, [f"raised {exc!r}"])
        r.seconds = time.perf_counter() - t0
        out.append(r)
    return out
