"""Command-line driver.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments, tomography, verification, wick
from .experiments import ConfigError, SweepConfig
from .fock_core import sym_dimension
from .metrics import trace_distance

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _n_values(args) -> list[int]:
    if getattr(args, "N_range", None):
        return experiments.parse_range(args.N_range)
    if getattr(args, "N", None):
        return experiments._int_list(args.N)
    return []


def cmd_dims(args) -> int:
    Ns = _n_values(args) or list(range(0, 11))
    print("d,N,dim")
    for N in Ns:
        print(f"{args.d},{N},{sym_dimension(args.d, N)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verification.run_suites(args.level)
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        print(f"[{status}] {r.name:<12} {r.checks:6d} checks  {r.seconds:7.2f}s")
        for msg in r.failures[:10]:
            print(f"        {msg}")
    ok = all(r.ok for r in results)
    print("all suites passed" if ok else "verification FAILED")
    return EXIT_OK if ok else EXIT_FAIL


def _sweep_config(args) -> SweepConfig:
    cfg = SweepConfig()
    if args.config:
        cfg = SweepConfig.from_text(Path(args.config).read_text(encoding="utf-8"))
    overrides = {}
    for key, attr in (("d", "d"), ("N", "N"), ("N-range", "N_range"), ("k", "k"), ("state", "state"),
                      ("seed", "seed"), ("samples", "samples"), ("output", "output"), ("tolerance", "tolerance")):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = str(value)
    return SweepConfig.from_pairs(overrides, cfg).validate()


def cmd_sweep(args) -> int:
    cfg = _sweep_config(args)
    rows = experiments.write_sweep(cfg)
    bad = [r for r in rows if r["trace_distance"] > r["bound_eq26"] + cfg.tolerance]
    print(f"wrote {len(rows)} rows to {cfg.output_path}")
    if bad:
        print(f"{len(bad)} rows exceed the trace-norm bound")
        return EXIT_FAIL
    return EXIT_OK


def cmd_convergence(args) -> int:
    rep = experiments.run_convergence(args.d, args.k, args.state, args.N_min, args.N_max, args.seed)
    print("N,trace_distance,N_times_distance")
    for n, x in zip(rep.N_values, rep.distances):
        print(f"{n},{x!r},{n * x!r}")
    if rep.trivial:
        print("all distances vanish: trivial convergence")
        return EXIT_OK
    print(f"fitted slope of log(distance) vs log(N): {rep.slope:.4f}")
    print("consecutive N*distance ratios: " + ", ".join(f"{r:.4f}" for r in rep.scaled_ratios))
    return EXIT_OK


def cmd_wick_check(args) -> int:
    print("n: c_{n,0..n}")
    for n in range(args.n_max + 1):
        print(f"{n}: {' '.join(str(c) for c in wick.wick_coefficients(n).coeffs)}")
    ok = True
    if args.n_max >= 2:
        rep = wick.verify_recurrences(args.n_max)
        for n in sorted(rep.laguerre_ok):
            line_ok = rep.laguerre_ok[n] and rep.modified_ok[n] and rep.operator_ok.get(n, True)
            print(f"recurrences n={n}: {'pass' if line_ok else 'FAIL'}")
        ok = rep.all_passed
    else:
        ok = wick.normal_order("a a*") == {(0, 0): 1, (1, 1): 1}
        print(f"CCR a a* = a* a + 1: {'pass' if ok else 'FAIL'}")
    for n in range(1, min(args.n_max, args.cutoff - 1) + 1):
        dev = wick.truncated_fock_check(n, args.cutoff)
        good = dev <= 1e-9
        ok &= good
        print(f"truncated Fock n={n} M={args.cutoff}: deviation {dev:.3e} {'pass' if good else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_tomography_demo(args) -> int:
    g = tomography.random_hermitian(args.d, args.k, args.seed)
    r = tomography.reconstruct(tomography.hartree_evaluator(g), args.d, args.k)
    err = trace_distance(r, g)
    good = err <= 1e-8
    print(f"d={args.d} k={args.k} seed={args.seed}: round-trip trace-norm error {err:.3e} {'pass' if good else 'FAIL'}")
    return EXIT_OK if good else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="definetti", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("dims", help="print symmetric-space dimensions")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--N")
    s.add_argument("--N-range", dest="N_range")
    s.set_defaults(func=cmd_dims)

    s = sub.add_parser("verify", help="run the invariant suites")
    s.add_argument("level", nargs="?", choices=("quick", "full"), default="quick")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="tabulate trace distances against the bounds as CSV")
    s.add_argument("--config")
    s.add_argument("--d", type=int)
    s.add_argument("--N")
    s.add_argument("--N-range", dest="N_range")
    s.add_argument("--k")
    s.add_argument("--state")
    s.add_argument("--seed", type=int)
    s.add_argument("--samples", type=int)
    s.add_argument("--output")
    s.add_argument("--tolerance", type=float)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("convergence", help="fit the decay of the trace distance in N")
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--state", default="hartree-sup")
    s.add_argument("--N-min", dest="N_min", type=int, default=8)
    s.add_argument("--N-max", dest="N_max", type=int, default=64)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_convergence)

    s = sub.add_parser("wick-check", help="Wick/anti-Wick coefficients and recurrences")
    s.add_argument("--n-max", dest="n_max", type=int, default=12)
    s.add_argument("--cutoff", type=int, default=60)
    s.set_defaults(func=cmd_wick_check)

    s = sub.add_parser("tomography-demo", help="reconstruct an operator from Hartree expectations")
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_tomography_demo)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
