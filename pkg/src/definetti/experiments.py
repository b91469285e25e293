"""Bound sweeps, CSV output and the convergence-rate study."""

from __future__ import annotations

import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .ckmr import definetti_rdm_formula, definetti_rdm_mc, worker_count
from .metrics import bound_report, sharp_rate, trace_distance
from .rdm import reduce
from .states import make_state, parse_family

log = logging.getLogger(__name__)

CSV_COLUMNS = ("d", "N", "k", "state", "seed", "trace_distance", "bound_eq26", "bound_eq27",
               "bound_eq210", "C_dkN", "eq33_bound", "mc_samples", "mc_max_stderr")

ZERO_DISTANCE = 1e-12


class ConfigError(ValueError):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated list of integers, got {text!r}") from exc


def parse_range(text: str) -> list[int]:
    """``a:b:step`` (inclusive of ``b``; step defaults to 1)."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ConfigError(f"range must look like a:b or a:b:step, got {text!r}")
    try:
        a, b = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
    except ValueError as exc:
        raise ConfigError(f"bad range {text!r}") from exc
    if step < 1 or b < a:
        raise ConfigError(f"empty or invalid range {text!r}")
    return list(range(a, b + 1, step))


@dataclass
class SweepConfig:
    d: int = 2
    N_list: tuple[int, ...] = (4, 8, 16)
    k_list: tuple[int, ...] = (1,)
    state_family: tuple[str, ...] = ("hartree",)
    seed: int = 0
    mc_samples: int = 0
    output_path: str = "sweep.csv"
    tolerance: float = 1e-10

    # config-file key for each field
    KEYS = {"d": "d", "N_list": "N", "k_list": "k", "state_family": "state", "seed": "seed",
            "mc_samples": "samples", "output_path": "output", "tolerance": "tolerance"}

    def validate(self) -> SweepConfig:
        if self.d < 1:
            raise ConfigError("d must be >= 1")
        if not self.N_list or not self.k_list or not self.state_family:
            raise ConfigError("N, k and state must be non-empty")
        if min(self.k_list) < 1:
            raise ConfigError("k must be >= 1")
        if max(self.k_list) > min(self.N_list):
            raise ConfigError("every k must be <= every N")
        if self.mc_samples < 0 or self.mc_samples == 1:
            raise ConfigError("samples must be 0 (disabled) or >= 2")
        for fam in self.state_family:
            try:
                parse_family(fam)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        return self

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            lines.append(f"{self.KEYS[f.name]}={value!r}" if isinstance(value, float) else f"{self.KEYS[f.name]}={value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_pairs(cls, pairs: dict[str, str], base: SweepConfig | None = None) -> SweepConfig:
        cfg = base if base is not None else cls()
        values = {f.name: getattr(cfg, f.name) for f in fields(cls)}
        for key, raw in pairs.items():
            raw = raw.strip()
            try:
                if key == "d":
                    values["d"] = int(raw)
                elif key == "N":
                    values["N_list"] = tuple(_int_list(raw))
                elif key == "N-range":
                    values["N_list"] = tuple(parse_range(raw))
                elif key == "k":
                    values["k_list"] = tuple(_int_list(raw))
                elif key == "state":
                    values["state_family"] = tuple(s.strip() for s in raw.split(",") if s.strip())
                elif key == "seed":
                    values["seed"] = int(raw)
                elif key == "samples":
                    values["mc_samples"] = int(raw)
                elif key == "output":
                    values["output_path"] = raw
                elif key == "tolerance":
                    values["tolerance"] = float(raw)
                else:
                    raise ConfigError(f"unknown config key {key!r}")
            except ValueError as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
        return cls(**values)

    @classmethod
    def from_text(cls, text: str, base: SweepConfig | None = None) -> SweepConfig:
        return cls.from_pairs(parse_key_values(text), base)


def parse_key_values(text: str) -> dict[str, str]:
    """Flat ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        out[key.strip()] = value.strip()
    return out


# ---------------------------------------------------------------------------
# sweep


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def sweep_row(d: int, N: int, k: int, state: str, seed: int, mc_samples: int) -> dict:
    G = make_state(state, d, N, seed)
    gamma = reduce(G, k)
    tilde = definetti_rdm_formula(G, k)
    dist = trace_distance(gamma, tilde)
    rep = bound_report(d, k, N, dist)
    if dist > sharp_rate(d, k, N):
        log.info("distance %.6g above 2kd/N at d=%d N=%d k=%d state=%s", dist, d, N, k, state)
    row = {
        "d": d, "N": N, "k": k, "state": state, "seed": seed, "trace_distance": dist,
        "bound_eq26": rep.bound_eq26, "bound_eq27": rep.bound_eq27, "bound_eq210": rep.bound_eq210,
        "C_dkN": rep.C_dkN, "eq33_bound": rep.eq33_bound, "mc_samples": None, "mc_max_stderr": None,
    }
    if mc_samples:
        est = definetti_rdm_mc(G, k, mc_samples, seed, workers=1)
        row["mc_samples"] = mc_samples
        row["mc_max_stderr"] = float(np.max(est.stderr))
    return row


def run_sweep(cfg: SweepConfig, workers: int | None = None) -> list[dict]:
    cfg.validate()
    jobs = sorted((N, k, s) for N in cfg.N_list for k in cfg.k_list for s in cfg.state_family)
    workers = worker_count() if workers is None else workers

    def one(job):
        N, k, s = job
        return sweep_row(cfg.d, N, k, s, cfg.seed, cfg.mc_samples)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, jobs))
    return [one(j) for j in jobs]


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(row[c]) for c in CSV_COLUMNS) + "\n")
    return buf.getvalue()


def write_sweep(cfg: SweepConfig, workers: int | None = None) -> list[dict]:
    rows = run_sweep(cfg, workers)
    with open(cfg.output_path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(rows_to_csv(rows))
    return rows


# ---------------------------------------------------------------------------
# convergence


@dataclass
class ConvergenceReport:
    d: int
    k: int
    family: str
    N_values: list[int]
    distances: list[float]
    slope: float | None
    trivial: bool

    @property
    def scaled_ratios(self) -> list[float]:
        """``(N' dist') / (N dist)`` between consecutive grid points."""
        nd = [n * x for n, x in zip(self.N_values, self.distances)]
        return [b / a if a > 0 else math.nan for a, b in zip(nd, nd[1:])]


def convergence_limit(d: int) -> int | None:
    return {2: 64, 3: 24}.get(d)


def geometric_grid(N_min: int, N_max: int) -> list[int]:
    if N_min < 1:
        raise ValueError("N_min must be >= 1")
    out, n = [], N_min
    while n <= N_max:
        out.append(n)
        n *= 2
    return out


def run_convergence(d: int, k: int, family: str, N_min: int, N_max: int, seed: int = 0) -> ConvergenceReport:
    limit = convergence_limit(d)
    if limit is not None and N_max > limit:
        raise ValueError(f"N_max={N_max} exceeds the limit {limit} for d={d}")
    grid = [n for n in geometric_grid(max(N_min, k), N_max)]
    if len(grid) < 3:
        raise ValueError("degenerate fit: fewer than 3 grid points")
    dists = []
    for N in grid:
        G = make_state(family, d, N, seed)
        dists.append(trace_distance(reduce(G, k), definetti_rdm_formula(G, k)))
    if all(x <= ZERO_DISTANCE for x in dists):
        return ConvergenceReport(d, k, family, grid, dists, None, True)
    pts = [(n, x) for n, x in zip(grid, dists) if x > ZERO_DISTANCE]
    if len(pts) < 3:
        raise ValueError("degenerate fit: fewer than 3 positive distances")
    slope = float(np.polyfit(np.log([p[0] for p in pts]), np.log([p[1] for p in pts]), 1)[0])
    return ConvergenceReport(d, k, family, grid, dists, slope, False)
