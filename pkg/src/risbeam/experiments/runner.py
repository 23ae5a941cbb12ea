"""Experiment drivers: convergence traces, parameter sweeps, timing runs.

All results go through one fixed CSV schema (versioned in the header
comment). Determinism contract: with wall-clock measurement disabled (the
default for converge/sweep), a given (config, seed list) produces
byte-identical CSVs; the timing command always measures and is exempt.
"""

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..admm import SolverOptions, solve
from ..channel import sample_channel, sinr_all
from ..config import linear_to_db
from .config import ExperimentConfig, system_config

CSV_VERSION = "risbeam-csv-v1"
CSV_HEADER = "scenario,seed,sweep_value,iter,gamma,min_sinr_db,max_residual,wall_ms"
CSV_COMMENT = (
    f"# {CSV_VERSION} columns={CSV_HEADER} | summary rows: scenario suffix "
    "/spearman carries per-seed Spearman rho in the gamma column, suffix "
    "/loglog_slope carries the fitted log-log slope; wall_ms is 0 unless "
    "wall-clock measurement was requested"
)


@dataclass(frozen=True)
class ResultRow:
    scenario: str
    seed: int
    sweep_value: float
    iteration: int
    gamma: float
    min_sinr_db: float
    max_residual: float
    wall_ms: float

    def __post_init__(self):
        if not np.isfinite(self.min_sinr_db):
            raise ValueError("min_sinr_db must be finite")
        if self.iteration < 0:
            raise ValueError("iteration must be >= 0")


def _fmt(x) -> str:
    return f"{x:.10g}"


def write_rows(rows, path) -> None:
    lines = [CSV_COMMENT, CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.scenario},{r.seed},{_fmt(r.sweep_value)},{r.iteration},"
            f"{_fmt(r.gamma)},{_fmt(r.min_sinr_db)},{_fmt(r.max_residual)},"
            f"{_fmt(r.wall_ms)}"
        )
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def solver_options(cfg: ExperimentConfig, **overrides) -> SolverOptions:
    base = dict(
        epsilon=cfg.epsilon,
        max_iters=cfg.max_iters,
        multiplier_mode=cfg.multiplier_mode,
        multiplier_solve=cfg.multiplier_solve,
    )
    base.update(overrides)
    return SolverOptions(**base)


def _db_floor(value, floor=1e-12) -> float:
    return float(linear_to_db(max(value, floor)))


def _max_workers() -> int:
    cap = os.environ.get("RISBEAM_MAX_THREADS", "1")
    try:
        return max(1, int(cap))
    except ValueError:
        return 1


def _run_cells(cells, worker):
    """Evaluate independent (sweep value, seed) cells, optionally in a thread
    pool capped by RISBEAM_MAX_THREADS; results are re-ordered deterministically
    by the caller's sort."""
    workers = _max_workers()
    if workers == 1:
        return [worker(c) for c in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, cells))


def run_convergence(cfg: ExperimentConfig, wall_clock=False):
    """Per-iteration solver trace for every seed at the base scenario."""
    def worker(seed):
        sys_cfg = system_config(cfg, seed)
        ch = sample_channel(sys_cfg, np.random.default_rng([1, seed]))
        F, trace = solve(sys_cfg, ch, solver_options(cfg), seed=seed)
        rows = []
        for i in range(trace.iterations):
            rows.append(ResultRow(
                scenario=cfg.scenario,
                seed=seed,
                sweep_value=0.0,
                iteration=i + 1,
                gamma=trace.gamma[i],
                min_sinr_db=_db_floor(trace.min_sinr[i]),
                max_residual=trace.max_residual(i),
                wall_ms=trace.wall_s[i] * 1e3 if wall_clock else 0.0,
            ))
        return rows

    nested = _run_cells(list(cfg.seeds), worker)
    rows = [r for chunk in nested for r in chunk]
    rows.sort(key=lambda r: (r.seed, r.iteration))
    return rows


def _sweep_cell(cfg: ExperimentConfig, axis, value, seed):
    kwargs = {}
    if axis == "power":
        kwargs["p_t"] = value * 1e-3          # sweep values in mW
    elif axis == "elements":
        side = int(round(np.sqrt(value)))
        kwargs["n_x"] = side
        kwargs["n_z"] = side
    elif axis == "kappa":
        kwargs["kappa"] = float(value)        # linear Rician factor
    elif axis == "users":
        kwargs["users"] = int(value)
    sys_cfg = system_config(cfg, seed, **kwargs)
    ch = sample_channel(sys_cfg, np.random.default_rng([1, seed]))
    return sys_cfg, ch


def run_sweep(cfg: ExperimentConfig, wall_clock=False):
    """Final min-SINR per (sweep value, seed) plus per-seed Spearman trend
    summaries appended as scenario-suffixed rows."""
    axis = cfg.sweep_axis
    if axis == "elements":
        for v in cfg.sweep_values:
            if int(round(np.sqrt(v))) ** 2 != int(v):
                raise ValueError(
                    f"element sweep values must be squares, got {v}"
                )
    cells = [(v, s) for v in cfg.sweep_values for s in cfg.seeds]

    def worker(cell):
        value, seed = cell
        sys_cfg, ch = _sweep_cell(cfg, axis, value, seed)
        t0 = time.perf_counter()
        F, trace = solve(sys_cfg, ch, solver_options(cfg), seed=seed)
        wall = (time.perf_counter() - t0) * 1e3 if wall_clock else 0.0
        min_sinr = float(np.min(sinr_all(F, ch.gains, sys_cfg.noise_w)))
        return ResultRow(
            scenario=cfg.scenario,
            seed=seed,
            sweep_value=float(value),
            iteration=trace.iterations,
            gamma=trace.gamma[-1],
            min_sinr_db=_db_floor(min_sinr),
            max_residual=trace.max_residual(),
            wall_ms=wall,
        )

    rows = _run_cells(cells, worker)
    rows.sort(key=lambda r: (r.sweep_value, r.seed, r.iteration))

    # per-seed rank correlation of min-SINR against the sweep value
    for seed in cfg.seeds:
        per_seed = sorted((r for r in rows if r.seed == seed
                           and "/" not in r.scenario),
                          key=lambda r: r.sweep_value)
        values = [r.sweep_value for r in per_seed]
        sinrs = [r.min_sinr_db for r in per_seed]
        rho = spearman(values, sinrs)
        rows.append(ResultRow(
            scenario=f"{cfg.scenario}/spearman",
            seed=seed,
            sweep_value=0.0,
            iteration=0,
            gamma=rho,
            min_sinr_db=float(np.mean(sinrs)),
            max_residual=0.0,
            wall_ms=0.0,
        ))
    return rows


def run_timing(cfg: ExperimentConfig, iters=30, repeats=3):
    """Median per-iteration wall time per sweep value (elements or users
    axis), with a log-log slope summary row. Each cell is solved ``repeats``
    times; the reported value is the minimum over runs of the per-run median
    (first iteration dropped as warm-up), the usual noise-rejecting timing
    estimator. Always measures; runs serially."""
    if cfg.sweep_axis not in ("elements", "users"):
        raise ValueError("timing sweeps run on the elements or users axis")
    rows = []
    medians = []
    opts = solver_options(cfg, max_iters=iters, epsilon=0.0, track_sinr=False)
    for value in cfg.sweep_values:
        seed = cfg.seeds[0]
        if cfg.sweep_axis == "elements":
            n_x, n_z = _near_square(int(value))
            sys_cfg = system_config(cfg, seed, n_x=n_x, n_z=n_z)
        else:
            sys_cfg = system_config(cfg, seed, users=int(value))
        ch = sample_channel(sys_cfg, np.random.default_rng([1, seed]))
        run_medians = []
        for _ in range(repeats):
            F, trace = solve(sys_cfg, ch, opts, seed=seed)
            run_medians.append(np.median(np.asarray(trace.wall_s[1:]) * 1e3))
        med = float(min(run_medians))
        medians.append(med)
        min_sinr = float(np.min(sinr_all(F, ch.gains, sys_cfg.noise_w)))
        rows.append(ResultRow(
            scenario=cfg.scenario,
            seed=seed,
            sweep_value=float(value),
            iteration=trace.iterations,
            gamma=trace.gamma[-1],
            min_sinr_db=_db_floor(min_sinr),
            max_residual=trace.max_residual(),
            wall_ms=med,
        ))
    slope = loglog_slope(np.asarray(cfg.sweep_values, dtype=float),
                         np.asarray(medians))
    rows.append(ResultRow(
        scenario=f"{cfg.scenario}/loglog_slope",
        seed=cfg.seeds[0],
        sweep_value=0.0,
        iteration=0,
        gamma=slope,
        min_sinr_db=0.0,
        max_residual=0.0,
        wall_ms=0.0,
    ))
    return rows


def _near_square(n):
    """Most-square power-of-two-ish factorization n = n_x * n_z (timing runs
    accept non-square element counts)."""
    n_x = int(np.sqrt(n))
    while n % n_x != 0:
        n_x -= 1
    return max(n // n_x, n_x), min(n // n_x, n_x)


def rankdata(values) -> np.ndarray:
    """Average ranks (ties averaged), 1-based."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size)
    ranks[order] = np.arange(1, values.size + 1)
    # average ranks over ties
    for v in np.unique(values):
        mask = values == v
        if mask.sum() > 1:
            ranks[mask] = ranks[mask].mean()
    return ranks


def spearman(x, y) -> float:
    """Spearman rank correlation (Pearson correlation of the ranks)."""
    rx, ry = rankdata(x), rankdata(y)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    denom = np.sqrt((rx**2).sum() * (ry**2).sum())
    if denom == 0:
        return 0.0
    return float((rx * ry).sum() / denom)


def loglog_slope(x, y) -> float:
    """Least-squares slope of log y against log x."""
    lx, ly = np.log(x), np.log(y)
    lx = lx - lx.mean()
    return float((lx * (ly - ly.mean())).sum() / (lx**2).sum())
