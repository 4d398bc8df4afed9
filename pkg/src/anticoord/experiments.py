"""Experiment drivers: convergence-time grids, density sweeps, equilibrium counts.

Every random choice is derived from the base seed and the record's grid
coordinates through :func:`derive_seed`, so results do not depend on worker
count or completion order.  Records come back sorted by grid coordinates.
"""

from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import BudgetError, Graph, Mode, ThresholdSystem, UsageError
from .dynamics import FixedPoint, Sequential, Synchronous, avg_flip_rate, simulate
from .enumeration import FP_LIMIT, count_fixed_points, worker_count
from .netgen import Gnp, generate, gnp_for_degree, random_config, random_thresholds

DEFAULT_P_ZERO_GRID = tuple(round(0.1 * i, 1) for i in range(1, 10))

RUN_COLUMNS = [
    "instance", "draw", "p_zero", "trial", "seed", "mode", "scheme", "n", "m",
    "steps", "terminal", "avg_flip_rate", "bound", "within_bound",
]
SWEEP_COLUMNS = ["degree", "mode", "runs", "mean_steps", "stdev_steps", "max_steps", "mean_flip_rate"]
NE_COLUMNS = ["instance", "draw", "mode", "n", "m", "num_ne"]


class InvariantViolation(AssertionError):
    """A run contradicted a proven property (e.g. sequential SN did not reach a fixed point)."""


def derive_seed(base: int, *keys: int) -> int:
    ss = np.random.SeedSequence([int(base) % 2**63, *(int(k) for k in keys)])
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def step_bound(system: ThresholdSystem, scheme: str) -> Optional[int]:
    """Proven cap on steps before the limit cycle, or None when there is none."""
    n, m = system.n, system.m
    if scheme == "sync":
        return 8 * m - 2 * n if system.mode is Mode.SN else 8 * m + 2 * n
    if system.mode is Mode.SN:
        return 3 * m - n
    return None


@dataclass
class ExperimentResult:
    columns: list[str]
    records: list[dict]
    aggregates: dict = field(default_factory=dict)


@dataclass(frozen=True)
class _Task:
    instance: int
    draw: int
    system: ThresholdSystem
    scheme: str
    p_zero_grid: tuple[float, ...]
    trials: int
    seed: int
    max_steps: Optional[int]


def _run_task(task: _Task) -> list[dict]:
    system = task.system
    n = system.n
    bound = step_bound(system, task.scheme)
    out = []
    for pi, p in enumerate(task.p_zero_grid):
        for trial in range(task.trials):
            s = derive_seed(task.seed, task.instance, task.draw, pi, trial)
            start = random_config(n, p, s)
            if task.scheme == "sync":
                scheme = Synchronous()
            else:
                scheme = Sequential(np.random.default_rng(s).permutation(n))
            trace = simulate(system, scheme, start, max_steps=task.max_steps)
            if task.scheme == "seq" and system.mode is Mode.SN and not isinstance(trace.terminal, FixedPoint):
                raise InvariantViolation(
                    f"sequential SN run ended in {trace.kind} (instance {task.instance}, seed {s})"
                )
            rate = avg_flip_rate(trace) if trace.two_step_flips else 0.0
            out.append({
                "instance": task.instance, "draw": task.draw, "p_zero": p, "trial": trial, "seed": s,
                "mode": system.mode.value, "scheme": task.scheme, "n": n, "m": system.m,
                "steps": trace.steps_taken, "terminal": trace.kind, "avg_flip_rate": round(rate, 6),
                "bound": "" if bound is None else bound,
                "within_bound": "" if bound is None else int(trace.steps_taken <= bound),
            })
    return out


def _pool_map(fn, tasks: list, workers: Optional[int]) -> list:
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def run_aggregates(records: Sequence[dict]) -> dict:
    groups: dict[str, list[dict]] = {}
    for r in records:
        groups.setdefault(f"{r['mode']}/{r['scheme']}", []).append(r)
    agg = {}
    for key, rows in sorted(groups.items()):
        steps = [r["steps"] for r in rows]
        terminals: dict[str, int] = {}
        for r in rows:
            terminals[r["terminal"]] = terminals.get(r["terminal"], 0) + 1
        agg[key] = {
            "runs": len(rows),
            "mean_steps": round(statistics.fmean(steps), 6),
            "max_steps": max(steps),
            "mean_flip_rate": round(statistics.fmean(r["avg_flip_rate"] for r in rows), 6),
            "terminals": dict(sorted(terminals.items())),
            "bound_violations": sum(1 for r in rows if r["within_bound"] == 0),
        }
    return agg


def simulate_grid(
    graphs: Sequence[Graph],
    mode: Mode | str,
    scheme: str = "sync",
    *,
    thresholds: Optional[Sequence[Optional[np.ndarray]]] = None,
    threshold_draws: int = 1,
    p_zero_grid: Sequence[float] = DEFAULT_P_ZERO_GRID,
    trials: int = 1,
    seed: int = 0,
    max_steps: Optional[int] = None,
    workers: Optional[int] = None,
) -> ExperimentResult:
    """Run the (instance x threshold draw x p_zero x trial) grid.

    ``thresholds[i]``, when given, fixes instance ``i``'s thresholds and
    replaces the random draws for that instance.
    """
    mode = Mode.parse(mode)
    if scheme not in ("sync", "seq"):
        raise UsageError(f"unknown scheme {scheme!r}")
    if trials < 1 or threshold_draws < 1:
        raise UsageError("trials and threshold draws must be positive")
    for p in p_zero_grid:
        if not 0.0 <= p <= 1.0:
            raise UsageError(f"p_zero {p} outside [0, 1]")
    tasks = []
    for i, g in enumerate(graphs):
        fixed = None if thresholds is None else thresholds[i]
        draws = 1 if fixed is not None else threshold_draws
        for k in range(draws):
            tau = fixed if fixed is not None else random_thresholds(g, mode, derive_seed(seed, i, k, 0xA11))
            tasks.append(_Task(i, k, ThresholdSystem(g, tau, mode), scheme, tuple(p_zero_grid), trials, seed, max_steps))
    records = [r for chunk in _pool_map(_run_task, tasks, workers) for r in chunk]
    return ExperimentResult(RUN_COLUMNS, records, run_aggregates(records))


def density_sweep(
    n: int,
    degrees: Sequence[float],
    modes: Sequence[Mode | str] = (Mode.SE, Mode.SN),
    instances: int = 1,
    trials: int = 1,
    p_zero_grid: Sequence[float] = DEFAULT_P_ZERO_GRID,
    seed: int = 0,
    workers: Optional[int] = None,
) -> ExperimentResult:
    """Synchronous convergence time against average degree, one row per (degree, mode)."""
    rows = []
    for di, deg in enumerate(degrees):
        if not 0 < deg < n:
            raise UsageError(f"average degree must lie in (0, n), got {deg}")
        spec = gnp_for_degree(n, deg)
        graphs = [generate(spec, derive_seed(seed, di, i)) for i in range(instances)]
        for mode in modes:
            mode = Mode.parse(mode)
            res = simulate_grid(graphs, mode, "sync", p_zero_grid=p_zero_grid, trials=trials,
                                seed=derive_seed(seed, di), workers=workers)
            steps = [r["steps"] for r in res.records]
            rows.append({
                "degree": deg, "mode": mode.value, "runs": len(steps),
                "mean_steps": round(statistics.fmean(steps), 6),
                "stdev_steps": round(statistics.pstdev(steps), 6),
                "max_steps": max(steps),
                "mean_flip_rate": round(statistics.fmean(r["avg_flip_rate"] for r in res.records), 6),
            })
    return ExperimentResult(SWEEP_COLUMNS, rows, {"n": n, "degrees": list(degrees)})


def _count_task(args) -> int:
    system, budget = args
    return count_fixed_points(system, budget)


def count_ne(
    n: int = 20,
    avg_degree: float = 4.0,
    instances: int = 100,
    draws: int = 20,
    modes: Sequence[Mode | str] = (Mode.SE, Mode.SN),
    seed: int = 0,
    budget: int = FP_LIMIT,
    degree_cap: bool = True,
    workers: Optional[int] = None,
) -> ExperimentResult:
    """Exhaustive equilibrium counts over Gnp instances and threshold draws.

    With ``degree_cap`` thresholds come from ``[1, d]`` for both modes.
    """
    if n > budget:
        raise BudgetError(f"n={n} exceeds the enumeration budget {budget}")
    spec = gnp_for_degree(n, avg_degree) if n >= 2 else Gnp(n, 0.0)
    graphs = [generate(spec, derive_seed(seed, i)) for i in range(instances)]
    keys, jobs = [], []
    for mode in modes:
        mode = Mode.parse(mode)
        for i, g in enumerate(graphs):
            for k in range(draws):
                # the same draw seed for both modes keeps the comparison paired
                tau = random_thresholds(g, mode, derive_seed(seed, i, k, 0xBEE), degree_cap=degree_cap)
                keys.append((i, k, mode, g))
                jobs.append((ThresholdSystem(g, tau, mode), budget))
    counts = _pool_map(_count_task, jobs, workers)
    records = [
        {"instance": i, "draw": k, "mode": mode.value, "n": g.n, "m": g.m, "num_ne": c}
        for (i, k, mode, g), c in zip(keys, counts)
    ]
    return ExperimentResult(NE_COLUMNS, records, ne_aggregates(records))


def ne_aggregates(records: Sequence[dict]) -> dict:
    agg = {}
    for mode in sorted({r["mode"] for r in records}):
        c = [r["num_ne"] for r in records if r["mode"] == mode]
        hist: dict[int, int] = {}
        for x in c:
            hist[x] = hist.get(x, 0) + 1
        agg[mode] = {
            "instances": len(c),
            "with_ne": sum(1 for x in c if x > 0),
            "fraction_with_ne": round(sum(1 for x in c if x > 0) / len(c), 6),
            "mean_ne": round(statistics.fmean(c), 6),
            "histogram": {str(k): v for k, v in sorted(hist.items())},
        }
    return agg


def result_dict(result: ExperimentResult) -> dict:
    return asdict(result)
