"""Acceptance suite: nine end-to-end checks, each printing one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline, or
``python tests/test_acceptance.py`` for a standalone report.
"""

import itertools
import sys
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from anticoord.core import ThresholdSystem, is_fixed_point
from anticoord.dynamics import FixedPoint, Sequential, Synchronous, TwoCycle, simulate, step_seq
from anticoord.enumeration import (
    config_to_index, count_fixed_points, enumerate_fixed_points, enumerate_sync_cycles,
)
from anticoord.experiments import count_ne
from anticoord.potentials import (
    check_decrease_seq, check_decrease_sync, sds_bounds, sds_potential, syds_potential,
)
from anticoord.reduction import (
    CnfFormula, assignment_to_config, build_reduction, config_to_assignment, verify_parsimony,
)
from anticoord.netgen import random_thresholds
from anticoord.solvers import (
    Found, NoEquilibrium, solve_complete, solve_dag, solve_even_cycle_free, solve_nand_nor,
)
from conftest import (
    complete, connected_gnp, cycle, k33, random_cactus, random_dag, random_graph, random_system,
)

RESULTS: dict[int, str] = {}


def _report(num, ok, detail, elapsed, budget):
    ok = ok and elapsed < budget
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail} ({elapsed:.1f}s, budget {budget:.0f}s)"
    RESULTS[num] = line
    print(line, flush=True)
    return ok


def criterion_1():
    t0 = time.perf_counter()
    s = ThresholdSystem(k33(), [3] * 6, "se")
    summary = enumerate_fixed_points(s)
    got = {tuple(f.tolist()) for f in summary.fixed_points}
    ok = summary.num_fixed_points == 2 and got == {(1, 1, 1, 0, 0, 0), (0, 0, 0, 1, 1, 1)}
    return _report(1, ok, f"K(3,3) SE tau1=3 has {summary.num_fixed_points} fixed points", time.perf_counter() - t0, 1)


def criterion_2():
    t0 = time.perf_counter()
    s = ThresholdSystem(cycle(5), [2] * 5, "se")
    fps = count_fixed_points(s)
    bound = 8 * s.m - 2 * s.n
    worst = 0
    all_two = True
    for idx in range(32):
        tr = simulate(s, Synchronous(), [(idx >> v) & 1 for v in range(5)])
        all_two &= isinstance(tr.terminal, TwoCycle)
        worst = max(worst, tr.steps_taken)
    ok = fps == 0 and all_two and worst <= bound == 30
    return _report(2, ok, f"C5 SE tau1=2: {fps} fixed points, all 32 starts reach a 2-cycle, max {worst} steps <= {bound}",
                   time.perf_counter() - t0, 1)


def criterion_3(count=500, seed=3):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    failures = []
    max_ratio = 0.0
    for i in range(count):
        n = int(rng.integers(20, 201))
        g = connected_gnp(rng, n)
        s = ThresholdSystem(g, random_thresholds(g, "sn", int(rng.integers(2**32))), "sn")
        lo, hi = sds_bounds(s)
        c0 = rng.integers(0, 2, n).astype(np.uint8)
        perm = rng.permutation(n)
        bound = 3 * s.m - n
        c, steps = c0, 0
        while True:
            pot = sds_potential(s, c).total
            if not lo <= pot <= hi:
                failures.append(f"instance {i}: potential {pot} outside [{lo}, {hi}]")
                break
            deltas = check_decrease_seq(s, c, perm)
            if any(d > -1 for d in deltas):
                failures.append(f"instance {i}: substep delta {max(deltas)}")
                break
            if not deltas:
                break
            c = step_seq(s, c, perm)
            steps += 1
            if steps > bound:
                failures.append(f"instance {i}: {steps} steps > 3m-n = {bound}")
                break
        tr = simulate(s, Sequential(perm), c0, max_steps=bound)
        if not isinstance(tr.terminal, FixedPoint) or tr.steps_taken != steps:
            failures.append(f"instance {i}: simulate gave {tr.kind} after {tr.steps_taken}, pass loop {steps}")
        elif not is_fixed_point(s, tr.terminal.config):
            failures.append(f"instance {i}: terminal is not a fixed point")
        max_ratio = max(max_ratio, steps / bound)
    detail = f"{count} SN sequential runs, max steps/(3m-n) = {max_ratio:.3f}, {len(failures)} failures"
    if failures:
        detail += f"; first: {failures[0]}"
    return _report(3, not failures, detail, time.perf_counter() - t0, 30)


def criterion_4(count=500, seed=4):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    failures = []
    worst_ratio = 0.0
    for mode in ("se", "sn"):
        for i in range(count):
            n = int(rng.integers(20, 201))
            g = connected_gnp(rng, n)
            s = ThresholdSystem(g, random_thresholds(g, mode, int(rng.integers(2**32))), mode)
            lo_x2, bound = 2 * (-4 * s.m + n), 8 * s.m - 2 * n
            c = rng.integers(0, 2, n).astype(np.uint8)
            tr = simulate(s, Synchronous(), c, max_steps=bound)
            if not isinstance(tr.terminal, (FixedPoint, TwoCycle)) or tr.steps_taken > bound:
                failures.append(f"{mode} instance {i}: {tr.kind} after {tr.steps_taken} > {bound}")
                continue
            worst_ratio = max(worst_ratio, tr.steps_taken / bound)
            # doubled potential along the run: in range, and down by >= 1 (true value 1/2) until C == C''
            pot = syds_potential(s, c).total_x2
            for t, (delta, converged) in enumerate(check_decrease_sync(s, c, max_steps=bound)):
                if not lo_x2 <= pot <= 0:
                    failures.append(f"{mode} instance {i}: potential {pot / 2} outside [{lo_x2 / 2}, 0]")
                    break
                if converged != (t >= tr.steps_taken):
                    failures.append(f"{mode} instance {i}: convergence step disagrees with simulate")
                    break
                if (converged and delta != 0) or (not converged and delta > -1):
                    failures.append(f"{mode} instance {i}: step {t} delta {delta / 2}")
                    break
                pot += delta
    detail = f"{2 * count} synchronous runs (SE+SN), max steps/(8m-2n) = {worst_ratio:.3f}, {len(failures)} failures"
    if failures:
        detail += f"; first: {failures[0]}"
    return _report(4, not failures, detail, time.perf_counter() - t0, 60)


def _special_instance(rng, kind, n, mode):
    if kind == "nand-nor":
        g = random_graph(rng, n, float(rng.uniform(0.2, 0.6)))
        top = g.degrees + (1 if mode == "se" else 0)
        return ThresholdSystem(g, np.where(rng.random(n) < 0.5, 1, top), mode), solve_nand_nor
    if kind == "dag":
        g = random_dag(rng, n, float(rng.uniform(0.1, 0.5)))
        solver = solve_dag
    elif kind == "even-cycle-free":
        g = random_cactus(rng, n)
        solver = solve_even_cycle_free
    else:
        g = complete(n)
        solver = solve_complete
    top = g.degrees + (1 if mode == "se" else 0)
    tau = [int(rng.integers(0, t + 2)) for t in top]
    return ThresholdSystem(g, tau, mode), solver


def criterion_5(per_class=1000, seed=5):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    failures = []
    tally = {}
    for kind in ("nand-nor", "dag", "even-cycle-free", "complete"):
        found = none = 0
        for i in range(per_class):
            n = int(rng.integers(1, 15))
            mode = "se" if i % 2 else "sn"
            s, solver = _special_instance(rng, kind, n, mode)
            out = solver(s)
            truth = count_fixed_points(s)
            if isinstance(out, Found):
                found += 1
                if truth == 0 or not is_fixed_point(s, out.config):
                    failures.append(f"{kind}: Found on an instance with {truth} fixed points")
            elif isinstance(out, NoEquilibrium):
                none += 1
                if truth != 0:
                    failures.append(f"{kind}: NoEquilibrium but oracle has {truth}")
            else:
                failures.append(f"{kind}: unexpected {out}")
        tally[kind] = (found, none)
    summary = ", ".join(f"{k} {f}/{z}" for k, (f, z) in tally.items())
    detail = f"{4 * per_class} instances n<=14 (found/none: {summary}), {len(failures)} disagreements"
    if failures:
        detail += f"; first: {failures[0]}"
    return _report(5, not failures, detail, time.perf_counter() - t0, 300)


def _parsimony_ok(formula):
    art = build_reduction(formula)
    rep = verify_parsimony(art, exhaustive=True)
    if not (rep.ok and rep.num_fixed_points == formula.count_satisfying()):
        return False, rep.summary()
    for fp in enumerate_fixed_points(art.system).fixed_points:
        back = assignment_to_config(art, config_to_assignment(art, fp))
        if not np.array_equal(back, fp):
            return False, "round trip"
    return True, rep.summary()


def criterion_6(random_count=50, seed=6):
    t0 = time.perf_counter()
    triples = list(itertools.product((1, -1), repeat=3))
    formulas = [CnfFormula(1, cl) for k in range(4) for cl in itertools.product(triples, repeat=k)]
    rng = np.random.default_rng(seed)
    for _ in range(random_count):
        formulas.append(CnfFormula(1, tuple(triples[int(rng.integers(8))] for _ in range(2))))
    failures = []
    sat_hist = {0: 0, 1: 0, 2: 0}
    for f in formulas:
        ok, msg = _parsimony_ok(f)
        sat_hist[f.count_satisfying()] += 1
        if not ok:
            failures.append(f"{f.clauses}: {msg}")
    detail = (f"{len(formulas)} one-variable formulas (#SAT 0/1/2: {sat_hist[0]}/{sat_hist[1]}/{sat_hist[2]}), "
              f"#FP == #SAT with identity round trip, {len(failures)} failures")
    if failures:
        detail += f"; first: {failures[0]}"
    return _report(6, not failures, detail, time.perf_counter() - t0, 120)


def criterion_7(instances=100, draws=20, seed=7):
    t0 = time.perf_counter()
    res = count_ne(n=20, avg_degree=4, instances=instances, draws=draws, seed=seed)
    sn, se = res.aggregates["sn"], res.aggregates["se"]
    ok = sn["fraction_with_ne"] == 1.0 and se["fraction_with_ne"] <= 0.15
    detail = (f"{instances}x{draws} Gnp(20, deg 4): SN with NE {sn['fraction_with_ne']:.4f} (mean {sn['mean_ne']:.2f}), "
              f"SE with NE {se['fraction_with_ne']:.4f} <= 0.15")
    return _report(7, ok, detail, time.perf_counter() - t0, 600)


def _seq_fixed_set(system, order):
    """Indices of configurations left unchanged by one sequential pass in ``order``."""
    n = system.n
    idx = np.arange(1 << n)
    X = ((idx[:, None] >> np.arange(n)) & 1).astype(np.int64)
    Y = X.copy()
    se = system.mode.value == "se"
    for v in order:
        nb = system.graph.neighbors(v)
        zeros = (1 - Y[:, nb]).sum(axis=1) + ((1 - Y[:, v]) if se else 0)
        Y[:, v] = zeros >= system.tau1[v]
    return set(idx[(X == Y).all(axis=1)].tolist())


def criterion_8(count=200, perms=50, seed=8):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    failures = []
    total_fp = 0
    for i in range(count):
        s = random_system(rng, int(rng.integers(1, 13)), p=float(rng.uniform(0.15, 0.6)))
        oracle = {config_to_index(f) for f in enumerate_fixed_points(s).fixed_points}
        total_fp += len(oracle)
        sync_fixed = {j for j in range(1 << s.n)
                      if is_fixed_point(s, [(j >> v) & 1 for v in range(s.n)])} if s.n <= 8 else oracle
        if sync_fixed != oracle:
            failures.append(f"instance {i}: synchronous fixed set differs")
        reached = set()
        for _ in range(perms):
            order = rng.permutation(s.n)
            if _seq_fixed_set(s, order) != oracle:
                failures.append(f"instance {i}: sequential fixed set differs for order {order.tolist()}")
                break
            tr = simulate(s, Sequential(order), rng.integers(0, 2, s.n), max_steps=500)
            if isinstance(tr.terminal, FixedPoint):
                reached.add(config_to_index(tr.terminal.config))
        if not reached <= oracle:
            failures.append(f"instance {i}: sequential terminal outside the oracle set")
    detail = f"{count} instances n<=12 x {perms} orders, {total_fp} fixed points, {len(failures)} mismatches"
    if failures:
        detail += f"; first: {failures[0]}"
    return _report(8, not failures, detail, time.perf_counter() - t0, 120)


def criterion_9(count=200, seed=9):
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    seen = {}
    bad = []
    for i in range(count):
        mode = "se" if i % 2 else "sn"
        s = random_system(rng, int(rng.integers(1, 13)), p=float(rng.uniform(0.15, 0.6)), mode=mode)
        hist = enumerate_sync_cycles(s).cycle_length_histogram
        for k, v in hist.items():
            seen[k] = seen.get(k, 0) + v
        if not set(hist) <= {1, 2}:
            bad.append(f"instance {i}: cycle lengths {sorted(hist)}")
    detail = f"{count} instances n<=12 (both modes), cycle lengths seen {sorted(seen)}, {len(bad)} violations"
    if bad:
        detail += f"; first: {bad[0]}"
    return _report(9, not bad, detail, time.perf_counter() - t0, 120)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 10)])
def test_acceptance(crit):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert crit(), RESULTS.get(CRITERIA.index(crit) + 1)


if __name__ == "__main__":
    warnings.simplefilter("ignore")
    outcomes = [c() for c in CRITERIA]
    print(f"{sum(outcomes)}/{len(outcomes)} criteria passed")
    sys.exit(0 if all(outcomes) else 1)
