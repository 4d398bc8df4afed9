"""``anticoord`` command line.

Exit codes: 0 success, 1 usage, 2 I/O or malformed input, 3 budget exceeded,
4 internal invariant violated.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
import time
import warnings
from pathlib import Path
from typing import Optional, Sequence


from . import __version__
from .core import BudgetError, Mode, PreconditionError, ThresholdSystem, UsageError, is_fixed_point
from .experiments import (
    DEFAULT_P_ZERO_GRID,
    ExperimentResult,
    InvariantViolation,
    count_ne,
    derive_seed,
    density_sweep,
    simulate_grid,
)
from .io import FormatError, read_edge_list, read_instance, write_edge_list, write_instance
from .netgen import BarabasiAlbert, Gnp, WattsStrogatz, generate, gnp_for_degree, random_thresholds
from .reduction import build_reduction, parse_dimacs, verify_parsimony
from .solvers import SOLVERS, Found, SolverInvariantError, solve_auto

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_BUDGET, EXIT_INVARIANT = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from None


def _add_output(p):
    p.add_argument("--out", help="output path (stdout when omitted); a .meta.json sidecar is written next to it")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_generator(p, instances_default=1):
    g = p.add_argument_group("network source")
    g.add_argument("--instance", help="instance JSON file (thresholds taken from the file)")
    g.add_argument("--edge-list", help="edge-list file (thresholds drawn at random)")
    g.add_argument("--graph", choices=("gnp", "ba", "ws"), default="gnp")
    g.add_argument("--n", type=int, default=1000)
    g.add_argument("--avg-degree", type=float, default=10.0, help="Gnp average degree")
    g.add_argument("--p", type=float, help="Gnp edge probability (overrides --avg-degree)")
    g.add_argument("--attach", type=int, default=3, help="Barabasi-Albert edges per new vertex")
    g.add_argument("--k", type=int, default=10, help="Watts-Strogatz ring degree (even)")
    g.add_argument("--rewire", type=float, default=0.1, help="Watts-Strogatz rewiring probability")
    g.add_argument("--instances", type=int, default=instances_default)


def _spec(args):
    if args.graph == "gnp":
        return Gnp(args.n, args.p) if args.p is not None else gnp_for_degree(args.n, args.avg_degree)
    if args.graph == "ba":
        return BarabasiAlbert(args.n, args.attach)
    return WattsStrogatz(args.n, args.k, args.rewire)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="anticoord", description="Anti-coordination threshold dynamics toolkit.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="convergence-time grid")
    _add_generator(p)
    p.add_argument("--mode", choices=("se", "sn"))
    p.add_argument("--scheme", choices=("sync", "seq"), default="sync")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1, help="initial configurations per p_zero value")
    p.add_argument("--threshold-draws", type=int, default=1)
    p.add_argument("--p-zero-grid", type=_float_list, default=list(DEFAULT_P_ZERO_GRID))
    p.add_argument("--max-steps", type=int)
    _add_output(p)

    p = sub.add_parser("sweep", help="convergence time against average degree")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--degrees", type=_float_list, default=[5.0, 10.0, 20.0])
    p.add_argument("--mode", choices=("se", "sn"), help="one mode only (default: both)")
    p.add_argument("--instances", type=int, default=1)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--p-zero-grid", type=_float_list, default=list(DEFAULT_P_ZERO_GRID))
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("count-ne", help="exhaustive equilibrium counts on small Gnp networks")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--avg-degree", type=float, default=4.0)
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--threshold-draws", type=int, default=20)
    p.add_argument("--mode", choices=("se", "sn"), help="one mode only (default: both)")
    p.add_argument("--threshold-range", choices=("degree", "mode"), default="degree",
                   help="'degree': tau1 in [1,d] for both modes; 'mode': SE uses [1,d+1]")
    p.add_argument("--budget", type=int, default=25, help="largest n to enumerate")
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("solve", help="find an equilibrium with a polynomial-time solver")
    p.add_argument("instance", help="instance JSON file")
    p.add_argument("--solver", choices=("auto", *SOLVERS), default="auto")
    p.add_argument("--mode", choices=("se", "sn"), help="override the file's mode")
    p.add_argument("--seed", type=int, help="random start for the general SN solver")

    p = sub.add_parser("reduce", help="build the 3SAT reduction instance")
    p.add_argument("cnf", help="DIMACS CNF file")
    p.add_argument("--verify", choices=("exhaustive", "sampled", "none"), default="exhaustive")
    p.add_argument("--restarts", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the artifact JSON here")

    p = sub.add_parser("gen", help="generate a random instance")
    _add_generator(p)
    p.add_argument("--mode", choices=("se", "sn"), default="sn")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("instance", "edges"), default="instance")
    p.add_argument("--out")
    return ap


def _emit(result: ExperimentResult, args, argv: Sequence[str]) -> None:
    if args.format == "json":
        text = json.dumps({"records": result.records, "aggregates": result.aggregates}, indent=1) + "\n"
    else:
        buf = _io.StringIO()
        w = csv.DictWriter(buf, fieldnames=result.columns, lineterminator="\n")
        w.writeheader()
        w.writerows(result.records)
        text = buf.getvalue()
    if not args.out:
        sys.stdout.write(text)
        print(json.dumps(result.aggregates, indent=1), file=sys.stderr)
        return
    out = Path(args.out)
    try:
        out.write_text(text)
        meta = {
            "command": list(argv),
            "version": __version__,
            "seed": getattr(args, "seed", None),
            "columns": result.columns,
            "aggregates": result.aggregates,
        }
        Path(str(out) + ".meta.json").write_text(json.dumps(meta, indent=1) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc.strerror or exc}") from None
    print(json.dumps(result.aggregates, indent=1))


def _load_graphs(args, mode: Mode):
    """Graphs plus optional fixed thresholds from --instance / --edge-list / generator flags."""
    if args.instance:
        system = read_instance(_read_text(args.instance))
        return [system.graph], [system.tau1], (Mode.parse(args.mode) if args.mode else system.mode)
    if args.edge_list:
        return [read_edge_list(_read_text(args.edge_list))], None, mode
    spec = _spec(args)
    graphs = [generate(spec, derive_seed(args.seed, i, 0x6E)) for i in range(args.instances)]
    return graphs, None, mode


def cmd_simulate(args, argv) -> int:
    graphs, taus, mode = _load_graphs(args, Mode.parse(args.mode or "sn"))
    res = simulate_grid(
        graphs, mode, args.scheme, thresholds=taus, threshold_draws=args.threshold_draws,
        p_zero_grid=args.p_zero_grid, trials=args.trials, seed=args.seed, max_steps=args.max_steps,
    )
    _emit(res, args, argv)
    return EXIT_OK


def cmd_sweep(args, argv) -> int:
    modes = [Mode.parse(args.mode)] if args.mode else [Mode.SE, Mode.SN]
    res = density_sweep(args.n, args.degrees, modes, args.instances, args.trials, args.p_zero_grid, args.seed)
    _emit(res, args, argv)
    return EXIT_OK


def cmd_count_ne(args, argv) -> int:
    modes = [Mode.parse(args.mode)] if args.mode else [Mode.SE, Mode.SN]
    res = count_ne(args.n, args.avg_degree, args.instances, args.threshold_draws, modes, args.seed,
                   budget=args.budget, degree_cap=args.threshold_range == "degree")
    _emit(res, args, argv)
    return EXIT_OK


def cmd_solve(args, argv) -> int:
    system = read_instance(_read_text(args.instance))
    if args.mode:
        system = system.with_mode(args.mode)
    t0 = time.perf_counter()
    if args.solver == "auto":
        name, outcome = solve_auto(system)
    elif args.solver == "sn":
        name, outcome = "sn", SOLVERS["sn"](system, seed=args.seed)
    else:
        name, outcome = args.solver, SOLVERS[args.solver](system)
    elapsed = time.perf_counter() - t0
    report = {"solver": name, "outcome": outcome.kind, "wall_time_s": round(elapsed, 6)}
    if isinstance(outcome, Found):
        report["config"] = outcome.config.astype(int).tolist()
        report["verified"] = is_fixed_point(system, outcome.config)
    else:
        report["reason"] = outcome.reason
    print(json.dumps(report))
    return EXIT_OK


def cmd_reduce(args, argv) -> int:
    formula = parse_dimacs(_read_text(args.cnf))
    artifact = build_reduction(formula)
    if args.out:
        try:
            Path(args.out).write_text(artifact.dumps() + "\n")
        except OSError as exc:
            raise OSError(f"cannot write {args.out}: {exc.strerror or exc}") from None
    print(f"vertices={artifact.system.n} edges={artifact.system.m} clauses={len(formula.clauses)}")
    if args.verify != "none":
        report = verify_parsimony(artifact, exhaustive=args.verify == "exhaustive",
                                  restarts=args.restarts, seed=args.seed)
        print(report.summary())
        if not report.ok:
            raise InvariantViolation("fixed points and satisfying assignments disagree")
    return EXIT_OK


def cmd_gen(args, argv) -> int:
    g = generate(_spec(args), derive_seed(args.seed, 0, 0x6E))
    if args.format == "edges":
        text = write_edge_list(g)
    else:
        tau = random_thresholds(g, args.mode, derive_seed(args.seed, 0, 0, 0xA11))
        text = write_instance(ThresholdSystem(g, tau, args.mode))
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {args.out}: {exc.strerror or exc}") from None
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "count-ne": cmd_count_ne,
    "solve": cmd_solve,
    "reduce": cmd_reduce,
    "gen": cmd_gen,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore" if args.command in ("sweep", "count-ne") else "default")
            return COMMANDS[args.command](args, argv)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InvariantViolation, SolverInvariantError) as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (UsageError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
