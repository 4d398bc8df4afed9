"""3SAT to SE synchronous system, with a one-to-one fixed-point correspondence.

Vertex layout (frozen so dumps are comparable between runs).  Variable ``i``
(0-based) owns the block ``15*i .. 15*i + 14``::

    +0 y   positive literal      tau1 = 3
    +1 z   negative literal      tau1 = 3
    +2 a   joined to y and z     tau1 = 1
    +3 d   joined to e           tau1 = 1
    +4 e   joined to d, y, z     tau1 = 3
    +5..+9   gadget of y: g1, g2, h1, h2, h3   (tau1 = 3)
    +10..+14 gadget of z: g1, g2, h1, h2, h3   (tau1 = 3)

Clause vertices (``tau1 = 1``) follow in clause order.  Each gadget is the
complete bipartite graph between ``{v, g1, g2}`` and ``{h1, h2, h3}`` where
``v`` is its literal vertex.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import Graph, Mode, PreconditionError, ThresholdSystem, UsageError, as_config, is_fixed_point
from .dynamics import FixedPoint, Synchronous, simulate
from .enumeration import enumerate_fixed_points
from .io import FormatError

BLOCK = 15
GADGET_ROLES = ("g1", "g2", "h1", "h2", "h3")
EXHAUSTIVE_LIMIT = 32


class DimacsError(FormatError):
    """Malformed DIMACS CNF text."""


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.num_vars < 0:
            raise UsageError("num_vars must be nonnegative")
        for j, cl in enumerate(self.clauses):
            if len(cl) != 3:
                raise UsageError(f"clause {j} has {len(cl)} literal slots, expected 3")
            for lit in cl:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise UsageError(f"clause {j} references variable {lit} outside 1..{self.num_vars}")

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        return all(any((lit > 0) == bool(assignment[abs(lit) - 1]) for lit in cl) for cl in self.clauses)

    def count_satisfying(self) -> int:
        return sum(self.satisfied_by(a) for a in itertools.product((False, True), repeat=self.num_vars))


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF; clauses with fewer than 3 literals are padded by repeating the last one."""
    num_vars = num_clauses = None
    clauses = []
    pending: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed header {line!r}") from None
            continue
        if num_vars is None:
            raise DimacsError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                if not pending:
                    raise DimacsError(f"line {lineno}: empty clause")
                if len(pending) > 3:
                    raise DimacsError(f"line {lineno}: clause has {len(pending)} literals, at most 3 allowed")
                clauses.append(tuple(pending + [pending[-1]] * (3 - len(pending))))
                pending = []
            else:
                if abs(lit) > num_vars:
                    raise DimacsError(f"line {lineno}: literal {lit} exceeds declared {num_vars} variables")
                pending.append(lit)
    if num_vars is None:
        raise DimacsError("missing 'p cnf' header")
    if pending:
        raise DimacsError("last clause is not terminated by 0")
    if num_clauses is not None and num_clauses != len(clauses):
        raise DimacsError(f"header declares {num_clauses} clauses, found {len(clauses)}")
    return CnfFormula(num_vars, tuple(clauses))


@dataclass(frozen=True)
class VariableVertices:
    y: int
    z: int
    a: int
    d: int
    e: int


@dataclass
class ReductionArtifact:
    formula: CnfFormula
    system: ThresholdSystem
    var_to_vertices: list[VariableVertices]
    clause_to_vertex: list[int]
    gadget_map: dict[int, tuple[int, int, int, int, int]]  # literal vertex -> (g1, g2, h1, h2, h3)

    def literal_vertex(self, lit: int) -> int:
        vv = self.var_to_vertices[abs(lit) - 1]
        return vv.y if lit > 0 else vv.z

    def roles(self) -> list[str]:
        names = [""] * self.system.n
        for i, vv in enumerate(self.var_to_vertices, 1):
            for role in ("y", "z", "a", "d", "e"):
                names[getattr(vv, role)] = f"{role}{i}"
            for lit_name, v in (("y", vv.y), ("z", vv.z)):
                for role, u in zip(GADGET_ROLES, self.gadget_map[v]):
                    names[u] = f"{role}[{lit_name}{i}]"
        for j, w in enumerate(self.clause_to_vertex, 1):
            names[w] = f"w{j}"
        return names

    def to_json(self) -> dict:
        return {
            "num_vars": self.formula.num_vars,
            "clauses": [list(c) for c in self.formula.clauses],
            "mode": self.system.mode.value,
            "n": self.system.n,
            "roles": self.roles(),
            "thresholds": self.system.tau1.tolist(),
            "edges": [list(e) for e in self.system.graph.edges],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def build_reduction(formula: CnfFormula) -> ReductionArtifact:
    nv = formula.num_vars
    n = BLOCK * nv + len(formula.clauses)
    tau = np.empty(n, dtype=np.int64)
    edges: list[tuple[int, int]] = []
    variables = []
    gadgets: dict[int, tuple[int, int, int, int, int]] = {}
    for i in range(nv):
        b = BLOCK * i
        vv = VariableVertices(y=b, z=b + 1, a=b + 2, d=b + 3, e=b + 4)
        variables.append(vv)
        tau[[vv.y, vv.z, vv.e]] = 3
        tau[[vv.a, vv.d]] = 1
        edges += [(vv.a, vv.y), (vv.a, vv.z), (vv.e, vv.d), (vv.e, vv.y), (vv.e, vv.z)]
        for lit, start in ((vv.y, b + 5), (vv.z, b + 10)):
            g1, g2, h1, h2, h3 = aux = tuple(range(start, start + 5))
            gadgets[lit] = aux
            tau[list(aux)] = 3
            edges += [(left, right) for left in (lit, g1, g2) for right in (h1, h2, h3)]
    clause_vertices = []
    for j, clause in enumerate(formula.clauses):
        w = BLOCK * nv + j
        clause_vertices.append(w)
        tau[w] = 1
        lits = sorted({variables[abs(l) - 1].y if l > 0 else variables[abs(l) - 1].z for l in clause})
        edges += [(w, v) for v in lits]
    system = ThresholdSystem(Graph(n, edges), tau, Mode.SE)
    return ReductionArtifact(formula, system, variables, clause_vertices, gadgets)


def assignment_to_config(artifact: ReductionArtifact, assignment: Sequence[bool]) -> np.ndarray:
    if len(assignment) != artifact.formula.num_vars:
        raise UsageError(f"assignment has {len(assignment)} values, formula has {artifact.formula.num_vars} variables")
    c = np.ones(artifact.system.n, dtype=np.uint8)
    for vv, value in zip(artifact.var_to_vertices, assignment):
        c[vv.y] = 0 if value else 1
        c[vv.z] = 1 if value else 0
        c[vv.e] = 0
        for lit in (vv.y, vv.z):
            g1, g2, h1, h2, h3 = artifact.gadget_map[lit]
            c[[g1, g2]] = c[lit]
            c[[h1, h2, h3]] = 1 - c[lit]
    return c


def config_to_assignment(artifact: ReductionArtifact, config) -> list[bool]:
    c = as_config(artifact.system, config)
    if not is_fixed_point(artifact.system, c):
        raise PreconditionError("configuration is not a fixed point of the reduction system")
    return [bool(c[vv.y] == 0) for vv in artifact.var_to_vertices]


@dataclass
class ParsimonyReport:
    exhaustive: bool
    num_fixed_points: Optional[int]
    num_satisfying: int
    round_trip_ok: bool
    restarts: int = 0

    @property
    def ok(self) -> bool:
        counts = self.num_fixed_points == self.num_satisfying if self.exhaustive else True
        return counts and self.round_trip_ok

    def summary(self) -> str:
        fp = "?" if self.num_fixed_points is None else str(self.num_fixed_points)
        return f"#FP={fp} #SAT={self.num_satisfying} round_trip={'ok' if self.round_trip_ok else 'FAILED'}"


def _round_trips(artifact: ReductionArtifact, config: np.ndarray) -> bool:
    back = assignment_to_config(artifact, config_to_assignment(artifact, config))
    return bool(np.array_equal(back, config))


def verify_parsimony(
    artifact: ReductionArtifact,
    exhaustive: bool = True,
    restarts: int = 200,
    seed: int = 0,
    n_limit: int = EXHAUSTIVE_LIMIT,
) -> ParsimonyReport:
    """Compare fixed points with satisfying assignments.

    Exhaustive mode scans all ``2**n`` configurations (``n <= n_limit``).  The
    sampled mode maps every satisfying assignment forward and checks fixed
    points reached from ``restarts`` random synchronous runs.
    """
    f = artifact.formula
    system = artifact.system
    sats = [a for a in itertools.product((False, True), repeat=f.num_vars) if f.satisfied_by(a)]
    if exhaustive:
        if system.n > n_limit:
            raise PreconditionError(
                f"exhaustive check needs n <= {n_limit}, got {system.n}; use exhaustive=False"
            )
        summary = enumerate_fixed_points(system, n_limit=n_limit)
        ok = all(_round_trips(artifact, fp) for fp in summary.fixed_points)
        return ParsimonyReport(True, summary.num_fixed_points, len(sats), ok)

    ok = all(is_fixed_point(system, assignment_to_config(artifact, a)) for a in sats)
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        start = rng.integers(0, 2, system.n).astype(np.uint8)
        trace = simulate(system, Synchronous(), start)
        if isinstance(trace.terminal, FixedPoint):
            ok = ok and _round_trips(artifact, trace.terminal.config)
    return ParsimonyReport(False, None, len(sats), ok, restarts)
