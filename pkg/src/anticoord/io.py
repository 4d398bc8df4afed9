"""Edge-list and instance-JSON formats.

Edge list: one ``u v`` pair of nonnegative integer ids per line; ``#`` starts
a comment.  A comment line of the form ``# n <count>`` fixes the vertex count
(needed for isolated vertices); otherwise ``n`` is the largest id plus one.

Instance JSON::

    {"n": 3, "mode": "se", "directed": false,
     "thresholds": [1, 2, 1], "edges": [[0, 1], [1, 2]]}
"""

from __future__ import annotations

import json
import re
from typing import Any

from .core import Graph, Mode, ThresholdSystem, UsageError

_N_HEADER = re.compile(r"^#\s*n\s*[=:]?\s*(\d+)\s*$")


class FormatError(UsageError):
    """Malformed input file contents."""


def read_edge_list(text: str, directed: bool = False) -> Graph:
    edges = []
    n_declared = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        m = _N_HEADER.match(raw.strip())
        if m:
            n_declared = int(m.group(1))
            continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"line {lineno}: expected 'u v', got {raw.strip()!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"line {lineno}: vertex ids must be integers, got {raw.strip()!r}") from None
        if u < 0 or v < 0:
            raise FormatError(f"line {lineno}: negative vertex id")
        edges.append((u, v))
    top = max((max(e) for e in edges), default=-1) + 1
    n = top if n_declared is None else n_declared
    if n < top:
        raise FormatError(f"edge references vertex {top - 1} but header declares n={n}")
    try:
        return Graph(n, edges, directed=directed)
    except UsageError as exc:
        raise FormatError(str(exc)) from None


def write_edge_list(graph: Graph) -> str:
    lines = [f"# n {graph.n}"] + [f"{u} {v}" for u, v in graph.edges]
    return "\n".join(lines) + "\n"


def instance_to_dict(system: ThresholdSystem) -> dict[str, Any]:
    g = system.graph
    return {
        "n": g.n,
        "mode": system.mode.value,
        "directed": g.directed,
        "thresholds": system.tau1.tolist(),
        "edges": [[u, v] for u, v in g.edges],
    }


def instance_from_dict(data: dict[str, Any]) -> ThresholdSystem:
    try:
        tau = [int(t) for t in data["thresholds"]]
        edges = [(int(e[0]), int(e[1])) for e in data.get("edges", [])]
        mode = Mode.parse(data.get("mode", "sn"))
        directed = bool(data.get("directed", False))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise FormatError(f"malformed instance: {exc}") from None
    n = int(data.get("n", len(tau)))
    if len(tau) != n:
        raise FormatError(f"instance declares n={n} but lists {len(tau)} thresholds")
    try:
        return ThresholdSystem(Graph(n, edges, directed), tau, mode)
    except UsageError as exc:
        raise FormatError(str(exc)) from None


def write_instance(system: ThresholdSystem) -> str:
    return json.dumps(instance_to_dict(system), indent=1) + "\n"


def read_instance(text: str) -> ThresholdSystem:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise FormatError("instance JSON must be an object")
    return instance_from_dict(data)
