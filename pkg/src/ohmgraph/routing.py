"""Electrical-flow oblivious routing: superpose per-pair unit flows and
report per-edge congestion against the exact competitive-ratio bound."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .electrical import abs_impedance_max_colsum
from .graph import Graph
from .solver import LaplacianSystem

__all__ = [
    "Demand",
    "RoutingReport",
    "parse_demands",
    "route_demands",
    "competitive_ratio_bound",
]


@dataclass(frozen=True)
class Demand:
    source: int
    sink: int
    amount: float


@dataclass(frozen=True)
class RoutingReport:
    """Signed superposed flow, per-edge congestion |flow|/conductance, and the
    max-column-sum bound (None on weighted graphs, where no routing identity
    is claimed)."""

    flow: np.ndarray
    congestion: np.ndarray
    max_congestion: float
    competitive_ratio_bound: float | None


def parse_demands(text: str, source_name: str = "<demands>") -> list[Demand]:
    """Parse `source sink amount` triples, one per line, `#` comments allowed."""
    demands = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{source_name}:{lineno}: expected 'source sink amount', got {raw!r}")
        try:
            s, t, a = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ValueError(f"{source_name}:{lineno}: could not parse fields in {raw!r}")
        demands.append(Demand(s, t, a))
    return demands


def _validate_demands(graph: Graph, demands: list[Demand]) -> None:
    if not demands:
        raise ValueError("demand set is empty")
    n = graph.n_vertices
    for i, d in enumerate(demands):
        if not (0 <= d.source < n and 0 <= d.sink < n):
            raise ValueError(f"demand {i}: vertex ids ({d.source}, {d.sink}) out of range for n={n}")
        if d.source == d.sink:
            raise ValueError(f"demand {i}: source equals sink ({d.source})")
        if not d.amount > 0:
            raise ValueError(f"demand {i}: amount must be positive, got {d.amount}")


def route_demands(graph: Graph, demands, include_bound: bool = True, mode: str = "auto") -> RoutingReport:
    """Route every demand along its electrical flow and superpose them signed.

    Opposite-direction demands may cancel on an edge; congestion is taken on
    the superposed flow, which is the congestion the routed traffic actually
    produces.  Per-pair solves are independent (batched here) and the report
    is a single associative reduction.
    """
    demands = list(demands)
    _validate_demands(graph, demands)
    system = LaplacianSystem.from_graph(graph)
    rhs = np.zeros((graph.n_vertices, len(demands)))
    for j, d in enumerate(demands):
        rhs[d.source, j] = 1.0
        rhs[d.sink, j] = -1.0
    potentials = system.solve_columns(rhs)
    per_pair = graph.conductances[:, None] * (
        potentials[graph.tails, :] - potentials[graph.heads, :]
    )
    amounts = np.array([d.amount for d in demands])
    flow = per_pair @ amounts
    congestion = np.abs(flow) / graph.conductances
    bound = None
    if include_bound and graph.is_unweighted:
        bound = competitive_ratio_bound(graph, mode=mode)
    return RoutingReport(
        flow=flow,
        congestion=congestion,
        max_congestion=float(congestion.max()),
        competitive_ratio_bound=bound,
    )


def competitive_ratio_bound(graph: Graph, mode: str = "auto") -> float:
    """Exact competitive ratio of electrical routing on an unweighted graph:
    the maximum column sum of the entrywise-absolute impedance, equivalently
    the maximum per-edge flow stretch."""
    if not graph.is_unweighted:
        raise ValueError(
            "the competitive-ratio identity holds for unweighted graphs only; "
            "for weighted graphs route_demands reports raw congestion without a bound"
        )
    return abs_impedance_max_colsum(graph, mode=mode)
