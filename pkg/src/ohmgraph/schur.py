"""Schur complements of graph Laplacians and random-walk hitting-probability
maps computed by three independent routes, plus checkers for the
distribution, energy-fraction, and conductance-preservation identities.

A :class:`SchurSystem` is an immutable snapshot of a terminal set ``S``: the
eliminated Laplacian on ``S``, its materialized graph, and the probability
map ``prob_map[i, x]`` = probability that a random walk from ``x`` hits
terminal ``vertices[i]`` before any other terminal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .graph import Graph, build_graph, is_connected, laplacian_matrix, weighted_adjacency
from .solver import DisconnectedGraphError, LaplacianSystem

__all__ = [
    "PRUNE_TOL",
    "SELF_LOOP_RESIDUE_TOL",
    "SchurResidueError",
    "SchurSystem",
    "EdgeStats",
    "schur_complement",
    "eliminate_one",
    "hitting_probabilities",
    "edge_stats",
    "check_sum_potentials",
    "check_norm_energy",
    "check_schur_conductance",
]

# Conductances below this threshold after elimination are numerical noise and
# are pruned when the Schur graph is materialized.
PRUNE_TOL = 1e-12

# Elimination of a pure Laplacian leaves only roundoff on the diagonal
# surplus; anything larger signals lost mass and is an error, not a warning.
SELF_LOOP_RESIDUE_TOL = 1e-9


class SchurResidueError(RuntimeError):
    """Self-loop residue of an eliminated Laplacian exceeded tolerance."""


@dataclass(frozen=True, eq=False)
class SchurSystem:
    """Terminal set ``S`` with its eliminated Laplacian and probability map."""

    base: Graph
    vertices: np.ndarray  # sorted original ids retained, shape (s,)
    laplacian: np.ndarray  # (s, s) Laplacian of the eliminated network
    graph: Graph  # materialized network on local ids 0..s-1
    prob_map: np.ndarray  # (s, n_base)

    @property
    def size(self) -> int:
        return int(self.vertices.shape[0])

    def local_index(self, v: int) -> int:
        """Position of original vertex ``v`` inside the terminal set."""
        pos = int(np.searchsorted(self.vertices, v))
        if pos >= self.size or self.vertices[pos] != v:
            raise ValueError(f"vertex {v} is not in the terminal set")
        return pos


def _validate_terminals(graph: Graph, terminals) -> np.ndarray:
    S = np.unique(np.asarray(list(terminals), dtype=np.int64))
    if S.size < 2:
        raise ValueError("terminal set must contain at least 2 distinct vertices")
    if S[0] < 0 or S[-1] >= graph.n_vertices:
        raise ValueError(f"terminal ids out of range for n={graph.n_vertices}")
    return S


def _block_prob_map(graph: Graph, S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Probability map and Schur Laplacian from the block elimination formula.

    The Laplacian is split into terminal/non-terminal blocks; eliminating the
    non-terminal block yields both the reduced Laplacian and, per vertex, the
    harmonic extension that encodes the hitting probabilities.
    """
    n = graph.n_vertices
    L = laplacian_matrix(graph)
    comp = np.setdiff1d(np.arange(n), S)
    s = S.size
    pm = np.zeros((s, n))
    pm[np.arange(s), S] = 1.0
    P = L[np.ix_(S, S)]
    if comp.size == 0:
        return pm, P
    Q = L[np.ix_(S, comp)]
    R = L[np.ix_(comp, comp)]
    factor = scipy.linalg.cho_factor(R, lower=True, check_finite=False)
    X = scipy.linalg.cho_solve(factor, Q.T, check_finite=False)  # R^{-1} Q^T
    schur = P - Q @ X
    schur = (schur + schur.T) / 2.0
    pm[:, comp] = -X.T
    return pm, schur


def _materialize(schur: np.ndarray, prune_tol: float) -> Graph:
    s = schur.shape[0]
    residue = float(np.abs(schur.sum(axis=1)).max())
    if residue > SELF_LOOP_RESIDUE_TOL:
        raise SchurResidueError(
            f"self-loop residue {residue:.3e} exceeds {SELF_LOOP_RESIDUE_TOL:.0e}; "
            "the eliminated matrix is not numerically a pure Laplacian"
        )
    edges = []
    for i in range(s):
        for j in range(i + 1, s):
            w = -schur[i, j]
            if w > prune_tol:
                edges.append((i, j, float(w)))
            elif w < -prune_tol:
                raise SchurResidueError(
                    f"positive off-diagonal {schur[i, j]:.3e} at ({i}, {j}); "
                    "elimination produced a non-Laplacian matrix"
                )
    return build_graph(edges, n_vertices=s)


def schur_complement(graph: Graph, terminals, prune_tol: float = PRUNE_TOL) -> SchurSystem:
    """Eliminate every vertex outside ``terminals`` from the graph Laplacian.

    The result is electrically equivalent to the input on the terminal set:
    quadratic forms of the pseudoinverse on terminal-supported vectors are
    preserved.
    """
    S = _validate_terminals(graph, terminals)
    if not is_connected(graph):
        raise DisconnectedGraphError("Schur elimination requires a connected graph")
    pm, schur = _block_prob_map(graph, S)
    return SchurSystem(
        base=graph,
        vertices=S,
        laplacian=schur,
        graph=_materialize(schur, prune_tol),
        prob_map=pm,
    )


def eliminate_one(system: SchurSystem, v: int, prune_tol: float = PRUNE_TOL) -> SchurSystem:
    """Eliminate a single terminal by a star-clique update of the current Laplacian.

    Equals the from-scratch elimination onto the smaller terminal set; the
    probability map is recomputed from the block formula (correctness first at
    desk scale; the incremental one-step update is a future optimization).
    """
    if system.size <= 2:
        raise ValueError("cannot eliminate below 2 terminals (termination state)")
    k = system.local_index(v)
    L = system.laplacian
    d = L[k, k]
    if d <= 0:
        raise SchurResidueError(f"pivot diagonal {d:.3e} is not positive")
    col = L[:, k]
    updated = L - np.outer(col, col) / d
    keep = np.arange(system.size) != k
    updated = updated[np.ix_(keep, keep)]
    updated = (updated + updated.T) / 2.0
    vertices = system.vertices[keep]
    pm, _ = _block_prob_map(system.base, vertices)
    return SchurSystem(
        base=system.base,
        vertices=vertices,
        laplacian=updated,
        graph=_materialize(updated, prune_tol),
        prob_map=pm,
    )


def _identify_prob_map(graph: Graph, S: np.ndarray) -> np.ndarray:
    """Probability map via terminal identification.

    For each terminal ``v``, all other terminals are merged into a single
    ground vertex; the normalized potentials of the v-to-ground unit flow are
    the hitting probabilities.  Merging turns terminal-terminal edges into
    self-loops, which are dropped (they cancel in every potential difference).
    """
    n = graph.n_vertices
    s = S.size
    pm = np.empty((s, n))
    for i, v in enumerate(S):
        others = S[S != v]
        idmap = np.full(n, -1, dtype=np.int64)
        idmap[others] = 0
        nxt = 1
        for x in range(n):
            if idmap[x] < 0:
                idmap[x] = nxt
                nxt += 1
        ma = idmap[graph.tails]
        mb = idmap[graph.heads]
        keep = ma != mb
        merged = build_graph(
            zip(ma[keep].tolist(), mb[keep].tolist(), graph.conductances[keep].tolist()),
            n_vertices=nxt,
        )
        b = np.zeros(nxt)
        b[idmap[v]] = 1.0
        b[0] = -1.0
        phi = LaplacianSystem.from_graph(merged).solve(b)
        denom = phi[idmap[v]] - phi[0]
        pm[i, :] = np.abs(phi[idmap] - phi[0]) / denom
    return pm


def _walk_prob_map(graph: Graph, S: np.ndarray) -> np.ndarray:
    """Probability map from the absorbing-chain linear system (deterministic,
    no Monte Carlo): transition probabilities proportional to conductances,
    terminals absorbing."""
    n = graph.n_vertices
    A = weighted_adjacency(graph)
    deg = A.sum(axis=1)
    if np.any(deg <= 0):
        raise DisconnectedGraphError("isolated vertex: walk transition matrix undefined")
    P = A / deg[:, None]
    comp = np.setdiff1d(np.arange(n), S)
    s = S.size
    pm = np.zeros((s, n))
    pm[np.arange(s), S] = 1.0
    if comp.size:
        T = P[np.ix_(comp, comp)]
        H = np.linalg.solve(np.eye(comp.size) - T, P[np.ix_(comp, S)])
        pm[:, comp] = H.T
    return pm


def hitting_probabilities(graph: Graph, terminals, method: str = "block") -> np.ndarray:
    """Hitting-probability map for a terminal set, rows ordered by sorted id.

    Parameters
    ----------
    graph : Graph
        Connected weighted multigraph.
    terminals : iterable of int
        At least two distinct vertex ids.
    method : str
        ``'block'`` uses the Laplacian block-elimination formula,
        ``'identify'`` normalized potentials after merging the other
        terminals, ``'walk_oracle'`` the absorbing-chain linear system.
        The three agree entrywise to solver accuracy.

    Returns
    -------
    ndarray of shape (len(terminals), n_vertices)
        ``result[i, x]`` is the probability that a walk from ``x`` reaches
        sorted terminal ``i`` first.  Rows at terminal columns form the
        identity; every column sums to 1.
    """
    S = _validate_terminals(graph, terminals)
    if not is_connected(graph):
        raise DisconnectedGraphError("hitting probabilities require a connected graph")
    if method == "block":
        return _block_prob_map(graph, S)[0]
    if method == "identify":
        return _identify_prob_map(graph, S)
    if method == "walk_oracle":
        return _walk_prob_map(graph, S)
    raise ValueError(f"unknown method {method!r}; use 'block', 'identify', or 'walk_oracle'")


@dataclass(frozen=True)
class EdgeStats:
    """Per base-edge statistics of one terminal's probability row:
    ``q`` is the absolute probability drop across the edge, ``r`` the larger
    endpoint probability clamped below by 1/|S|."""

    q: np.ndarray
    r: np.ndarray


def edge_stats(system: SchurSystem, v: int) -> EdgeStats:
    """Probability drop and clamped endpoint level per edge of the base graph."""
    i = system.local_index(v)
    row = system.prob_map[i]
    px = row[system.base.tails]
    py = row[system.base.heads]
    q = np.abs(px - py)
    r = np.maximum(np.maximum(px, py), 1.0 / system.size)
    return EdgeStats(q=q, r=r)


def check_sum_potentials(system: SchurSystem, edge_index: int) -> float:
    """Sum over terminals of the clamped endpoint level of one edge; always <= 3."""
    if not (0 <= edge_index < system.base.n_edges):
        raise ValueError(f"edge index {edge_index} out of range for m={system.base.n_edges}")
    x = int(system.base.tails[edge_index])
    y = int(system.base.heads[edge_index])
    px = system.prob_map[:, x]
    py = system.prob_map[:, y]
    r = np.maximum(np.maximum(px, py), 1.0 / system.size)
    return float(r.sum())


def check_norm_energy(graph: Graph, terminals, v: int, p: float) -> tuple[float, float]:
    """Energy of the low-potential edge set versus its fraction bound.

    ``lhs`` is the conductance-weighted square of the probability drops over
    edges whose endpoint probabilities both stay at or below ``p``; ``rhs`` is
    ``p`` times the total drop energy.  The contract is ``lhs <= rhs``.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("threshold p must lie in (0, 1)")
    system = schur_complement(graph, terminals)
    stats = edge_stats(system, v)
    i = system.local_index(v)
    row = system.prob_map[i]
    level = np.maximum(row[graph.tails], row[graph.heads])
    energy = graph.conductances * stats.q**2
    lhs = float(energy[level <= p].sum())
    rhs = float(p * energy.sum())
    return lhs, rhs


def check_schur_conductance(graph: Graph, terminals, v: int) -> tuple[float, float]:
    """Weighted degree of a terminal after elimination versus the drop energy.

    ``lhs`` sums the conductances incident to ``v`` in the eliminated network;
    ``rhs`` is the conductance-weighted square of ``v``'s probability drops
    over the base edges.  The two agree to solver accuracy.
    """
    system = schur_complement(graph, terminals)
    i = system.local_index(v)
    sg = system.graph
    incident = (sg.tails == i) | (sg.heads == i)
    lhs = float(sg.conductances[incident].sum())
    stats = edge_stats(system, v)
    rhs = float((graph.conductances * stats.q**2).sum())
    return lhs, rhs
