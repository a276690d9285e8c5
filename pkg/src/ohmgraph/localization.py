"""Greedy elimination driver for the absolute-impedance quadratic form.

Tracks the quantity V_i = z^T |A_i^T L_i^+ A_i| z along a vertex-elimination
schedule, where L_i is the Laplacian after i eliminations, the columns of A_i
are the hitting-probability drops of the original edges onto the surviving
terminal set, and z is the conductance-scaled weight vector.  Each step is
charged against the eliminated vertex's sparsity score ("degree"), whose sum
over any terminal set obeys an explicit logarithmic bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .electrical import ABS_ZERO_TOL, quadratic_form_abs
from .graph import Graph, is_connected, laplacian_matrix
from .schur import _block_prob_map, _validate_terminals
from .solver import DisconnectedGraphError, LaplacianSystem

__all__ = [
    "LocalizationError",
    "DegreeProfile",
    "EliminationStep",
    "EliminationTrace",
    "HarmonicBoundReport",
    "degree",
    "degree_profile",
    "run_elimination",
    "harmonic_bound_check",
]

# Below this, the drop-energy denominator counts as identically zero: the
# vertex sees no activity, its degree is 0, and eliminating it changes nothing.
_DEGENERATE_DENOM = 1e-30

_VI_BLOCK = 1024


class LocalizationError(RuntimeError):
    """A per-step consistency identity of the elimination run failed."""


@dataclass(frozen=True)
class DegreeProfile:
    """Degrees of every terminal, their sum, and the explicit dyadic bound
    ``(6*ceil(log2 |S|) + 6) * sum(w^2)``."""

    vertices: np.ndarray
    degrees: np.ndarray
    total: float
    bound: float
    degenerate: list[int]


@dataclass(frozen=True)
class EliminationStep:
    index: int
    pivot: int
    degree_value: float
    rank_one_value: float
    v_i: float | None
    slack: float | None  # v_i - v_{i+1} - degree_value; <= 0 up to roundoff


@dataclass(frozen=True)
class EliminationTrace:
    steps: list[EliminationStep]
    terminal_pair: tuple[int, int]
    v_terminal: float | None
    v_initial: float | None
    w_norm_sq: float


@dataclass(frozen=True)
class HarmonicBoundReport:
    lhs: float
    harmonic_bound: float
    ok: bool


def _check_weights(graph: Graph, w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (graph.n_edges,):
        raise ValueError(f"expected an edge weight vector of length {graph.n_edges}, got shape {w.shape}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and entrywise nonnegative")
    return w


def _bucket_count(s: int) -> int:
    # ceil(log2 s) for s >= 2, integer-exact at powers of two
    return int(s - 1).bit_length()


def _degree_vector(graph: Graph, S: np.ndarray, w: np.ndarray, prob_map=None):
    if prob_map is None:
        prob_map, _ = _block_prob_map(graph, S)
    q = np.abs(prob_map[:, graph.tails] - prob_map[:, graph.heads])
    z = w * np.sqrt(graph.conductances)
    num = (q @ z) ** 2
    den = (q * q) @ graph.conductances
    degenerate = den <= _DEGENERATE_DENOM
    degrees = np.where(degenerate, 0.0, num / np.where(degenerate, 1.0, den))
    return degrees, den, degenerate


def degree(graph: Graph, terminals, u: int, w) -> float:
    """Sparsity score of one terminal: squared weighted l1 of its probability
    drops over the drop energy.  With the full vertex set, unit weights, and
    unit conductances this is just the vertex degree."""
    S = _validate_terminals(graph, terminals)
    w = _check_weights(graph, w)
    if not is_connected(graph):
        raise DisconnectedGraphError("degree requires a connected graph")
    pos = int(np.searchsorted(S, u))
    if pos >= S.size or S[pos] != u:
        raise ValueError(f"vertex {u} is not in the terminal set")
    degrees, _, _ = _degree_vector(graph, S, w)
    return float(degrees[pos])


def degree_profile(graph: Graph, terminals, w) -> DegreeProfile:
    """Degrees of all terminals plus the explicit localization bound."""
    S = _validate_terminals(graph, terminals)
    w = _check_weights(graph, w)
    if not is_connected(graph):
        raise DisconnectedGraphError("degree profile requires a connected graph")
    degrees, _, degenerate = _degree_vector(graph, S, w)
    bound = (6 * _bucket_count(S.size) + 6) * float(w @ w)
    return DegreeProfile(
        vertices=S,
        degrees=degrees,
        total=float(degrees.sum()),
        bound=bound,
        degenerate=[int(v) for v in S[degenerate]],
    )


def _abs_quadratic(A: np.ndarray, system: LaplacianSystem, z: np.ndarray, block: int) -> float:
    """z^T |A^T L^+ A| z accumulated over column blocks (never materializes m x m)."""
    Y = system.solve_columns(A)
    total = 0.0
    m = A.shape[1]
    for lo in range(0, m, block):
        hi = min(lo + block, m)
        M = A.T @ Y[:, lo:hi]
        np.abs(M, out=M)
        M[M < ABS_ZERO_TOL] = 0.0
        total += float(z @ (M @ z[lo:hi]))
    return total


def run_elimination(
    graph: Graph,
    w,
    compute_vi: bool = True,
    block_size: int = _VI_BLOCK,
    identity_tol: float = 1e-8,
) -> EliminationTrace:
    """Run the greedy elimination loop down to two terminals.

    At every step the pivot is the terminal of minimum degree (ties broken by
    smallest vertex id, so traces are deterministic), the Laplacian is updated
    by the pivot's star-clique elimination, and with ``compute_vi`` the
    absolute quadratic form is recomputed from scratch on the shrunken system.
    Each step verifies that the eliminated rank-one term equals the pivot's
    degree to ``identity_tol`` and records the slack of the step inequality
    ``V_i <= V_{i+1} + degree``.

    With ``compute_vi=False`` only pivots and degrees are recorded (cheap mode
    for larger runs).
    """
    w = _check_weights(graph, w)
    if graph.n_vertices < 2:
        raise ValueError("elimination requires at least 2 vertices")
    if not is_connected(graph):
        raise DisconnectedGraphError("elimination requires a connected graph")
    z = w * np.sqrt(graph.conductances)
    w_norm_sq = float(w @ w)

    L_cur = laplacian_matrix(graph)
    verts = np.arange(graph.n_vertices, dtype=np.int64)
    pivots: list[int] = []
    degree_vals: list[float] = []
    rank_one_vals: list[float] = []
    v_vals: list[float] = []

    while True:
        prob_map, _ = _block_prob_map(graph, verts)
        degrees, _, _ = _degree_vector(graph, verts, w, prob_map=prob_map)
        if compute_vi:
            A = prob_map[:, graph.tails] - prob_map[:, graph.heads]
            v_vals.append(_abs_quadratic(A, LaplacianSystem(L_cur), z, block_size))
        if verts.size == 2:
            break
        k = int(np.argmin(degrees))  # first minimum = smallest id (verts sorted)
        m_i = float(L_cur[k, k])
        if m_i <= 0:
            raise LocalizationError(f"pivot diagonal {m_i:.3e} is not positive")
        q_pivot = np.abs(prob_map[k, graph.tails] - prob_map[k, graph.heads])
        rank_one = float(q_pivot @ z) ** 2 / m_i
        if abs(rank_one - float(degrees[k])) > identity_tol:
            raise LocalizationError(
                f"rank-one correction {rank_one!r} disagrees with degree "
                f"{float(degrees[k])!r} beyond {identity_tol:.0e} at step {len(pivots)}"
            )
        pivots.append(int(verts[k]))
        degree_vals.append(float(degrees[k]))
        rank_one_vals.append(rank_one)
        col = L_cur[:, k]
        L_cur = L_cur - np.outer(col, col) / m_i
        keep = np.arange(verts.size) != k
        L_cur = L_cur[np.ix_(keep, keep)]
        L_cur = (L_cur + L_cur.T) / 2.0
        verts = verts[keep]

    steps = []
    for i, pivot in enumerate(pivots):
        v_i = v_vals[i] if compute_vi else None
        slack = (v_vals[i] - v_vals[i + 1] - degree_vals[i]) if compute_vi else None
        steps.append(
            EliminationStep(
                index=i,
                pivot=pivot,
                degree_value=degree_vals[i],
                rank_one_value=rank_one_vals[i],
                v_i=v_i,
                slack=slack,
            )
        )
    return EliminationTrace(
        steps=steps,
        terminal_pair=(int(verts[0]), int(verts[1])),
        v_terminal=v_vals[-1] if compute_vi else None,
        v_initial=v_vals[0] if compute_vi else None,
        w_norm_sq=w_norm_sq,
    )


def _harmonic_sum(n: int) -> float:
    # one pigeonhole term per elimination step, at terminal sizes n, n-1, ..., 3
    return sum((6 * _bucket_count(s) + 6) / s for s in range(n, 2, -1))


def harmonic_bound_check(
    graph: Graph,
    w,
    verify_trace: bool = True,
    rel_tol: float = 1e-6,
) -> HarmonicBoundReport:
    """Compare the absolute-impedance quadratic form against the assembled
    elimination bound ``||w||^2 * (1 + sum_i (6*ceil(log2 |S_i|) + 6)/|S_i|)``.

    With ``verify_trace`` the left side is also recomputed through the full
    elimination trace and must agree with the direct streaming computation to
    ``rel_tol`` relative (two independent code paths for the same quantity).
    """
    w = _check_weights(graph, w)
    lhs = quadratic_form_abs(graph, w)
    if verify_trace:
        trace = run_elimination(graph, w)
        v0 = trace.v_initial
        if abs(v0 - lhs) > rel_tol * max(abs(lhs), 1e-30):
            raise LocalizationError(
                f"trace V_0 = {v0!r} disagrees with the direct quadratic form {lhs!r} "
                f"beyond {rel_tol:.0e} relative"
            )
        lhs = v0
    bound = float(w @ w) * (1.0 + _harmonic_sum(graph.n_vertices))
    return HarmonicBoundReport(lhs=lhs, harmonic_bound=bound, ok=bool(lhs <= bound + 1e-9))
