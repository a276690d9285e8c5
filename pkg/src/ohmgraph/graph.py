"""Weighted multigraph model, graph-family generators, and edge-list I/O.

Vertices are dense integer ids ``0..n-1``.  Every edge carries a fixed
orientation ``(tail, head)`` assigned at construction and a positive
conductance.  Parallel edges are kept as distinct edge instances; self-loops
are rejected at input.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Graph",
    "GraphFormatError",
    "build_graph",
    "incidence_apply",
    "incidence_transpose_apply",
    "laplacian_matrix",
    "weighted_adjacency",
    "generate_family",
    "parse_family_spec",
    "parallel_paths",
    "torus",
    "hypercube",
    "random_regular_expander",
    "path",
    "complete",
    "erdos_renyi",
    "read_graph",
    "write_graph",
    "bfs_distance",
    "is_connected",
]


class GraphFormatError(ValueError):
    """An edge-list file could not be parsed."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable weighted multigraph with oriented edges.

    ``tails``/``heads``/``conductances`` are parallel arrays indexed by edge;
    the orientation ``tail -> head`` never changes after construction, so
    every edge-indexed vector in the library shares one consistent sign
    convention.
    """

    n_vertices: int
    tails: np.ndarray
    heads: np.ndarray
    conductances: np.ndarray

    @property
    def n_edges(self) -> int:
        return int(self.tails.shape[0])

    @property
    def is_unweighted(self) -> bool:
        """True when every conductance is exactly 1."""
        return bool(np.all(self.conductances == 1.0))

    def edge_list(self) -> list[tuple[int, int, float]]:
        """Edges as ``(tail, head, conductance)`` tuples, in stored order."""
        return [
            (int(t), int(h), float(c))
            for t, h, c in zip(self.tails, self.heads, self.conductances)
        ]


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def build_graph(edges, n_vertices: int | None = None) -> Graph:
    """Build a :class:`Graph` from ``(tail, head, conductance)`` triples.

    Edge order and orientation follow the input.  Rejects self-loops,
    non-positive or non-finite conductances, and out-of-range ids.  When
    ``n_vertices`` is omitted it is inferred as ``max id + 1``.
    """
    edges = list(edges)
    if not edges and n_vertices is None:
        raise ValueError("cannot infer vertex count from an empty edge list")
    tails = np.empty(len(edges), dtype=np.int64)
    heads = np.empty(len(edges), dtype=np.int64)
    conds = np.empty(len(edges), dtype=np.float64)
    for i, edge in enumerate(edges):
        try:
            t, h, c = edge
        except (TypeError, ValueError):
            raise ValueError(f"edge {i}: expected a (tail, head, conductance) triple, got {edge!r}")
        t, h, c = int(t), int(h), float(c)
        if t == h:
            raise ValueError(f"edge {i}: self-loop at vertex {t} is not allowed")
        if t < 0 or h < 0:
            raise ValueError(f"edge {i}: negative vertex id in ({t}, {h})")
        if not math.isfinite(c) or c <= 0.0:
            raise ValueError(f"edge {i}: conductance must be a positive finite real, got {c}")
        tails[i], heads[i], conds[i] = t, h, c
    max_id = int(max(tails.max(), heads.max())) if edges else -1
    if n_vertices is None:
        n_vertices = max_id + 1
    elif n_vertices <= max_id:
        raise ValueError(f"vertex id {max_id} out of range for n_vertices={n_vertices}")
    return Graph(int(n_vertices), _freeze(tails), _freeze(heads), _freeze(conds))


def incidence_apply(graph: Graph, x) -> np.ndarray:
    """Apply the signed incidence matrix: ``(Bx)_e = x[tail] - x[head]``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (graph.n_vertices,):
        raise ValueError(f"expected a vertex vector of length {graph.n_vertices}, got shape {x.shape}")
    return x[graph.tails] - x[graph.heads]


def incidence_transpose_apply(graph: Graph, f) -> np.ndarray:
    """Apply the transposed incidence matrix: net out-flow minus in-flow per vertex."""
    f = np.asarray(f, dtype=float)
    if f.shape != (graph.n_edges,):
        raise ValueError(f"expected an edge vector of length {graph.n_edges}, got shape {f.shape}")
    out = np.bincount(graph.tails, weights=f, minlength=graph.n_vertices)
    inc = np.bincount(graph.heads, weights=f, minlength=graph.n_vertices)
    return out - inc


def laplacian_matrix(graph: Graph) -> np.ndarray:
    """Dense weighted Laplacian (conductance-weighted incidence Gram matrix)."""
    n = graph.n_vertices
    t, h, c = graph.tails, graph.heads, graph.conductances
    L = np.zeros((n, n))
    np.add.at(L, (t, t), c)
    np.add.at(L, (h, h), c)
    np.add.at(L, (t, h), -c)
    np.add.at(L, (h, t), -c)
    return L


def weighted_adjacency(graph: Graph) -> np.ndarray:
    """Dense symmetric adjacency with parallel-edge conductances summed."""
    n = graph.n_vertices
    A = np.zeros((n, n))
    np.add.at(A, (graph.tails, graph.heads), graph.conductances)
    np.add.at(A, (graph.heads, graph.tails), graph.conductances)
    return A


# ---------------------------------------------------------------------------
# generators


def path(n: int) -> Graph:
    """Path on ``n`` vertices with unit conductances."""
    if n < 2:
        raise ValueError("path requires n >= 2")
    return build_graph([(i, i + 1, 1.0) for i in range(n - 1)])


def complete(n: int) -> Graph:
    """Complete graph on ``n`` vertices with unit conductances."""
    if n < 2:
        raise ValueError("complete requires n >= 2")
    return build_graph([(i, j, 1.0) for i in range(n) for j in range(i + 1, n)])


def torus(side: int) -> Graph:
    """``side x side`` grid with wraparound; 2*side^2 unit edges.

    Vertex ``(r, c)`` has id ``r*side + c``; each vertex emits one edge to its
    right and one to its lower neighbour (mod ``side``), so ``side=2`` yields
    parallel edges, which are kept.
    """
    if side < 2:
        raise ValueError("torus requires side >= 2")
    edges = []
    for r in range(side):
        for c in range(side):
            v = r * side + c
            edges.append((v, r * side + (c + 1) % side, 1.0))
            edges.append((v, ((r + 1) % side) * side + c, 1.0))
    return build_graph(edges, n_vertices=side * side)


def hypercube(dim: int) -> Graph:
    """Boolean hypercube of dimension ``dim`` with unit conductances."""
    if dim < 1:
        raise ValueError("hypercube requires dim >= 1")
    edges = []
    for v in range(1 << dim):
        for b in range(dim):
            u = v ^ (1 << b)
            if v < u:
                edges.append((v, u, 1.0))
    return build_graph(edges, n_vertices=1 << dim)


def parallel_paths(k: int) -> Graph:
    """One direct edge between two hubs plus ``k`` disjoint hub-to-hub paths of length ``k``.

    Vertices: hub ``u=0``, hub ``v=1``, then ``k-1`` interior vertices per
    path, so ``n = 2 + k*(k-1)`` and ``m = k*k + 1``.  Edge 0 is the direct
    ``u-v`` edge; the edges of path ``j`` occupy indices ``1 + j*k .. k + j*k``
    in hub-to-hub order.
    """
    if k < 1:
        raise ValueError("parallel_paths requires k >= 1")
    u, v = 0, 1
    edges = [(u, v, 1.0)]
    nxt = 2
    for _ in range(k):
        prev = u
        for step in range(k - 1):
            edges.append((prev, nxt, 1.0))
            prev = nxt
            nxt += 1
        edges.append((prev, v, 1.0))
    return build_graph(edges, n_vertices=2 + k * (k - 1))


def erdos_renyi(n: int, p: float, seed: int = 0) -> Graph:
    """G(n, p) sample with unit conductances; may be disconnected."""
    if n < 2:
        raise ValueError("erdos_renyi requires n >= 2")
    if not 0.0 < p <= 1.0:
        raise ValueError("erdos_renyi requires p in (0, 1]")
    rng = np.random.default_rng(seed)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append((i, j, 1.0))
    return build_graph(edges, n_vertices=n)


def random_regular_expander(n: int, d: int, seed: int = 0, max_tries: int = 1000) -> Graph:
    """Random ``d``-regular graph as a union of ``d`` perfect matchings.

    Matchings that would duplicate an existing edge are resampled, and the
    whole construction is retried until the result is connected, so output
    is simple, ``d``-regular, connected, and deterministic per seed.
    """
    if n < 4 or n % 2 != 0:
        raise ValueError("random_regular_expander requires even n >= 4")
    if d < 2:
        raise ValueError("random_regular_expander requires d >= 2")
    if d >= n:
        raise ValueError("random_regular_expander requires d < n")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        seen: set[tuple[int, int]] = set()
        edges: list[tuple[int, int, float]] = []
        ok = True
        for _ in range(d):
            for _ in range(max_tries):
                perm = rng.permutation(n)
                pairs = [tuple(sorted((int(perm[2 * i]), int(perm[2 * i + 1])))) for i in range(n // 2)]
                if len(set(pairs)) == len(pairs) and not any(p in seen for p in pairs):
                    seen.update(pairs)
                    edges.extend((a, b, 1.0) for a, b in pairs)
                    break
            else:
                ok = False
                break
        if not ok:
            continue
        g = build_graph(edges, n_vertices=n)
        if is_connected(g):
            return g
    raise ValueError(f"failed to sample a connected {d}-regular graph on {n} vertices")


_FAMILIES = {
    "parallel_paths": (parallel_paths, "k"),
    "torus": (torus, "n"),
    "hypercube": (hypercube, "d"),
    "expander": (random_regular_expander, "n d [seed]"),
    "random_regular_expander": (random_regular_expander, "n d [seed]"),
    "path": (path, "n"),
    "complete": (complete, "n"),
    "erdos_renyi": (erdos_renyi, "n p [seed]"),
    "triangle": (lambda: complete(3), ""),
}


def generate_family(name: str, *params) -> Graph:
    """Dispatch to a named generator; see :data:`_FAMILIES` for the catalogue."""
    if name not in _FAMILIES:
        known = ", ".join(sorted(_FAMILIES))
        raise ValueError(f"unknown graph family {name!r} (known: {known})")
    builder, _ = _FAMILIES[name]
    return builder(*params)


def parse_family_spec(spec: str) -> Graph:
    """Parse a colon-separated family spec such as ``torus:8`` or ``expander:64:4:7``.

    An optional ``family:`` prefix is accepted.  The second argument of
    ``erdos_renyi`` parses as a float, everything else as integers.
    """
    body = spec.removeprefix("family:")
    parts = body.split(":")
    name, raw_args = parts[0], parts[1:]
    if name not in _FAMILIES:
        known = ", ".join(sorted(_FAMILIES))
        raise ValueError(f"unknown graph family {name!r} in spec {spec!r} (known: {known})")
    args: list = []
    for pos, token in enumerate(raw_args):
        try:
            if name == "erdos_renyi" and pos == 1:
                args.append(float(token))
            else:
                args.append(int(token))
        except ValueError:
            raise ValueError(f"bad parameter {token!r} in family spec {spec!r}")
    try:
        return generate_family(name, *args)
    except TypeError:
        _, usage = _FAMILIES[name]
        raise ValueError(f"family {name!r} expects parameters: {usage or '(none)'}")


# ---------------------------------------------------------------------------
# edge-list I/O

# Format: one `tail head conductance` per line, single spaces, `#` comments;
# vertex count is max id + 1; conductances round-trip exactly via repr.


def read_graph(path_: str) -> Graph:
    """Read a graph from the edge-list text format."""
    edges = []
    with open(path_, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise GraphFormatError(
                    f"{path_}:{lineno}: expected 'tail head conductance', got {raw.rstrip()!r}"
                )
            try:
                t, h, c = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise GraphFormatError(f"{path_}:{lineno}: could not parse fields in {raw.rstrip()!r}")
            if t == h:
                raise GraphFormatError(f"{path_}:{lineno}: self-loop at vertex {t}")
            if t < 0 or h < 0:
                raise GraphFormatError(f"{path_}:{lineno}: negative vertex id")
            if not math.isfinite(c) or c <= 0.0:
                raise GraphFormatError(f"{path_}:{lineno}: conductance must be positive, got {parts[2]}")
            edges.append((t, h, c))
    if not edges:
        raise GraphFormatError(f"{path_}: no edges found")
    return build_graph(edges)


def write_graph(graph: Graph, path_: str) -> None:
    """Write the edge-list text format; read_graph(write_graph(g)) == g."""
    with open(path_, "w", encoding="utf-8") as fh:
        for t, h, c in graph.edge_list():
            fh.write(f"{t} {h} {c!r}\n")


# ---------------------------------------------------------------------------
# traversal


def _adjacency_lists(graph: Graph) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(graph.n_vertices)]
    for t, h in zip(graph.tails, graph.heads):
        adj[t].append(int(h))
        adj[h].append(int(t))
    return adj


def bfs_distance(graph: Graph, u: int, v: int) -> int | float:
    """Unweighted hop count from ``u`` to ``v``; ``math.inf`` when unreachable."""
    n = graph.n_vertices
    if not (0 <= u < n and 0 <= v < n):
        raise ValueError(f"vertex ids ({u}, {v}) out of range for n={n}")
    if u == v:
        return 0
    adj = _adjacency_lists(graph)
    dist = np.full(n, -1, dtype=np.int64)
    dist[u] = 0
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                if y == v:
                    return int(dist[y])
                queue.append(y)
    return math.inf


def is_connected(graph: Graph) -> bool:
    """BFS reachability of every vertex from vertex 0."""
    n = graph.n_vertices
    if n <= 1:
        return True
    adj = _adjacency_lists(graph)
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if not seen[y]:
                seen[y] = True
                count += 1
                queue.append(y)
    return count == n
