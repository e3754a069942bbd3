"""Data graphs of networked examples: vertices are objects, edges are examples."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    DuplicateEdge,
    EmptyGraph,
    GraphError,
    MalformedLine,
    SelfLoop,
    TooLarge,
)

TAU_LP = 1e-9
CHROMATIC_MAX_EDGES = 16


class DataGraph:
    """Immutable simple undirected graph with an ordered edge list.

    Edge ``k`` is ``edges[k] == (u, v)`` with 0-based vertex indices; the
    order is significant because every edge vector is aligned with it.
    Isolated vertices are allowed.
    """

    def __init__(self, n: int, edges: Iterable[Sequence[int]]):
        n = int(n)
        if n < 0:
            raise GraphError(f"vertex count must be nonnegative, got {n}")
        seen = set()
        clean = []
        for k, (u, v) in enumerate(edges):
            u, v = int(u), int(v)
            if u == v:
                raise SelfLoop(f"self-loop on vertex {u} (edge {k})")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {k} = ({u}, {v}) has an endpoint outside [0, {n})")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise DuplicateEdge(f"duplicate edge {{{u}, {v}}} (edge {k})")
            seen.add(key)
            clean.append((u, v))
        self._n = n
        self._edges = tuple(clean)

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> tuple:
        return self._edges

    def __repr__(self):
        return f"DataGraph(n={self.n}, m={self.m})"

    def __eq__(self, other):
        return isinstance(other, DataGraph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    @cached_property
    def eu(self) -> np.ndarray:
        arr = np.array([e[0] for e in self._edges], dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def ev(self) -> np.ndarray:
        arr = np.array([e[1] for e in self._edges], dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def degree(self) -> np.ndarray:
        deg = np.bincount(np.concatenate([self.eu, self.ev]), minlength=self.n).astype(np.int64)
        deg.setflags(write=False)
        return deg

    @property
    def max_degree(self) -> int:
        return int(self.degree.max()) if self.n else 0

    @cached_property
    def adjacency(self) -> tuple:
        """Per vertex, the ``(neighbor, edge_index)`` pairs in edge order."""
        adj = [[] for _ in range(self.n)]
        for k, (u, v) in enumerate(self._edges):
            adj[u].append((v, k))
            adj[v].append((u, k))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def incidence_csr(self) -> tuple:
        """``(ptr, idx)`` such that ``idx[ptr[i]:ptr[i+1]]`` are the edges at vertex ``i``."""
        ptr = np.zeros(self.n + 1, dtype=np.int64)
        ptr[1:] = np.cumsum(self.degree)
        idx = np.array([k for a in self.adjacency for _, k in a], dtype=np.int64)
        ptr.setflags(write=False)
        idx.setflags(write=False)
        return ptr, idx

    def incidence_matrix(self) -> np.ndarray:
        """Dense vertex-by-edge 0/1 incidence matrix."""
        inc = np.zeros((self.n, self.m))
        k = np.arange(self.m)
        inc[self.eu, k] = 1.0
        inc[self.ev, k] = 1.0
        return inc

    def vertex_sums(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        return np.bincount(self.eu, values, self.n) + np.bincount(self.ev, values, self.n)

    def permuted(self, order: Sequence[int]) -> "DataGraph":
        """Same graph with edges listed in ``order``."""
        return DataGraph(self.n, [self._edges[k] for k in order])


@dataclass(frozen=True)
class LineGraph:
    num_nodes: int
    edges: tuple
    adjacency: tuple

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    def is_complete(self) -> bool:
        return all(len(a) == self.num_nodes - 1 for a in self.adjacency)


@dataclass(frozen=True)
class GraphStats:
    num_vertices: int
    num_edges: int
    max_degree: int
    fractional_matching_number: Optional[float]
    fractional_edge_chromatic: Optional[float] = None


def parse_edge_list(text) -> DataGraph:
    """Parse the edge-list text format.

    Accepts a string or an iterable of lines. Blank lines and lines starting
    with ``#`` are skipped; the first remaining line may be a header
    ``n <count>``; every other line is ``u v``.
    """
    if isinstance(text, str):
        lines = text.splitlines()
    else:
        lines = list(text)
    n_header = None
    edges = []
    seen = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "n":
            if n_header is not None or edges:
                raise MalformedLine("header 'n <count>' must precede all edges", lineno)
            if len(tokens) != 2 or not _is_uint(tokens[1]):
                raise MalformedLine(f"bad header {line!r}", lineno)
            n_header = int(tokens[1])
            continue
        if len(tokens) != 2 or not (_is_uint(tokens[0]) and _is_uint(tokens[1])):
            raise MalformedLine(f"expected two nonnegative integers, got {line!r}", lineno)
        u, v = int(tokens[0]), int(tokens[1])
        if u == v:
            raise SelfLoop(f"self-loop on vertex {u}", lineno)
        if n_header is not None and max(u, v) >= n_header:
            raise MalformedLine(f"vertex {max(u, v)} out of range for n = {n_header}", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"edge {{{u}, {v}}} already listed on line {seen[key]}", lineno)
        seen[key] = lineno
        edges.append((u, v))
    if n_header is None:
        if not edges:
            raise EmptyGraph("edge list has neither edges nor an 'n' header")
        n = 1 + max(max(e) for e in edges)
    else:
        n = n_header
    return DataGraph(n, edges)


def _is_uint(token: str) -> bool:
    return token.isascii() and token.isdigit()


def format_edge_list(g: DataGraph) -> str:
    lines = [f"n {g.n}"] + [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def line_graph(g: DataGraph) -> LineGraph:
    adj = [[] for _ in range(g.m)]
    pairs = []
    for a in g.adjacency:
        ks = [k for _, k in a]
        for x, y in itertools.combinations(ks, 2):
            lo, hi = min(x, y), max(x, y)
            pairs.append((lo, hi))
    # two distinct edges of a simple graph share at most one vertex
    pairs.sort()
    for x, y in pairs:
        adj[x].append(y)
        adj[y].append(x)
    return LineGraph(g.m, tuple(pairs), tuple(tuple(sorted(a)) for a in adj))


def fractional_matching_number(g: DataGraph) -> float:
    """nu*(G): max sum of edge weights with every vertex sum <= 1."""
    from .solver.lp import solve_lp

    if g.m == 0:
        raise EmptyGraph("fractional matching number of a graph without edges")
    res = solve_lp(-np.ones(g.m), A_ub=g.incidence_matrix(), b_ub=np.ones(g.n))
    return -res.value


def matchings(g: DataGraph, maximal_only: bool = False) -> list:
    """All nonempty matchings of ``g`` as tuples of edge indices (exponential)."""
    out = []
    m = g.m
    eu, ev = g.eu, g.ev

    def extend(k, used, chosen):
        if k == m:
            if not chosen:
                return
            if maximal_only and any(
                eu[j] not in used and ev[j] not in used for j in range(m)
            ):
                return
            out.append(tuple(chosen))
            return
        u, v = eu[k], ev[k]
        if u not in used and v not in used:
            used.add(u)
            used.add(v)
            chosen.append(k)
            extend(k + 1, used, chosen)
            chosen.pop()
            used.discard(u)
            used.discard(v)
        extend(k + 1, used, chosen)

    extend(0, set(), [])
    return out


def fractional_edge_chromatic(g: DataGraph, max_edges: int = CHROMATIC_MAX_EDGES) -> float:
    """chi*(D_G) by the covering LP over all maximal matchings of ``g``."""
    from .solver.lp import solve_lp

    if g.m > max_edges:
        raise TooLarge(f"fractional edge chromatic number needs m <= {max_edges}, got m = {g.m}")
    if g.m == 0:
        return 0.0
    ms = matchings(g, maximal_only=True)
    cover = np.zeros((g.m, len(ms)))
    for j, mt in enumerate(ms):
        cover[list(mt), j] = 1.0
    res = solve_lp(np.ones(len(ms)), A_ub=-cover, b_ub=-np.ones(g.m))
    return res.value


def graph_stats(g: DataGraph, compute_chromatic: bool = True,
                max_edges: int = CHROMATIC_MAX_EDGES) -> GraphStats:
    nu = fractional_matching_number(g) if g.m else 0.0
    chi = fractional_edge_chromatic(g, max_edges) if compute_chromatic else None
    return GraphStats(g.n, g.m, g.max_degree, nu, chi)


def greedy_matching_size(g: DataGraph) -> int:
    used = set()
    size = 0
    for u, v in g.edges:
        if u not in used and v not in used:
            used.update((u, v))
            size += 1
    return size


def disjoint_union(*graphs: DataGraph) -> DataGraph:
    edges, offset = [], 0
    for h in graphs:
        edges.extend((u + offset, v + offset) for u, v in h.edges)
        offset += h.n
    return DataGraph(offset, edges)


# -- families used throughout the tests and the CLI -------------------------

def complete_graph(n: int) -> DataGraph:
    return DataGraph(n, itertools.combinations(range(n), 2))


def star_graph(k: int) -> DataGraph:
    """Center 0 joined to leaves 1..k."""
    return DataGraph(k + 1, [(0, i) for i in range(1, k + 1)])


def path_graph(n: int) -> DataGraph:
    return DataGraph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> DataGraph:
    return DataGraph(n, [(i, (i + 1) % n) for i in range(n)])


def disjoint_edges(k: int) -> DataGraph:
    return DataGraph(2 * k, [(2 * i, 2 * i + 1) for i in range(k)])


def star_plus_matching(m: int) -> DataGraph:
    """m/2 disjoint edges followed by an m/2-edge star.

    Matching edges come first: ``(2i, 2i+1)`` for ``i < m/2``; the star has
    center ``m`` and leaves ``m+1 .. m+m/2``.
    """
    if m < 2 or m % 2:
        raise GraphError(f"star_plus_matching needs an even m >= 2, got {m}")
    k = m // 2
    center = m
    edges = [(2 * i, 2 * i + 1) for i in range(k)]
    edges += [(center, center + 1 + i) for i in range(k)]
    return DataGraph(m + 1 + k, edges)


def star_plus_matching_distribution(m: int) -> np.ndarray:
    """Hand-built distribution for :func:`star_plus_matching`: 2/(m+2) on the
    disjoint edges, 4/(m(m+2)) on the star edges."""
    k = m // 2
    return np.concatenate([np.full(k, 2.0 / (m + 2)), np.full(k, 4.0 / (m * (m + 2)))])


def match_star_plus_matching(g: DataGraph) -> Optional[np.ndarray]:
    """If ``g`` is (up to labels and edge order) a k-star plus k disjoint edges
    with k >= 2, return the hand-built distribution aligned with ``g.edges``."""
    m = g.m
    if m < 4 or m % 2:
        return None
    k = m // 2
    deg = g.degree
    centers = np.flatnonzero(deg == k)
    if len(centers) != 1:
        return None
    c = int(centers[0])
    star_edges = {e for _, e in g.adjacency[c]}
    p = np.empty(m)
    for e, (u, v) in enumerate(g.edges):
        if e in star_edges:
            other = v if u == c else u
            if deg[other] != 1:
                return None
            p[e] = 4.0 / (m * (m + 2))
        else:
            if deg[u] != 1 or deg[v] != 1:
                return None
            p[e] = 2.0 / (m + 2)
    return p


def enumerate_connected_graphs(max_vertices: int, min_edges: int = 1,
                               max_edges: Optional[int] = None) -> list:
    """One representative per isomorphism class of connected graphs with
    2..max_vertices vertices (no isolated vertices) and edge count in range.

    Brute force over edge subsets of K_n with canonical forms under all
    vertex permutations; intended for n <= 6.
    """
    if max_vertices > 6:
        raise TooLarge("graph enumeration is limited to 6 vertices")
    reps = []
    for n in range(2, max_vertices + 1):
        all_pairs = list(itertools.combinations(range(n), 2))
        perms = list(itertools.permutations(range(n)))
        seen = set()
        hi = len(all_pairs) if max_edges is None else min(max_edges, len(all_pairs))
        for m in range(max(min_edges, n - 1), hi + 1):
            for subset in itertools.combinations(all_pairs, m):
                if not _connected(n, subset):
                    continue
                canon = min(
                    tuple(sorted(tuple(sorted((p[u], p[v]))) for u, v in subset))
                    for p in perms
                )
                if canon in seen:
                    continue
                seen.add(canon)
                reps.append(DataGraph(n, canon))
    return reps


def _connected(n: int, edges) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent[find(u)] = find(v)
    return len({find(i) for i in range(n)}) == 1


def is_connected(g: DataGraph) -> bool:
    return g.n > 0 and _connected(g.n, g.edges)


__all__ = [
    "DataGraph", "LineGraph", "GraphStats", "TAU_LP", "CHROMATIC_MAX_EDGES",
    "parse_edge_list", "format_edge_list", "line_graph",
    "fractional_matching_number", "fractional_edge_chromatic", "graph_stats",
    "matchings", "greedy_matching_size", "disjoint_union",
    "complete_graph", "star_graph", "path_graph", "cycle_graph", "disjoint_edges",
    "star_plus_matching", "star_plus_matching_distribution", "match_star_plus_matching",
    "enumerate_connected_graphs", "is_connected",
]
