import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import networkx as nx
import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from src.common.errors import (
    DisconnectedGraph,
    DuplicateEdge,
    NonpositiveConductance,
    SelfLoop,
    UnknownVertex,
)

logger = logging.getLogger(__name__)

Edge = tuple[int, int, float]


@dataclass(frozen=True)
class WeightedGraph:
    """
    Finite connected graph with positive edge conductances.

    Vertices are opaque integer ids kept in sorted (canonical) order; every
    matrix or vector attached to the graph is indexed by position in that
    order. Edges are stored once with u < v. Build instances through
    `build_graph`, which enforces the invariants.
    """
    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]
    corners: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self.index

    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def index(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def adjacency(self) -> dict[int, tuple[tuple[int, float], ...]]:
        adj: dict[int, list[tuple[int, float]]] = {v: [] for v in self.vertices}
        for u, v, c in self.edges:
            adj[u].append((v, c))
            adj[v].append((u, c))
        return {v: tuple(sorted(nbrs)) for v, nbrs in adj.items()}

    @cached_property
    def weights(self) -> np.ndarray:
        """c_x for every vertex, in canonical order."""
        return np.array(
            [math.fsum(c for _, c in self.adjacency[v]) for v in self.vertices],
            dtype=float,
        )

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(tail positions, head positions, conductances) over the edge list."""
        if not self.edges:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy(), np.zeros(0)
        tails = np.array([self.index[u] for u, _, _ in self.edges], dtype=np.int64)
        heads = np.array([self.index[v] for _, v, _ in self.edges], dtype=np.int64)
        conductances = np.array([c for _, _, c in self.edges], dtype=float)
        return tails, heads, conductances

    @cached_property
    def conductance_matrix(self) -> sp.csr_matrix:
        tails, heads, cond = self.edge_arrays
        rows = np.concatenate([tails, heads])
        cols = np.concatenate([heads, tails])
        data = np.concatenate([cond, cond])
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def laplacian(self) -> sp.csr_matrix:
        """L = D - C, symmetric positive semidefinite."""
        return (sp.diags(self.weights) - self.conductance_matrix).tocsr()

    def position(self, v: int) -> int:
        try:
            return self.index[v]
        except KeyError:
            raise UnknownVertex(f"Vertex {v!r} is not in the graph.") from None

    def positions(self, vertices: Iterable[int]) -> np.ndarray:
        return np.array([self.position(v) for v in vertices], dtype=np.int64)

    def neighbors(self, v: int) -> tuple[tuple[int, float], ...]:
        self.position(v)
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def weight(self, v: int) -> float:
        return float(self.weights[self.position(v)])

    def conductance(self, u: int, v: int) -> float:
        for w, c in self.neighbors(u):
            if w == v:
                return c
        return 0.0

    def volume(self, vertex_set: Iterable[int] | None = None) -> float:
        """Measure volume V(A) = sum of c_x over A (whole graph when A is None)."""
        if vertex_set is None:
            return math.fsum(self.weights)
        return math.fsum(self.weights[self.positions(vertex_set)])

    def recompute_weights_match(self) -> bool:
        recomputed = [math.fsum(c for _, c in self.adjacency[v]) for v in self.vertices]
        return all(a == b for a, b in zip(recomputed, self.weights))

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_weighted_edges_from(self.edges, weight="c")
        return graph


def build_graph(
    edge_list: Iterable[tuple[int, int, float]],
    vertices: Iterable[int] | None = None,
    corners: Iterable[int] = (),
) -> WeightedGraph:
    """
    Validate an edge list and return the canonical WeightedGraph.

    `vertices` is only needed for graphs that have a vertex with no edges,
    i.e. the single-vertex graph; every id it names must be connected.
    """
    seen: dict[tuple[int, int], float] = {}
    vertex_set = set(vertices) if vertices is not None else set()
    for u, v, c in edge_list:
        u, v, c = int(u), int(v), float(c)
        if u == v:
            raise SelfLoop(f"Self-loop at vertex {u}.")
        if not c > 0 or not math.isfinite(c):
            raise NonpositiveConductance(f"Edge ({u}, {v}) has conductance {c}.")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise DuplicateEdge(f"Edge {key} listed more than once.")
        seen[key] = c
        vertex_set.update(key)

    if not vertex_set:
        raise DisconnectedGraph("Graph has no vertices.")

    graph = WeightedGraph(
        vertices=tuple(sorted(vertex_set)),
        edges=tuple((u, v, c) for (u, v), c in sorted(seen.items())),
        corners=tuple(v for v in corners if v in vertex_set),
    )
    n_components, _ = connected_components(graph.conductance_matrix, directed=False)
    if n_components != 1:
        raise DisconnectedGraph(f"Graph splits into {n_components} components.")
    logger.debug(f"Built graph with {graph.n} vertices and {len(graph.edges)} edges.")
    return graph
