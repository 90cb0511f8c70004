"""
Graph metric, open balls and exhaustions.

Balls are OPEN throughout: B(x, r) = {y : d(x, y) < r}, so B(x, 0) is empty
and B(x, 1) = {x}. Many graph libraries use closed balls; do not mix them.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np
from scipy.sparse.csgraph import shortest_path

from src.common.errors import BadRadiusSequence, ComplementEmpty, InputError
from src.graph_core.graph import WeightedGraph, build_graph

logger = logging.getLogger(__name__)


def distances(g: WeightedGraph, x: int) -> np.ndarray:
    """Hop distances from x to every vertex (canonical order)."""
    source = g.position(x)
    dist = shortest_path(g.conductance_matrix, unweighted=True, indices=source)
    return np.asarray(dist, dtype=float)


def ball(g: WeightedGraph, x: int, r: int) -> tuple[int, ...]:
    if r <= 0:
        g.position(x)
        return ()
    dist = distances(g, x)
    return tuple(v for v, d in zip(g.vertices, dist) if d < r)


def eccentricity(g: WeightedGraph, x: int) -> int:
    return int(distances(g, x).max())


def diameter(g: WeightedGraph) -> int:
    dist = shortest_path(g.conductance_matrix, unweighted=True)
    return int(dist.max())


def induced_subgraph(g: WeightedGraph, vertex_set: Iterable[int]) -> WeightedGraph:
    """Subgraph on vertex_set with conductances inherited; must be connected."""
    keep = set(vertex_set)
    for v in keep:
        g.position(v)
    edges = [(u, v, c) for u, v, c in g.edges if u in keep and v in keep]
    return build_graph(edges, vertices=keep, corners=g.corners)


def outer_boundary(g: WeightedGraph, vertex_set: Iterable[int]) -> tuple[int, ...]:
    """Vertices outside the set with a neighbour inside it."""
    inside = set(vertex_set)
    return tuple(sorted({w for v in inside for w, _ in g.neighbors(v) if w not in inside}))


def default_origin(g: WeightedGraph) -> int:
    """First flagged corner when the family has one, otherwise the smallest id."""
    return g.corners[0] if g.corners else g.vertices[0]


def eps_index(eps: float, level: int) -> int:
    """Integer part of eps * N, clamped to at least 1."""
    return max(1, math.floor(eps * level + 1e-12))


@dataclass(frozen=True)
class GraphExhaustion:
    mother: WeightedGraph
    origin: int
    radii: tuple[int, ...]
    subgraphs: tuple[WeightedGraph, ...]
    volumes: tuple[float, ...] | None = None
    time_scales: tuple[float, ...] | None = None

    @property
    def levels(self) -> range:
        """1-based level indices."""
        return range(1, len(self.radii) + 1)

    def radius(self, level: int) -> int:
        return self.radii[level - 1]

    def subgraph(self, level: int) -> WeightedGraph:
        return self.subgraphs[level - 1]

    def eps_radius(self, eps: float, level: int) -> int:
        return self.radius(eps_index(eps, level))

    def with_scales(self, volumes: Iterable[float], time_scales: Iterable[float]) -> "GraphExhaustion":
        volumes = tuple(float(v) for v in volumes)
        time_scales = tuple(float(t) for t in time_scales)
        if len(volumes) != len(self.radii) or len(time_scales) != len(self.radii):
            raise InputError("Scale table must have one entry per level.")
        for name, seq in (("volumes", volumes), ("time_scales", time_scales)):
            if any(v <= 0 for v in seq) or any(b <= a for a, b in zip(seq, seq[1:])):
                raise InputError(f"Scale table {name} must be positive and strictly increasing.")
        return replace(self, volumes=volumes, time_scales=time_scales)


def exhaust(g: WeightedGraph, o: int, radii: Iterable[int]) -> GraphExhaustion:
    radii = tuple(radii)
    if not radii or radii[0] != 1:
        raise BadRadiusSequence(f"Radii must start at 1, got {radii}.")
    if any(int(r) != r for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise BadRadiusSequence(f"Radii must be strictly increasing integers, got {radii}.")

    dist = distances(g, o)
    subgraphs = []
    for r in radii:
        members = [v for v, d in zip(g.vertices, dist) if d < r]
        subgraphs.append(induced_subgraph(g, members))
    logger.info(
        f"Exhaustion from origin {o}: ball sizes {[sub.n for sub in subgraphs]}."
    )
    return GraphExhaustion(mother=g, origin=o, radii=tuple(int(r) for r in radii), subgraphs=tuple(subgraphs))


def probe_points(ex: GraphExhaustion, level: int) -> dict[str, int]:
    """
    Default probe set on level N: the origin, a deep-interior vertex (largest
    distance to the outer boundary of the ball) and a near-boundary vertex
    (smallest such distance, ties to the smallest id).
    """
    sub = ex.subgraph(level)
    rim = outer_boundary(ex.mother, sub.vertices)
    if not rim:
        raise ComplementEmpty(f"Level {level} ball covers the whole mother graph.")
    dist = shortest_path(ex.mother.conductance_matrix, unweighted=True, indices=ex.mother.positions(rim))
    to_rim = dist.min(axis=0)[ex.mother.positions(sub.vertices)]
    deep = sub.vertices[int(np.argmax(to_rim))]
    near = sub.vertices[int(np.argmin(to_rim))]
    return {"origin": ex.origin, "interior": deep, "near_boundary": near}
