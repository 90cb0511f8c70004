"""Exit, hitting and commute times of the jump chain P(x, y) = c_xy / c_x."""
import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from src.common.errors import ComplementEmpty, EmptySet, SameVertex
from src.graph_core.graph import WeightedGraph
from src.potential_theory.harmonic import effective_resistance_between
from src.potential_theory.linalg import DEFAULT_TOL, sparse_solve

logger = logging.getLogger(__name__)


def _killed_block(g: WeightedGraph, vertex_set: Iterable[int]):
    positions = np.unique(g.positions(vertex_set))
    if positions.size == 0:
        raise EmptySet("Vertex set is empty.")
    if positions.size == g.n:
        raise ComplementEmpty("The walk never leaves the whole vertex set.")
    block = g.laplacian[positions][:, positions]
    return positions, block


@dataclass(frozen=True)
class GreenFunction:
    """G^A(x, y): expected visits to y before leaving A, started at x."""
    graph: WeightedGraph
    vertices: tuple[int, ...]
    matrix: np.ndarray

    def __call__(self, x: int, y: int) -> float:
        idx = {v: i for i, v in enumerate(self.vertices)}
        return float(self.matrix[idx[x], idx[y]])

    def reversibility_residual(self) -> float:
        weights = self.graph.weights[self.graph.positions(self.vertices)]
        weighted = weights[:, None] * self.matrix
        return float(np.abs(weighted - weighted.T).max())


def green_function(g: WeightedGraph, vertex_set: Iterable[int], tol: float = DEFAULT_TOL) -> GreenFunction:
    # (I - P_A)^{-1} = (D_A - C_AA)^{-1} D_A
    positions, block = _killed_block(g, vertex_set)
    rhs = np.diag(g.weights[positions])
    matrix, _ = sparse_solve(block, rhs, tol)
    return GreenFunction(g, tuple(g.vertices[i] for i in positions), matrix)


def exit_times(g: WeightedGraph, vertex_set: Iterable[int], tol: float = DEFAULT_TOL) -> dict[int, float]:
    """Mean exit time from A for every start in A: (I - P) t = 1 on A."""
    positions, block = _killed_block(g, vertex_set)
    times, residual = sparse_solve(block, g.weights[positions], tol)
    logger.debug(f"Exit-time solve on {positions.size} vertices, residual {residual:.2e}.")
    return {g.vertices[i]: float(t) for i, t in zip(positions, times)}


def mean_exit_time(g: WeightedGraph, x: int, vertex_set: Iterable[int], tol: float = DEFAULT_TOL) -> float:
    vertex_set = set(vertex_set)
    g.position(x)
    if x not in vertex_set:
        return 0.0
    return exit_times(g, vertex_set, tol)[x]


def hitting_time(g: WeightedGraph, x: int, target: Iterable[int], tol: float = DEFAULT_TOL) -> float:
    target = set(target)
    if not target:
        raise EmptySet("Target set is empty.")
    g.position(x)
    if x in target:
        return 0.0
    return exit_times(g, [v for v in g.vertices if v not in target], tol)[x]


@dataclass(frozen=True)
class CommuteTime:
    forward: float
    backward: float
    commute: float
    identity: float
    residual: float


def commute_time(g: WeightedGraph, y: int, z: int, tol: float = DEFAULT_TOL) -> CommuteTime:
    """E^y[T_z] + E^z[T_y] next to V(G) * R_eff(y, z)."""
    if y == z:
        raise SameVertex("Commute time needs two distinct vertices.")
    forward = hitting_time(g, y, {z}, tol)
    backward = hitting_time(g, z, {y}, tol)
    commute = forward + backward
    identity = g.volume() * effective_resistance_between(g, y, z, tol)
    residual = abs(commute - identity) / max(identity, 1.0)
    return CommuteTime(forward, backward, commute, identity, residual)
