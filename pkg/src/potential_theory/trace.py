"""
Trace of the walk on a boundary set: eliminate the interior harmonically
(a Schur complement of the Laplacian) and keep boundary-to-boundary
conductances c_hat(a, b) = sum_y c_ay h^b(y).
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from src.common.errors import BoundaryEdgePresent, ComplementEmpty, EmptyBoundary, MissingValue
from src.graph_core.graph import WeightedGraph
from src.potential_theory.harmonic import dirichlet_energy, harmonic_basis
from src.potential_theory.linalg import DEFAULT_TOL

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TraceNetwork:
    graph: WeightedGraph
    boundary: tuple[int, ...]
    conductances: np.ndarray
    basis: np.ndarray

    @property
    def kernel(self) -> np.ndarray:
        """p_tilde(a, b) = c_hat(a, b) / c_a."""
        weights = self.graph.weights[self.graph.positions(self.boundary)]
        return self.conductances / weights[:, None]

    def c_hat(self, a: int, b: int) -> float:
        i, j = self.boundary.index(a), self.boundary.index(b)
        return float(self.conductances[i, j])

    def row_sum_residual(self) -> float:
        weights = self.graph.weights[self.graph.positions(self.boundary)]
        return float(np.abs(self.conductances.sum(axis=1) - weights).max())

    def partition_of_unity_residual(self) -> float:
        return float(np.abs(self.basis.sum(axis=1) - 1.0).max())

    def boundary_vector(self, values: Mapping[int, float] | Iterable[float]) -> np.ndarray:
        if isinstance(values, Mapping):
            try:
                return np.array([values[a] for a in self.boundary], dtype=float)
            except KeyError as e:
                raise MissingValue(f"No boundary value for vertex {e}.") from None
        vector = np.asarray(list(values), dtype=float)
        if vector.shape != (len(self.boundary),):
            raise MissingValue("One value per boundary vertex is required.")
        return vector

    def extend(self, values) -> np.ndarray:
        """Harmonic extension of boundary data to the whole graph."""
        return self.basis @ self.boundary_vector(values)

    def energy(self, values) -> float:
        """Tr E(g') = 1/2 sum_{a,b} c_hat(a, b) (g'(a) - g'(b))^2."""
        v = self.boundary_vector(values)
        return 0.5 * math.fsum((self.conductances * (v[:, None] - v[None, :]) ** 2).ravel())

    def energy_residual(self, values) -> float:
        """|Tr E(g') - E(h_g')| for the harmonic extension h_g'."""
        return abs(self.energy(values) - dirichlet_energy(self.graph, self.extend(values)))

    def flow(self, values, a: int) -> float:
        """i_h(a) through the reduced network: sum_b c_hat(a, b) (h(b) - h(a))."""
        v = self.boundary_vector(values)
        i = self.boundary.index(a)
        return math.fsum(self.conductances[i] * (v - v[i]))


def trace_network(g: WeightedGraph, boundary: Iterable[int], tol: float = DEFAULT_TOL) -> TraceNetwork:
    boundary = tuple(sorted(set(boundary)))
    if not boundary:
        raise EmptyBoundary("Trace needs a nonempty boundary.")
    if len(boundary) == g.n:
        raise ComplementEmpty("Trace needs at least one interior vertex.")
    members = set(boundary)
    for a in boundary:
        for y, _ in g.neighbors(a):
            if y in members:
                raise BoundaryEdgePresent(f"Boundary vertices {a} and {y} are adjacent.")

    basis = harmonic_basis(g, boundary, tol)
    rows = g.positions(boundary)
    conductances = g.conductance_matrix[rows] @ basis
    conductances = np.asarray(conductances)
    network = TraceNetwork(g, boundary, conductances, basis)
    logger.info(
        f"Trace network on {len(boundary)} boundary vertices; row-sum residual "
        f"{network.row_sum_residual():.2e}."
    )
    return network
