import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from src.common.errors import (
    EmptyBoundary,
    EmptySet,
    MaximumPrincipleViolated,
    MissingValue,
    OverlappingSets,
    SameVertex,
)
from src.graph_core.graph import WeightedGraph
from src.potential_theory.linalg import DEFAULT_TOL, sparse_solve

logger = logging.getLogger(__name__)

VertexFunction = Mapping[int, float] | np.ndarray


def as_vector(g: WeightedGraph, f: VertexFunction) -> np.ndarray:
    """Values of f in canonical vertex order."""
    if isinstance(f, HarmonicField):
        return f.values
    if isinstance(f, np.ndarray) or isinstance(f, (list, tuple)):
        values = np.asarray(f, dtype=float)
        if values.shape != (g.n,):
            raise MissingValue(f"Expected {g.n} values, got shape {values.shape}.")
        return values
    missing = [v for v in g.vertices if v not in f]
    if missing:
        raise MissingValue(f"No value for vertices {missing[:5]}.")
    return np.array([f[v] for v in g.vertices], dtype=float)


def dirichlet_energy(g: WeightedGraph, f: VertexFunction) -> float:
    """Sum over undirected edges of c_xy (f(x) - f(y))^2."""
    values = as_vector(g, f)
    tails, heads, cond = g.edge_arrays
    return math.fsum(cond * (values[tails] - values[heads]) ** 2)


@dataclass(frozen=True)
class HarmonicField:
    graph: WeightedGraph
    values: np.ndarray
    boundary: tuple[int, ...]
    boundary_values: tuple[float, ...]
    residual: float

    def __getitem__(self, v: int) -> float:
        return float(self.values[self.graph.position(v)])

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.graph.vertices, self.values.tolist()))

    @property
    def energy(self) -> float:
        return dirichlet_energy(self.graph, self.values)


def _split(g: WeightedGraph, boundary: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
    boundary_pos = np.unique(g.positions(boundary))
    if boundary_pos.size == 0:
        raise EmptyBoundary("Boundary set is empty.")
    mask = np.ones(g.n, dtype=bool)
    mask[boundary_pos] = False
    return np.flatnonzero(mask), boundary_pos


def interior_residual(g: WeightedGraph, values: np.ndarray, interior: np.ndarray) -> float:
    """max over interior x of |sum_y c_xy (h(y) - h(x))|."""
    if interior.size == 0:
        return 0.0
    return float(np.abs((g.laplacian @ values)[interior]).max())


def harmonic_basis(g: WeightedGraph, boundary: Iterable[int], tol: float = DEFAULT_TOL) -> np.ndarray:
    """
    Columns h^b: the harmonic extension of the indicator of each boundary
    vertex b (boundary taken in sorted position order). One factorization,
    |boundary| right-hand sides.
    """
    interior, boundary_pos = _split(g, boundary)
    basis = np.zeros((g.n, boundary_pos.size))
    basis[boundary_pos, np.arange(boundary_pos.size)] = 1.0
    if interior.size:
        lap = g.laplacian
        system = lap[interior][:, interior]
        rhs = -lap[interior][:, boundary_pos].toarray()
        basis[interior], _ = sparse_solve(system, rhs, tol)
    return basis


def solve_harmonic(
    g: WeightedGraph,
    boundary: Iterable[int],
    values: Mapping[int, float] | Iterable[float],
    tol: float = DEFAULT_TOL,
) -> HarmonicField:
    """
    Dirichlet problem: h = values on the boundary, graph-harmonic elsewhere.
    `values` is a mapping vertex -> value or a sequence aligned with the
    sorted boundary.
    """
    boundary = tuple(sorted(set(boundary)))
    interior, boundary_pos = _split(g, boundary)
    if isinstance(values, Mapping):
        try:
            fixed = np.array([values[b] for b in boundary], dtype=float)
        except KeyError as e:
            raise MissingValue(f"No boundary value for vertex {e}.") from None
    else:
        fixed = np.asarray(list(values), dtype=float)
        if fixed.shape != (len(boundary),):
            raise MissingValue("One value per boundary vertex is required.")

    h = np.zeros(g.n)
    h[boundary_pos] = fixed
    if interior.size:
        lap = g.laplacian
        rhs = -(lap[interior][:, boundary_pos] @ fixed)
        h[interior], _ = sparse_solve(lap[interior][:, interior], rhs, tol)

    residual = interior_residual(g, h, interior)
    slack = tol * max(1.0, float(np.abs(fixed).max()))
    if h.max() > fixed.max() + slack or h.min() < fixed.min() - slack:
        raise MaximumPrincipleViolated(
            f"Harmonic field range [{h.min()}, {h.max()}] exceeds boundary range "
            f"[{fixed.min()}, {fixed.max()}]."
        )
    logger.debug(f"Harmonic solve: {interior.size} interior vertices, residual {residual:.2e}.")
    return HarmonicField(g, h, boundary, tuple(fixed.tolist()), residual)


def effective_resistance(
    g: WeightedGraph, a1: Iterable[int], a2: Iterable[int], tol: float = DEFAULT_TOL
) -> float:
    """Inverse of the minimal energy among potentials equal to 1 on A1 and 0 on A2."""
    a1, a2 = set(a1), set(a2)
    if not a1 or not a2:
        raise EmptySet("Both vertex sets must be nonempty.")
    if a1 & a2:
        raise OverlappingSets(f"Sets share vertices {sorted(a1 & a2)[:5]}.")
    values = {v: 1.0 for v in a1} | {v: 0.0 for v in a2}
    field = solve_harmonic(g, values.keys(), values, tol)
    return 1.0 / field.energy


def effective_resistance_between(g: WeightedGraph, x: int, y: int, tol: float = DEFAULT_TOL) -> float:
    if x == y:
        raise SameVertex(f"Resistance between {x} and itself is zero by convention.")
    return effective_resistance(g, {x}, {y}, tol)


def resistance_matrix(g: WeightedGraph) -> np.ndarray:
    """All-pairs R_eff from the Laplacian pseudo-inverse (dense; small graphs)."""
    pinv = np.linalg.pinv(g.laplacian.toarray(), hermitian=True)
    diag = np.diag(pinv)
    resistance = diag[:, None] + diag[None, :] - 2.0 * pinv
    resistance = 0.5 * (resistance + resistance.T)
    np.fill_diagonal(resistance, 0.0)
    return resistance


def flow(g: WeightedGraph, h: VertexFunction, a: int) -> float:
    """Electric flow out of a: sum_y c_ay (h(y) - h(a))."""
    values = as_vector(g, h)
    pos = g.position(a)
    return math.fsum(c * (values[g.index[y]] - values[pos]) for y, c in g.adjacency[a])
