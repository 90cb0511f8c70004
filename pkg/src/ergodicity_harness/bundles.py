"""Local function bundles and their global averages under product measures."""
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from src.common.errors import BallTooLarge, InputError
from src.exclusion_sim.configuration import state_bits
from src.graph_core.graph import WeightedGraph
from src.graph_core.metric import ball

logger = logging.getLogger(__name__)

DEFAULT_BALL_CAP = 20
LIPSCHITZ_GRID = 1001

Evaluator = Callable[[WeightedGraph, object, Sequence[int]], float]


@dataclass(frozen=True)
class LocalFunctionBundle:
    """
    phi_p(eta) for every anchor p: a vertex, or an edge (u, v) whose tail u
    is the anchor. phi_p may read eta only on the open ball B(anchor, radius).
    Configurations are indexed by vertex position in the graph.
    """
    name: str
    kind: str
    radius: float
    evaluator: Evaluator = field(repr=False)

    def anchor(self, p) -> int:
        return p[0] if self.kind == "edge" else p

    def support(self, g: WeightedGraph, p) -> tuple[int, ...]:
        return ball(g, self.anchor(p), self.radius)

    def __call__(self, g: WeightedGraph, p, occ: Sequence[int]) -> float:
        return float(self.evaluator(g, p, occ))


def _occupation(g, x, occ):
    return occ[g.position(x)]


def _neighbor_pairs(g, x, occ):
    i = g.position(x)
    if not occ[i]:
        return 0.0
    return float(sum(occ[g.position(y)] for y, _ in g.neighbors(x)))


def _conductance_pairs(g, x, occ):
    i = g.position(x)
    if not occ[i]:
        return 0.0
    return sum(c * occ[g.position(y)] for y, c in g.neighbors(x))


def _edge_pairs(g, e, occ):
    u, v = e
    return g.conductance(u, v) * occ[g.position(u)] * occ[g.position(v)]


BUNDLES = {
    "occupation": LocalFunctionBundle("occupation", "vertex", 1, _occupation),
    "neighbor_pairs": LocalFunctionBundle("neighbor_pairs", "vertex", 2, _neighbor_pairs),
    "conductance_pairs": LocalFunctionBundle("conductance_pairs", "vertex", 2, _conductance_pairs),
    "edge_pairs": LocalFunctionBundle("edge_pairs", "edge", 2, _edge_pairs),
}


def get_bundle(name: str) -> LocalFunctionBundle:
    try:
        return BUNDLES[name]
    except KeyError:
        raise InputError(f"Unknown bundle '{name}'; choose from {sorted(BUNDLES)}.") from None


@dataclass(frozen=True)
class GlobalAverage:
    """
    Phi_p(alpha) = sum_m a_m alpha^m (1 - alpha)^(k - m), with a_m the sum of
    phi_p over configurations of the k-vertex support holding m particles.
    """
    coefficients: np.ndarray
    support: tuple[int, ...]

    def __call__(self, alpha: float) -> float:
        k = len(self.support)
        m = np.arange(k + 1)
        return float(np.sum(self.coefficients * alpha**m * (1.0 - alpha) ** (k - m)))

    def lipschitz(self, points: int = LIPSCHITZ_GRID) -> float:
        grid = np.linspace(0.0, 1.0, points)
        values = np.array([self(a) for a in grid])
        return float(np.abs(np.diff(values)).max() / (grid[1] - grid[0]))


def global_average_function(
    bundle: LocalFunctionBundle, g: WeightedGraph, p, cap: int = DEFAULT_BALL_CAP
) -> GlobalAverage:
    support = bundle.support(g, p)
    k = len(support)
    if k > cap:
        raise BallTooLarge(f"Support of {bundle.name} at {p} has {k} vertices, cap is {cap}.")
    positions = g.positions(support)
    occ = np.zeros(g.n, dtype=np.int8)
    bits = state_bits(k)
    coefficients = np.zeros(k + 1)
    for row in bits:
        occ[positions] = row
        coefficients[int(row.sum())] += bundle(g, p, occ)
    return GlobalAverage(coefficients=coefficients, support=support)


def global_average(
    bundle: LocalFunctionBundle, g: WeightedGraph, p, alpha: float, cap: int = DEFAULT_BALL_CAP
) -> float:
    if not 0.0 <= alpha <= 1.0:
        raise InputError(f"alpha must lie in [0, 1], got {alpha}.")
    phi = global_average_function(bundle, g, p, cap)
    logger.debug(f"Global average of {bundle.name} at {p}: Lipschitz constant {phi.lipschitz():.4g}.")
    return phi(alpha)


def default_anchor(bundle: LocalFunctionBundle, g: WeightedGraph, p: int):
    """p itself for vertex bundles; for edge bundles the edge from p to its smallest neighbour."""
    if bundle.kind != "edge":
        return p
    neighbors = g.neighbors(p)
    if not neighbors:
        raise InputError(f"Vertex {p} has no edge to anchor {bundle.name}.")
    return (p, min(w for w, _ in neighbors))
