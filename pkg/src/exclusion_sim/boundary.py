import logging
import math
from dataclasses import dataclass
from typing import Mapping

from src.common.errors import BoundaryEdgePresent, EmptyBoundary, InputError, RateNonpositive
from src.graph_core.graph import WeightedGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundarySpec:
    """
    Reservoirs at boundary vertices: particles are created at a at rate
    lambda_plus(a) when a is empty and removed at rate lambda_minus(a) when
    a is occupied. gamma, gamma_prime and delta = 1/(1+gamma) are the
    smallest constants for which the rate-ratio bounds hold.
    """
    boundary: tuple[int, ...]
    lambda_plus: tuple[float, ...]
    lambda_minus: tuple[float, ...]
    gamma: float
    gamma_prime: float
    delta: float

    def rates(self, a: int) -> tuple[float, float]:
        i = self.boundary.index(a)
        return self.lambda_plus[i], self.lambda_minus[i]

    def target_density(self, a: int) -> float:
        plus, minus = self.rates(a)
        return plus / (plus + minus)

    @property
    def min_rate(self) -> float:
        return min(min(self.lambda_plus), min(self.lambda_minus))

    @property
    def is_symmetric(self) -> bool:
        return all(p == m for p, m in zip(self.lambda_plus, self.lambda_minus))

    def as_reservoirs(self) -> dict[int, tuple[float, float]]:
        return {a: (p, m) for a, p, m in zip(self.boundary, self.lambda_plus, self.lambda_minus)}


def make_boundary_spec(g: WeightedGraph, reservoirs: Mapping[int, tuple[float, float]]) -> BoundarySpec:
    if not reservoirs:
        raise EmptyBoundary("A boundary-driven process needs at least one reservoir.")
    boundary = tuple(sorted(reservoirs))
    members = set(boundary)
    gamma, gamma_prime = 1.0, 1.0
    for a in boundary:
        plus, minus = (float(r) for r in reservoirs[a])
        if not (plus > 0 and minus > 0) or not (math.isfinite(plus) and math.isfinite(minus)):
            raise RateNonpositive(f"Reservoir rates at {a} must be positive, got ({plus}, {minus}).")
        for y, _ in g.neighbors(a):
            if y in members:
                raise BoundaryEdgePresent(f"Boundary vertices {a} and {y} are adjacent.")
        c_a = g.weight(a)
        if c_a == 0:
            raise InputError(f"Reservoir vertex {a} has no edges; its rates cannot be compared to c_a.")
        gamma = max(gamma, plus / minus, minus / plus)
        gamma_prime = max(gamma_prime, plus / c_a, c_a / plus)

    spec = BoundarySpec(
        boundary=boundary,
        lambda_plus=tuple(float(reservoirs[a][0]) for a in boundary),
        lambda_minus=tuple(float(reservoirs[a][1]) for a in boundary),
        gamma=gamma,
        gamma_prime=gamma_prime,
        delta=1.0 / (1.0 + gamma),
    )
    logger.debug(f"Boundary spec on {boundary}: gamma={gamma:.4g}, gamma'={gamma_prime:.4g}.")
    return spec
