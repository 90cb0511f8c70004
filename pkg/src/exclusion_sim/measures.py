import logging
from dataclasses import dataclass

import numpy as np

from src.common.errors import DegenerateMarginal, InputError
from src.exclusion_sim.configuration import Configuration, Transition, state_bits
from src.graph_core.graph import WeightedGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeasureSpec:
    """
    Product Bernoulli measure with constant density alpha, product measure
    with a per-vertex profile, or an explicit law over all 2^n states
    (state index bit i = occupancy of vertex position i).
    """
    kind: str
    alpha: float | None = None
    profile: tuple[float, ...] | None = None
    probabilities: np.ndarray | None = None

    @classmethod
    def bernoulli(cls, alpha: float) -> "MeasureSpec":
        if not 0.0 <= alpha <= 1.0:
            raise InputError(f"alpha must lie in [0, 1], got {alpha}.")
        return cls("bernoulli", alpha=float(alpha))

    @classmethod
    def product(cls, profile) -> "MeasureSpec":
        profile = tuple(float(p) for p in profile)
        if any(not 0.0 <= p <= 1.0 for p in profile):
            raise InputError("Profile values must lie in [0, 1].")
        return cls("profile", profile=profile)

    @classmethod
    def explicit(cls, probabilities, tol: float = 1e-12) -> "MeasureSpec":
        probabilities = np.asarray(probabilities, dtype=float)
        if abs(probabilities.sum() - 1.0) > tol or (probabilities < 0).any():
            raise InputError("Explicit distribution must be nonnegative and sum to 1.")
        return cls("explicit", probabilities=probabilities)

    def marginals(self, n: int) -> np.ndarray:
        if self.kind == "bernoulli":
            return np.full(n, self.alpha)
        if self.kind == "profile":
            if len(self.profile) != n:
                raise InputError(f"Profile has {len(self.profile)} entries, graph has {n}.")
            return np.array(self.profile)
        return state_bits(n).T.astype(float) @ self.probabilities

    def state_probabilities(self, n: int) -> np.ndarray:
        if self.kind == "explicit":
            if self.probabilities.size != 2**n:
                raise InputError("Explicit distribution does not match the state space.")
            return self.probabilities
        p = self.marginals(n)
        bits = state_bits(n).astype(bool)
        return np.prod(np.where(bits, p, 1.0 - p), axis=1)

    def sample(self, g: WeightedGraph, rng: np.random.Generator) -> Configuration:
        if self.kind == "explicit":
            state = int(rng.choice(self.probabilities.size, p=self.probabilities))
            return Configuration.from_index(g, state)
        occupied = rng.random(g.n) < self.marginals(g.n)
        return Configuration.from_array(g, occupied)


def radon_nikodym_ratio(measure: MeasureSpec, eta: Configuration, transition: Transition) -> float:
    """d nu_h(T eta) / d nu_h(eta) for a product measure nu_h and a swap or flip T."""
    if measure.kind == "explicit":
        raise InputError("Ratios are defined for product measures only.")
    g = eta.graph
    h = measure.marginals(g.n)
    if ((h <= 0.0) | (h >= 1.0)).any():
        raise DegenerateMarginal("Product measure has a marginal equal to 0 or 1.")

    def odds(position: int, occupied: int) -> float:
        # weight of the new value over the old one at a single site
        p = h[position]
        return (p / (1.0 - p)) if occupied == 0 else ((1.0 - p) / p)

    if transition.kind == "flip":
        i = g.position(transition.sites[0])
        return odds(i, eta.bits[i])
    i, j = (g.position(v) for v in transition.sites)
    if eta.bits[i] == eta.bits[j]:
        return 1.0
    return odds(i, eta.bits[i]) * odds(j, eta.bits[j])
