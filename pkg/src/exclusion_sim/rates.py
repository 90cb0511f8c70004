from src.exclusion_sim.boundary import BoundarySpec
from src.exclusion_sim.configuration import Configuration, Transition
from src.graph_core.graph import WeightedGraph


def transition_catalogue(g: WeightedGraph, spec: BoundarySpec | None = None) -> list[Transition]:
    """Every transition that can ever fire: one swap per edge, one flip per reservoir."""
    catalogue = [Transition.swap(u, v) for u, v, _ in g.edges]
    if spec is not None:
        catalogue.extend(Transition.flip(a) for a in spec.boundary)
    return catalogue


def active_rates(
    g: WeightedGraph, spec: BoundarySpec | None, eta: Configuration
) -> list[tuple[Transition, float]]:
    """
    Transitions with positive rate out of eta: swap(x, y) at rate c_xy when
    exactly one endpoint is occupied, flip(a) at lambda_plus(a) when a is
    empty and lambda_minus(a) when it is occupied.
    """
    bits, index = eta.bits, g.index
    active = []
    for u, v, c in g.edges:
        if bits[index[u]] != bits[index[v]]:
            active.append((Transition.swap(u, v), c))
    if spec is not None:
        for a, plus, minus in zip(spec.boundary, spec.lambda_plus, spec.lambda_minus):
            active.append((Transition.flip(a), minus if bits[index[a]] else plus))
    return active


def total_rate(g: WeightedGraph, spec: BoundarySpec | None, eta: Configuration) -> float:
    return sum(rate for _, rate in active_rates(g, spec, eta))
