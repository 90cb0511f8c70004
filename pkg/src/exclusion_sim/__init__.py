from src.exclusion_sim.boundary import BoundarySpec, make_boundary_spec
from src.exclusion_sim.configuration import Configuration, Transition
from src.exclusion_sim.generator import (
    detailed_balance_check,
    evolve_marginals,
    generator_matrix,
    hyperplane_generator,
    stationary_distribution,
    stationary_vector,
)
from src.exclusion_sim.measures import MeasureSpec, radon_nikodym_ratio
from src.exclusion_sim.rates import active_rates
from src.exclusion_sim.simulator import (
    ExclusionSimulator,
    Trajectory,
    configuration_at,
    run_trajectories,
    simulate,
)

__all__ = [
    "BoundarySpec",
    "make_boundary_spec",
    "Configuration",
    "Transition",
    "detailed_balance_check",
    "evolve_marginals",
    "generator_matrix",
    "hyperplane_generator",
    "stationary_distribution",
    "stationary_vector",
    "MeasureSpec",
    "radon_nikodym_ratio",
    "active_rates",
    "ExclusionSimulator",
    "Trajectory",
    "configuration_at",
    "run_trajectories",
    "simulate",
]
