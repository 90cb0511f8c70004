from src.potential_theory.harmonic import (
    HarmonicField,
    dirichlet_energy,
    effective_resistance,
    effective_resistance_between,
    flow,
    harmonic_basis,
    resistance_matrix,
    solve_harmonic,
)
from src.potential_theory.marginal import DensityProfile, boundary_flow_scaling, stationary_marginal
from src.potential_theory.scaling import (
    ScalingReport,
    boundary_assumption_table,
    scaled_exhaustion,
    scaling_report,
)
from src.potential_theory.trace import TraceNetwork, trace_network
from src.potential_theory.walks import (
    CommuteTime,
    GreenFunction,
    commute_time,
    exit_times,
    green_function,
    hitting_time,
    mean_exit_time,
)

__all__ = [
    "HarmonicField",
    "dirichlet_energy",
    "effective_resistance",
    "effective_resistance_between",
    "flow",
    "harmonic_basis",
    "resistance_matrix",
    "solve_harmonic",
    "DensityProfile",
    "boundary_flow_scaling",
    "stationary_marginal",
    "ScalingReport",
    "boundary_assumption_table",
    "scaled_exhaustion",
    "scaling_report",
    "TraceNetwork",
    "trace_network",
    "CommuteTime",
    "GreenFunction",
    "commute_time",
    "exit_times",
    "green_function",
    "hitting_time",
    "mean_exit_time",
]
