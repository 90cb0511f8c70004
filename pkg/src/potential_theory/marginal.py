"""One-site marginals of the boundary-driven exclusion process."""
import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd
import scipy.sparse as sp

from src.common.errors import InconsistentSolutions, InputError
from src.exclusion_sim.boundary import BoundarySpec, make_boundary_spec
from src.graph_core.families import sierpinski_gasket
from src.graph_core.graph import WeightedGraph
from src.potential_theory.harmonic import dirichlet_energy, flow
from src.potential_theory.linalg import DEFAULT_TOL, sparse_solve
from src.potential_theory.trace import trace_network

logger = logging.getLogger(__name__)

AGREEMENT_TOL = 1e-8
# round-off allowance on the density box bounds
BOUNDS_SLACK = 1e-12


@dataclass(frozen=True)
class DensityProfile:
    graph: WeightedGraph
    spec: BoundarySpec
    rho: np.ndarray
    rho_trace: np.ndarray
    flows: dict[int, float]
    energy: float
    residual: float
    agreement: float

    def __getitem__(self, v: int) -> float:
        return float(self.rho[self.graph.position(v)])

    @property
    def bounds(self) -> tuple[float, float]:
        gamma = self.spec.gamma
        return 1.0 / (1.0 + gamma), gamma / (1.0 + gamma)

    @property
    def total_flow(self) -> float:
        return math.fsum(abs(i) for i in self.flows.values())


def _robin_system(g: WeightedGraph, spec: BoundarySpec):
    rows = g.positions(spec.boundary)
    extra = np.zeros(g.n)
    rhs = np.zeros(g.n)
    extra[rows] = np.add(spec.lambda_plus, spec.lambda_minus)
    rhs[rows] = spec.lambda_plus
    return (g.laplacian + sp.diags(extra)).tocsr(), rhs


def stationary_marginal(
    g: WeightedGraph,
    spec: BoundarySpec,
    tol: float = DEFAULT_TOL,
    agreement_tol: float = AGREEMENT_TOL,
) -> DensityProfile:
    """
    Solve the Robin system for rho directly, then again through the trace
    network (a pure Dirichlet problem on the boundary followed by harmonic
    extension), and insist the two agree.
    """
    system, rhs = _robin_system(g, spec)
    rho, residual = sparse_solve(system, rhs, tol)

    trace = trace_network(g, spec.boundary, tol)
    weights = g.weights[g.positions(spec.boundary)]
    reduced = np.diag(weights + np.add(spec.lambda_plus, spec.lambda_minus)) - trace.conductances
    rho_boundary = np.linalg.solve(reduced, np.array(spec.lambda_plus))
    rho_trace = trace.extend(rho_boundary)

    agreement = float(np.abs(rho - rho_trace).max())
    if agreement > agreement_tol:
        raise InconsistentSolutions(
            f"Robin and Dirichlet-to-Neumann densities differ by {agreement:.3e}."
        )

    profile = DensityProfile(
        graph=g,
        spec=spec,
        rho=rho,
        rho_trace=rho_trace,
        flows={a: flow(g, rho, a) for a in spec.boundary},
        energy=dirichlet_energy(g, rho),
        residual=residual,
        agreement=agreement,
    )
    low, high = profile.bounds
    if rho.min() < low - BOUNDS_SLACK or rho.max() > high + BOUNDS_SLACK:
        raise InconsistentSolutions(
            f"Density range [{rho.min()}, {rho.max()}] leaves [{low}, {high}]."
        )
    logger.info(
        f"Stationary marginal on {g.n} vertices: agreement {agreement:.2e}, "
        f"total |flow| {profile.total_flow:.4g}, energy {profile.energy:.4g}."
    )
    return profile


def boundary_flow_scaling(levels, corner_rates) -> pd.DataFrame:
    """
    Gasket table of (5/3)^N times the total boundary flow of rho_N, with the
    three level-0 corners as reservoirs. corner_rates lists (lambda_plus,
    lambda_minus) per corner a0, a1, a2.
    """
    if len(corner_rates) != 3:
        raise InputError("One (lambda_plus, lambda_minus) pair per gasket corner is required.")
    rows = []
    for level in levels:
        if level < 1:
            raise InputError("Gasket corners are adjacent at level 0; start at level 1.")
        g = sierpinski_gasket(level)
        spec = make_boundary_spec(g, dict(zip(g.corners, corner_rates)))
        profile = stationary_marginal(g, spec)
        rows.append(
            {
                "level": level,
                "total_flow": profile.total_flow,
                "scaled_flow": (5.0 / 3.0) ** level * profile.total_flow,
            }
        )
    table = pd.DataFrame(rows)
    table["ratio"] = table["scaled_flow"] / table["scaled_flow"].shift(1)
    return table
