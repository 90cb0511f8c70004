"""
Largest eigenvalue of T L + s kappa V U in L^2(nu).

The generator is replaced by its nu-symmetrization (L + L*)/2, which is L
itself when nu is reversible. Conservative generators are split into
particle-number hyperplanes.
"""
import logging
from typing import Callable, Sequence

import numpy as np
import pandas as pd
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from src.common.errors import InputError, NonSymmetrizable
from src.ergodicity_harness.bundles import LocalFunctionBundle, default_anchor
from src.ergodicity_harness.ufields import field_context, field_function
from src.exclusion_sim.boundary import BoundarySpec
from src.exclusion_sim.configuration import state_bits
from src.exclusion_sim.generator import DEFAULT_DENSE_LIMIT, generator_matrix, hyperplane_states
from src.exclusion_sim.measures import MeasureSpec
from src.graph_core.graph import WeightedGraph
from src.graph_core.metric import GraphExhaustion, ball
from src.potential_theory.marginal import stationary_marginal

logger = logging.getLogger(__name__)

SPECTRAL_CAP = 12


def symmetrized_generator(matrix, mu: np.ndarray):
    """W^{1/2} Q W^{-1/2} symmetrized; its spectrum is that of (L + L*)/2 in L^2(mu)."""
    if (mu <= 0).any():
        raise NonSymmetrizable("Reference measure has a zero-probability state.")
    root = np.sqrt(mu)
    if sp.issparse(matrix):
        conjugated = sp.diags(root) @ matrix @ sp.diags(1.0 / root)
        return (0.5 * (conjugated + conjugated.T)).tocsr()
    conjugated = root[:, None] * np.asarray(matrix) / root[None, :]
    return 0.5 * (conjugated + conjugated.T)


def _top_eigenvalue(matrix, dense_limit: int) -> float:
    if matrix.shape[0] == 1:
        return float(matrix[0, 0])
    if sp.issparse(matrix):
        if matrix.shape[0] <= dense_limit:
            matrix = matrix.toarray()
        else:
            return float(eigsh(matrix, k=1, which="LA", return_eigenvectors=False)[0])
    return float(np.linalg.eigvalsh(matrix)[-1])


def field_values(g: WeightedGraph, field: Callable[[Sequence[int]], float]) -> np.ndarray:
    """The field on every configuration, by state index."""
    return np.array([field(row.tolist()) for row in state_bits(g.n)])


def spectral_estimate(
    g: WeightedGraph,
    field: Callable[[Sequence[int]], float],
    kappa: float,
    volume: float,
    time_scale: float,
    measure: MeasureSpec | None = None,
    spec: BoundarySpec | None = None,
    sign: int = 1,
    cap: int = SPECTRAL_CAP,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> float:
    """
    lambda / (kappa V) for the largest eigenvalue lambda of the symmetrized
    T L +/- kappa V U. Without reservoirs the reference measure defaults to
    nu_{1/2}; with reservoirs it defaults to the product measure with the
    stationary one-site marginals. Returns 0 at kappa = 0.
    """
    if sign not in (1, -1):
        raise InputError("sign must be +1 or -1.")
    if kappa < 0 or volume <= 0 or time_scale <= 0:
        raise InputError("kappa must be nonnegative; volume and time scale positive.")
    if kappa == 0:
        return 0.0
    if measure is None:
        if spec is None:
            measure = MeasureSpec.bernoulli(0.5)
        else:
            measure = MeasureSpec.product(stationary_marginal(g, spec).rho)

    matrix = generator_matrix(g, spec, cap=cap, dense_limit=0)
    mu = measure.state_probabilities(g.n)
    potential = sign * kappa * volume * field_values(g, field)

    if spec is None:
        blocks = [hyperplane_states(g.n, k) for k in range(g.n + 1)]
    else:
        blocks = [np.arange(2**g.n)]
    top = -np.inf
    for states in blocks:
        sub = matrix[states][:, states]
        operator = time_scale * symmetrized_generator(sub, mu[states]) + sp.diags(potential[states])
        top = max(top, _top_eigenvalue(sp.csr_matrix(operator), dense_limit))
    normalized = top / (kappa * volume)
    logger.debug(f"Spectral estimate on {g.n} vertices, kappa={kappa}: lambda/(kappa V) = {normalized:.6g}.")
    return normalized


def spectral_table(
    ex: GraphExhaustion,
    levels: Sequence[int],
    bundle: LocalFunctionBundle,
    block_radius: float,
    kappa: float = 1.0,
    alpha: float = 0.5,
    sign: int = 1,
    field: str = "one_block",
    cap: int = SPECTRAL_CAP,
) -> pd.DataFrame:
    """
    One-block eigenvalue table at the origin across exhaustion levels.
    Needs the volume and time scales on `ex`; levels whose ball exceeds the
    state cap are reported as skipped.
    """
    if ex.volumes is None or ex.time_scales is None:
        raise InputError("Exhaustion carries no volume/time scale table; run scaled_exhaustion first.")
    rows = []
    for level in levels:
        sub = ex.subgraph(level)
        volume, time_scale = ex.volumes[level - 1], ex.time_scales[level - 1]
        row = {
            "level": level,
            "vertices": sub.n,
            "volume": volume,
            "time_scale": time_scale,
            "ratio": time_scale / volume,
            "kappa": kappa,
        }
        if sub.n > cap:
            logger.warning(f"Level {level} has {sub.n} vertices, above the spectral cap {cap}; skipped.")
            rows.append(row | {"normalized": np.nan, "sup_abs_field": np.nan, "skipped": True})
            continue
        anchor = default_anchor(bundle, sub, ex.origin)
        ctx = field_context(sub, bundle, anchor, ball(sub, ex.origin, block_radius), sub.vertices)
        values = field_function(ctx, field)
        normalized = spectral_estimate(
            sub, values, kappa, volume, time_scale, measure=MeasureSpec.bernoulli(alpha), sign=sign, cap=cap
        )
        sup_abs = float(np.abs(field_values(sub, values)).max())
        rows.append(row | {"normalized": normalized, "sup_abs_field": sup_abs, "skipped": False})
    table = pd.DataFrame(rows)
    logger.info(f"Spectral table for {bundle.name}: {table[['level', 'normalized']].to_dict('records')}.")
    return table
