"""
Operator inequalities for swap Dirichlet forms on small graphs.

Forms are evaluated in L^2(nu) for a product measure nu and turned into
symmetric matrices by conjugating with diag(nu)^{1/2}. Swaps conserve the
particle number, so every check runs hyperplane by hyperplane.
"""
import logging
from typing import Iterable, Sequence

import networkx as nx
import numpy as np
import pandas as pd

from src.common.errors import InputError, SameVertex
from src.common.seeding import stream
from src.ergodicity_harness.partition import Partition
from src.exclusion_sim.configuration import swap_permutation
from src.exclusion_sim.generator import check_state_space, hyperplane_states
from src.exclusion_sim.measures import MeasureSpec
from src.graph_core.graph import WeightedGraph, build_graph
from src.potential_theory.harmonic import effective_resistance_between, resistance_matrix

logger = logging.getLogger(__name__)

MPL_CAP = 12
PSD_TOL = 1e-10

Swap = tuple[int, int, float]


def swap_operator(n: int, swaps: Iterable[Swap], mu: np.ndarray, states: np.ndarray) -> np.ndarray:
    """
    Symmetric matrix of f -> nu[f (-sum_e c_e grad_e f)] on `states`, a set
    of state indices closed under the swaps; swaps are (position, position, rate).
    """
    size = states.size
    weights = mu[states]
    rows = np.arange(size)
    form = np.zeros((size, size))
    for i, j, c in swaps:
        target = np.searchsorted(states, swap_permutation(n, i, j)[states])
        form[rows, rows] += c * weights
        form[rows, target] -= c * weights
    form = 0.5 * (form + form.T)
    scale = 1.0 / np.sqrt(weights)
    return form * scale[:, None] * scale[None, :]


def graph_swaps(g: WeightedGraph) -> list[Swap]:
    tails, heads, cond = g.edge_arrays
    return [(int(i), int(j), float(c)) for i, j, c in zip(tails, heads, cond)]


def _bernoulli(n: int, alpha: float) -> np.ndarray:
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}.")
    return MeasureSpec.bernoulli(alpha).state_probabilities(n)


def min_comparison_eigenvalue(
    n: int,
    dominant: Sequence[Swap],
    dominated: Sequence[Swap],
    factor: float,
    mu: np.ndarray,
) -> float:
    """lambda_min of factor * A(dominant) - A(dominated) over all hyperplanes."""
    lowest = np.inf
    for k in range(n + 1):
        states = hyperplane_states(n, k)
        matrix = factor * swap_operator(n, dominant, mu, states) - swap_operator(n, dominated, mu, states)
        lowest = min(lowest, float(np.linalg.eigvalsh(matrix)[0]))
    return lowest


def mpl_psd_check(g: WeightedGraph, x: int, y: int, alpha: float, cap: int = MPL_CAP) -> float:
    """
    lambda_min(R_eff(x, y) A - B_xy) with A the exclusion Dirichlet form
    and B_xy the single-swap form; the moving particle lemma holds at (x, y)
    exactly when this is >= 0.
    """
    if x == y:
        raise SameVertex(f"Moving particle check needs two distinct vertices, got {x} twice.")
    check_state_space(g.n, cap)
    mu = _bernoulli(g.n, alpha)
    r_eff = effective_resistance_between(g, x, y)
    swap = [(g.position(x), g.position(y), 1.0)]
    return min_comparison_eigenvalue(g.n, graph_swaps(g), swap, r_eff, mu)


def _atlas_graphs(max_vertices: int) -> list[tuple[int, nx.Graph]]:
    return [
        (i, graph)
        for i, graph in enumerate(nx.graph_atlas_g())
        if 2 <= graph.number_of_nodes() <= max_vertices and nx.is_connected(graph)
    ]


def _from_networkx(graph: nx.Graph, conductances: np.ndarray | None = None) -> WeightedGraph:
    edges = sorted(graph.edges())
    if conductances is None:
        conductances = np.ones(len(edges))
    return build_graph((u, v, c) for (u, v), c in zip(edges, conductances))


def _sweep_graph(g: WeightedGraph, alphas, label: str, atlas_id: int, instance: int = 0) -> list[dict]:
    rows = []
    resistance = resistance_matrix(g)
    swaps = graph_swaps(g)
    for alpha in alphas:
        mu = _bernoulli(g.n, alpha)
        for a in range(g.n):
            for b in range(a + 1, g.n):
                lowest = min_comparison_eigenvalue(g.n, swaps, [(a, b, 1.0)], resistance[a, b], mu)
                rows.append(
                    {
                        "atlas_id": atlas_id,
                        "instance": instance,
                        "conductances": label,
                        "vertices": g.n,
                        "edges": len(g.edges),
                        "x": g.vertices[a],
                        "y": g.vertices[b],
                        "alpha": alpha,
                        "r_eff": resistance[a, b],
                        "lambda_min": lowest,
                        "passed": lowest >= -PSD_TOL,
                    }
                )
    return rows


def mpl_sweep(
    max_vertices: int = 5,
    alphas: Sequence[float] = (0.3, 0.5),
    random_instances: int = 100,
    seed: int = 0,
    conductance_range: tuple[float, float] = (0.1, 10.0),
) -> pd.DataFrame:
    """
    Moving particle check over every connected graph of the atlas with at
    most `max_vertices` vertices (unit conductances), then on
    `random_instances` atlas graphs with uniform random conductances.
    Random rows carry their draw index in `instance`; atlas graphs may repeat.
    """
    atlas = _atlas_graphs(max_vertices)
    rows = []
    for atlas_id, graph in atlas:
        rows.extend(_sweep_graph(_from_networkx(graph), alphas, "unit", atlas_id))
    rng = stream(seed, "mpl-sweep")
    low, high = conductance_range
    for instance in range(random_instances):
        atlas_id, graph = atlas[int(rng.integers(len(atlas)))]
        conductances = rng.uniform(low, high, graph.number_of_edges())
        rows.extend(_sweep_graph(_from_networkx(graph, conductances), alphas, "random", atlas_id, instance))
    table = pd.DataFrame(rows)
    logger.info(
        f"Moving particle sweep: {len(table)} checks on {len(atlas)} atlas graphs plus "
        f"{random_instances} random instances, min eigenvalue {table['lambda_min'].min():.3e}."
    )
    return table


def two_block_swaps(g: WeightedGraph, partition: Partition, i: int) -> list[Swap]:
    """
    Exclusion inside Lambda_j(p) and inside blocks[i], plus unit-rate swaps
    along the bridge chain z_0, z_1, ..., z_B.
    """
    if not 0 <= i < len(partition.blocks):
        raise InputError(f"Block index {i} outside [0, {len(partition.blocks)}).")
    reference, block = set(partition.reference), set(partition.blocks[i])
    swaps = [
        (g.position(u), g.position(v), c)
        for u, v, c in g.edges
        if {u, v} <= reference or {u, v} <= block
    ]
    chain = partition.bridges[i]
    swaps.extend((g.position(a), g.position(b), 1.0) for a, b in zip(chain, chain[1:]))
    return swaps


def two_block_generator(g: WeightedGraph, partition: Partition, i: int) -> WeightedGraph:
    """The two-block dynamics as a weighted graph on Lambda_j(p) and blocks[i]."""
    swaps = two_block_swaps(g, partition, i)
    return build_graph((g.vertices[a], g.vertices[b], c) for a, b, c in swaps)


def two_block_comparison(
    g: WeightedGraph, partition: Partition, i: int, alpha: float, cap: int = MPL_CAP
) -> dict:
    """
    lambda_min of (1 + sum_k R_eff(z_k, z_{k+1})) A - A2 on the full graph,
    with A the exclusion form of g and A2 the two-block form.
    """
    check_state_space(g.n, cap)
    chain = partition.bridges[i]
    factor = 1.0 + sum(effective_resistance_between(g, a, b) for a, b in zip(chain, chain[1:]))
    mu = _bernoulli(g.n, alpha)
    lowest = min_comparison_eigenvalue(g.n, graph_swaps(g), two_block_swaps(g, partition, i), factor, mu)
    return {"block": i, "factor": factor, "lambda_min": lowest, "passed": lowest >= -PSD_TOL}


def mpl_graph_table(g: WeightedGraph, alphas: Sequence[float] = (0.3, 0.5), cap: int = MPL_CAP) -> pd.DataFrame:
    """Moving particle check on one graph, every vertex pair."""
    check_state_space(g.n, cap)
    table = pd.DataFrame(_sweep_graph(g, alphas, "given", -1))
    logger.info(f"Moving particle check on {g.n} vertices: min eigenvalue {table['lambda_min'].min():.3e}.")
    return table
