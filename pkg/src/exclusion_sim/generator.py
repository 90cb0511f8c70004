"""Full-generator linear algebra on the 2^|V| configuration space (tiny graphs)."""
import logging

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import expm_multiply, spsolve

from src.common.errors import InputError, InternalError, NotIrreducible, StateSpaceTooLarge
from src.exclusion_sim.boundary import BoundarySpec
from src.exclusion_sim.configuration import Configuration, flip_permutation, state_bits, swap_permutation
from src.exclusion_sim.measures import MeasureSpec
from src.graph_core.graph import WeightedGraph

logger = logging.getLogger(__name__)

DEFAULT_STATE_CAP = 14
DEFAULT_DENSE_LIMIT = 1024
STATIONARY_TOL = 1e-10

PARTS = ("full", "exclusion", "boundary")


def as_dense(matrix) -> np.ndarray:
    return matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix)


def check_state_space(n: int, cap: int = DEFAULT_STATE_CAP) -> None:
    if n > cap:
        raise StateSpaceTooLarge(f"{n} vertices exceed the state-space cap of {cap}.")


def generator_matrix(
    g: WeightedGraph,
    spec: BoundarySpec | None = None,
    part: str = "full",
    cap: int = DEFAULT_STATE_CAP,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
):
    """
    Rate matrix Q with Q[s, s'] the rate of s -> s' and zero row sums.
    `part` selects the exclusion part, the reservoir part or their sum.
    Dense ndarray up to `dense_limit` states, CSR above.
    """
    if part not in PARTS:
        raise InputError(f"part must be one of {PARTS}.")
    n = g.n
    check_state_space(n, cap)
    states = np.arange(2**n, dtype=np.int64)
    rows, cols, data = [], [], []

    if part in ("full", "exclusion"):
        tails, heads, cond = g.edge_arrays
        for i, j, c in zip(tails, heads, cond):
            differ = (((states >> i) ^ (states >> j)) & 1).astype(bool)
            rows.append(states[differ])
            cols.append(swap_permutation(n, i, j)[differ])
            data.append(np.full(int(differ.sum()), c))
    if part in ("full", "boundary") and spec is not None:
        for a, plus, minus in zip(spec.boundary, spec.lambda_plus, spec.lambda_minus):
            i = g.position(a)
            occupied = ((states >> i) & 1).astype(bool)
            rows.append(states)
            cols.append(flip_permutation(n, i))
            data.append(np.where(occupied, minus, plus))

    if rows:
        rows, cols, data = np.concatenate(rows), np.concatenate(cols), np.concatenate(data)
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        data = np.zeros(0)
    off = sp.csr_matrix((data, (rows, cols)), shape=(states.size, states.size))
    matrix = (off - sp.diags(np.asarray(off.sum(axis=1)).ravel())).tocsr()
    return matrix.toarray() if states.size <= dense_limit else matrix


def hyperplane_states(n: int, k: int) -> np.ndarray:
    """State indices with exactly k particles, ascending."""
    return np.flatnonzero(state_bits(n).sum(axis=1) == k)


def hyperplane_generator(matrix, n: int, k: int):
    """Restriction of a conservative generator to the k-particle hyperplane."""
    states = hyperplane_states(n, k)
    if sp.issparse(matrix):
        return matrix[states][:, states], states
    return matrix[np.ix_(states, states)], states


def gth_solve(matrix: np.ndarray) -> np.ndarray:
    """
    Stationary vector of an irreducible generator by Grassmann-Taksar-Heyman
    elimination; only off-diagonal entries are read, so no cancellation.
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    for k in range(n - 1):
        scale = a[k, k + 1:].sum()
        if scale <= 0:
            raise NotIrreducible(f"State {k} cannot reach any later state.")
        a[k + 1:, k] /= scale
        a[k + 1:, k + 1:] += np.outer(a[k + 1:, k], a[k, k + 1:])
    x = np.zeros(n)
    x[n - 1] = 1.0
    for k in range(n - 2, -1, -1):
        x[k] = x[k + 1:] @ a[k + 1:, k]
    return x / x.sum()


def stationary_vector(matrix, dense_limit: int = DEFAULT_DENSE_LIMIT, tol: float = STATIONARY_TOL) -> np.ndarray:
    """Normalized nonnegative left null vector of an irreducible generator."""
    sparse = sp.csr_matrix(matrix) if not sp.issparse(matrix) else matrix.tocsr()
    n_classes, _ = connected_components(sparse, directed=True, connection="strong")
    if n_classes != 1:
        raise NotIrreducible(
            f"Generator has {n_classes} communicating classes; restrict to one hyperplane first."
        )
    size = sparse.shape[0]
    if size == 1:
        return np.ones(1)
    if size <= dense_limit:
        pi = gth_solve(as_dense(matrix))
    else:
        system = sparse.T.tolil()
        system[size - 1, :] = np.ones(size)
        rhs = np.zeros(size)
        rhs[-1] = 1.0
        pi = spsolve(system.tocsr(), rhs)
        pi = np.clip(pi, 0.0, None)
        pi /= pi.sum()
    residual = float(np.abs(sparse.T @ pi).max())
    if residual > tol:
        raise InternalError(f"Stationary residual {residual:.3e} above {tol:.1e}.")
    logger.debug(f"Stationary vector on {size} states, residual {residual:.2e}.")
    return pi


def stationary_distribution(matrix, dense_limit: int = DEFAULT_DENSE_LIMIT) -> MeasureSpec:
    return MeasureSpec.explicit(stationary_vector(matrix, dense_limit))


def detailed_balance_check(
    g: WeightedGraph,
    measure: MeasureSpec,
    spec: BoundarySpec | None = None,
    part: str = "exclusion",
    cap: int = DEFAULT_STATE_CAP,
) -> float:
    """max over pairs of |mu(s) q(s, s') - mu(s') q(s', s)| for the chosen generator part."""
    matrix = generator_matrix(g, spec, part=part, cap=cap)
    mu = measure.state_probabilities(g.n)
    flux = sp.diags(mu) @ sp.csr_matrix(matrix)
    imbalance = (flux - flux.T).tocoo()
    return float(np.abs(imbalance.data).max(initial=0.0))


def evolve_marginals(
    g: WeightedGraph,
    spec: BoundarySpec | None,
    initial: Configuration | MeasureSpec,
    t: float,
    cap: int = DEFAULT_STATE_CAP,
) -> np.ndarray:
    """One-site marginals at time t from the exact law p_t = p_0 exp(tQ)."""
    matrix = generator_matrix(g, spec, cap=cap)
    if isinstance(initial, Configuration):
        p0 = np.zeros(2**g.n)
        p0[initial.to_index()] = 1.0
    else:
        p0 = initial.state_probabilities(g.n)
    if sp.issparse(matrix):
        pt = expm_multiply(matrix.T * t, p0)
    else:
        pt = p0 @ scipy.linalg.expm(matrix * t)
    return state_bits(g.n).T.astype(float) @ pt
