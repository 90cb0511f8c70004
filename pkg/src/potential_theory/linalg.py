import logging

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from src.common.errors import SingularSystem

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
MAX_REFINEMENTS = 3


def _relative_residual(matrix, x, rhs) -> float:
    scale = max(float(np.abs(rhs).max(initial=0.0)), 1.0)
    return float(np.abs(rhs - matrix @ x).max(initial=0.0)) / scale


def sparse_solve(matrix, rhs, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, float]:
    """
    Solve matrix @ x = rhs by sparse LU with iterative refinement.

    rhs may be a vector or a dense 2-D block of right-hand sides sharing the
    factorization. Returns (x, relative residual).
    """
    rhs = np.asarray(rhs, dtype=float)
    if matrix.shape[0] == 0:
        return np.zeros_like(rhs), 0.0
    try:
        lu = splu(sp.csc_matrix(matrix))
    except RuntimeError as e:
        raise SingularSystem(f"Factorization failed: {e}") from e
    x = lu.solve(rhs)
    residual = _relative_residual(matrix, x, rhs)
    for step in range(MAX_REFINEMENTS):
        if residual <= tol * 1e-2:
            break
        x = x + lu.solve(rhs - matrix @ x)
        residual = _relative_residual(matrix, x, rhs)
        logger.debug(f"Refinement step {step + 1}: residual {residual:.3e}")
    if not np.all(np.isfinite(x)):
        raise SingularSystem("Solve produced non-finite values.")
    if residual > tol:
        logger.warning(f"Sparse solve residual {residual:.3e} above tolerance {tol:.1e}.")
    return x, residual
