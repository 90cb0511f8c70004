"""
Canonical (fixed particle number) measures against product measures.

Exact enumeration is used for small sets; block-average observables go
through the hypergeometric law instead and work at any size.
"""
import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np
import pandas as pd
from scipy.stats import hypergeom

from src.common.errors import InputError, KOutOfRange, StateSpaceTooLarge, UnequalSizes
from src.ergodicity_harness.bundles import DEFAULT_BALL_CAP, LocalFunctionBundle, global_average_function
from src.exclusion_sim.configuration import state_bits
from src.graph_core.graph import WeightedGraph

logger = logging.getLogger(__name__)

DEFAULT_CANONICAL_CAP = 22
DEFAULT_TWO_BLOCK_CAP = 14
MATCH_TOL = 1e-12


def canonical_expectation(
    sites: Iterable,
    k: int,
    observable: Callable[[np.ndarray], float],
    cap: int = DEFAULT_CANONICAL_CAP,
) -> float:
    """
    Uniform average of observable over configurations of `sites` with
    exactly k particles (the exchangeable measure on that hyperplane). The
    observable receives a 0/1 array aligned with sorted(sites).
    """
    size = len(set(sites))
    if not 0 <= k <= size:
        raise KOutOfRange(f"k={k} outside [0, {size}].")
    if size > cap:
        raise StateSpaceTooLarge(f"Exact enumeration is capped at {cap} sites, got {size}.")
    eta = np.zeros(size, dtype=np.int8)
    total = []
    for occupied in combinations(range(size), k):
        eta[:] = 0
        eta[list(occupied)] = 1
        total.append(observable(eta))
    return math.fsum(total) / math.comb(size, k)


def two_block_gap_law(m: int, k: int):
    """Particles in the first of two m-blocks under the canonical measure with k particles."""
    if not 0 <= k <= 2 * m:
        raise KOutOfRange(f"k={k} outside [0, {2 * m}].")
    return hypergeom(2 * m, m, k)


def two_block_gap_expectation(m: int, k: int) -> float:
    """E|avg over block 1 - avg over block 2| = E|2Y - k| / m with Y hypergeometric."""
    law = two_block_gap_law(m, k)
    y = np.arange(max(0, k - m), min(k, m) + 1)
    return float(np.sum(law.pmf(y) * np.abs(2 * y - k)) / m)


def two_block_bound(m: int) -> float:
    return m**-0.5 * math.sqrt(m / (2 * m - 1))


def two_block_variance(m: int, k: int) -> float:
    return (k / 2) * (1 - k / (2 * m)) * (m / (2 * m - 1))


def _block_histogram(m: int) -> np.ndarray:
    """Number of 0/1 configurations of an m-block per particle count, by enumeration."""
    return np.bincount(state_bits(m).sum(axis=1), minlength=m + 1).astype(float)


def verify_two_block_bound(sizes: Iterable, cap: int = DEFAULT_TWO_BLOCK_CAP) -> pd.DataFrame:
    """
    One row per (m, k): the hypergeometric value of the canonical gap
    expectation, an enumeration cross-check (joint counts built from all
    2^m states of each block), the bound m^{-1/2}(m/(2m-1))^{1/2}, and the
    mean and variance of Y against their closed forms. Sizes are integers
    or (m1, m2) pairs, which must agree.
    """
    rows = []
    for entry in sizes:
        if isinstance(entry, (tuple, list)):
            m1, m2 = entry
            if m1 != m2:
                raise UnequalSizes(f"Blocks of sizes {m1} and {m2} differ.")
            m = int(m1)
        else:
            m = int(entry)
        if m < 1:
            raise InputError(f"Block size must be positive, got {m}.")
        histogram = _block_histogram(m) if m <= cap else None
        bound = two_block_bound(m)
        for k in range(2 * m + 1):
            value = two_block_gap_expectation(m, k)
            law = two_block_gap_law(m, k)
            y = np.arange(max(0, k - m), min(k, m) + 1)
            if histogram is not None:
                weights = histogram[y] * histogram[k - y]
                weights /= weights.sum()
                enumerated = float(np.sum(weights * np.abs(2 * y - k)) / m)
                mean_enumerated = float(np.sum(weights * y))
                var_enumerated = float(np.sum(weights * (y - mean_enumerated) ** 2))
            else:
                enumerated = var_enumerated = math.nan
            variance = two_block_variance(m, k)
            matches = histogram is None or (
                abs(value - enumerated) <= MATCH_TOL and abs(variance - var_enumerated) <= MATCH_TOL
            )
            rows.append(
                {
                    "m": m,
                    "k": k,
                    "value": value,
                    "enumerated": enumerated,
                    "bound": bound,
                    "mean": float(law.mean()),
                    "variance": variance,
                    "variance_enumerated": var_enumerated,
                    "passed": bool(value <= bound + MATCH_TOL and matches),
                }
            )
    table = pd.DataFrame(rows)
    logger.info(f"Two-block bound over sizes {sorted(table['m'].unique().tolist())}: all passed={bool(table['passed'].all())}.")
    return table


def _canonical_from_counts(coefficients: np.ndarray, support: int, size: int, k: int) -> float:
    """
    Canonical expectation of a function of `support` sites inside a set of
    `size` sites: a_m weighted by C(size - support, k - m) / C(size, k).
    """
    total = math.comb(size, k)
    weights = [
        math.comb(size - support, k - m) / total if 0 <= k - m <= size - support else 0.0
        for m in range(support + 1)
    ]
    return float(np.dot(coefficients, weights))


@dataclass(frozen=True)
class EnsembleDecay:
    table: pd.DataFrame
    monotone: bool
    final_gap: float
    threshold: float | None

    @property
    def passed(self) -> bool:
        return self.monotone and (self.threshold is None or self.final_gap < self.threshold)


def verify_equivalence_of_ensembles(
    g: WeightedGraph,
    sets: Sequence[Sequence[int]],
    bundle: LocalFunctionBundle,
    p,
    threshold: float | None = None,
    cap: int = DEFAULT_BALL_CAP,
) -> EnsembleDecay:
    """
    For each set Lambda containing the support of phi_p: the sup over k of
    |canonical expectation of phi_p with k particles - Phi_p(k / |Lambda|)|.
    Only monotone decay along the sequence is certified, not a rate.
    """
    phi = global_average_function(bundle, g, p, cap)
    support = set(phi.support)
    rows, previous = [], None
    for members in sets:
        members = set(members)
        if not support <= members:
            raise InputError(f"Set of size {len(members)} does not contain the support of {bundle.name} at {p}.")
        if previous is not None and not previous <= members:
            raise InputError("Sets must be increasing.")
        previous = members
        n = len(members)
        gaps = [
            abs(_canonical_from_counts(phi.coefficients, len(support), n, k) - phi(k / n))
            for k in range(n + 1)
        ]
        worst = int(np.argmax(gaps))
        rows.append({"size": n, "sup_gap": gaps[worst], "worst_k": worst})
    table = pd.DataFrame(rows)
    sup_gap = table["sup_gap"].to_numpy()
    monotone = bool(np.all(np.diff(sup_gap) <= MATCH_TOL))
    decay = EnsembleDecay(table=table, monotone=monotone, final_gap=float(sup_gap[-1]), threshold=threshold)
    logger.info(f"Equivalence of ensembles for {bundle.name}: sup gaps {np.round(sup_gap, 6).tolist()}.")
    return decay


def equivalence_gap_closed_form(n: int) -> float:
    """max_k |k(k-1)/(n(n-1)) - k^2/n^2| for a unit-conductance edge pair inside n sites."""
    if n < 2:
        raise InputError("The pair observable needs at least two sites.")
    return max(abs(k * (k - 1) / (n * (n - 1)) - k**2 / n**2) for k in range(n + 1))
