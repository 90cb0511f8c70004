"""
Verification suites behind `verify --suite`. Each runner returns a
(result payload, named tables, checks) triple; checks carry the columns
check, passed, value, bound, residual.
"""
import logging

import numpy as np
import pandas as pd

from src.common.errors import InputError, StateSpaceTooLarge
from src.common.seeding import stream
from src.ergodicity_harness.averaging import averaging_decomposition, partition_average_bound
from src.ergodicity_harness.boundary_lemmas import BOUNDARY_CAP, verify_boundary_lemmas
from src.ergodicity_harness.bundles import get_bundle
from src.ergodicity_harness.ensembles import (
    MATCH_TOL,
    equivalence_gap_closed_form,
    verify_equivalence_of_ensembles,
    verify_two_block_bound,
)
from src.ergodicity_harness.mpl import PSD_TOL, mpl_graph_table, mpl_sweep, two_block_comparison
from src.ergodicity_harness.partition import build_partition
from src.ergodicity_harness.spectral import SPECTRAL_CAP, spectral_table
from src.exclusion_sim.boundary import BoundarySpec
from src.exclusion_sim.generator import generator_matrix, stationary_vector
from src.exclusion_sim.configuration import state_bits
from src.graph_core.families import canonical_radii
from src.graph_core.graph import WeightedGraph
from src.graph_core.metric import GraphExhaustion, ball, default_origin, eccentricity, exhaust
from src.potential_theory.marginal import stationary_marginal
from src.potential_theory.scaling import scaled_exhaustion

logger = logging.getLogger(__name__)

SUITES = ("mpl", "ensembles", "two-block", "averaging", "boundary", "spectral")
CHECK_COLUMNS = ["check", "passed", "value", "bound", "residual"]


def _checks(rows: list[dict]) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=CHECK_COLUMNS)


def graph_exhaustion(g: WeightedGraph, origin: int | None = None) -> GraphExhaustion:
    """Dyadic radii from `origin` while the ball still leaves part of g outside."""
    origin = default_origin(g) if origin is None else origin
    reach = eccentricity(g, origin)
    radii = [r for r in canonical_radii("path", max(1, reach.bit_length())) if r <= reach]
    if not radii:
        raise InputError(f"Graph around {origin} is a single vertex; nothing to exhaust.")
    return exhaust(g, origin, radii)


def run_mpl(g: WeightedGraph | None, options) -> tuple[dict, dict, pd.DataFrame]:
    alphas = tuple(options.alphas)
    if g is None:
        table = mpl_sweep(options.max_vertices, alphas, options.random_instances, options.seed)
    else:
        table = mpl_graph_table(g, alphas, cap=options.state_cap)
    checks = _checks(
        [
            {
                "check": f"mpl:{r.conductances}:{r.atlas_id}#{r.instance}:{r.x}-{r.y}:alpha={r.alpha:g}",
                "passed": bool(r.passed),
                "value": r.lambda_min,
                "bound": -PSD_TOL,
                "residual": np.nan,
            }
            for r in table.itertuples()
        ]
    )
    payload = {"pairs_checked": len(table), "min_lambda": float(table["lambda_min"].min())}
    return payload, {"mpl": table}, checks


def run_ensembles(g: WeightedGraph, options) -> tuple[dict, dict, pd.DataFrame]:
    bundle = get_bundle(options.bundle)
    origin = default_origin(g)
    p = origin if bundle.kind == "vertex" else (origin, min(v for v, _ in g.neighbors(origin)))
    support = set(bundle.support(g, p))
    sets, seen = [], set()
    for r in range(1, eccentricity(g, origin) + 2):
        members = ball(g, origin, r)
        if support <= set(members) and len(members) not in seen:
            seen.add(len(members))
            sets.append(members)
    if not sets:
        raise InputError(f"No ball around {origin} contains the support of {bundle.name}.")
    decay = verify_equivalence_of_ensembles(g, sets, bundle, p, cap=options.ball_cap)
    rows = [
        {"check": "decay_monotone", "passed": decay.monotone, "value": decay.final_gap, "bound": np.nan, "residual": np.nan}
    ]
    if bundle.name == "edge_pairs" and g.conductance(*p) == 1.0:
        for size, gap in zip(decay.table["size"], decay.table["sup_gap"]):
            if size < 2:
                continue
            closed = equivalence_gap_closed_form(int(size))
            rows.append(
                {
                    "check": f"closed_form:{size}",
                    "passed": abs(gap - closed) <= MATCH_TOL,
                    "value": gap,
                    "bound": closed,
                    "residual": abs(gap - closed),
                }
            )
    payload = {"bundle": bundle.name, "anchor": p, "final_gap": decay.final_gap, "monotone": decay.monotone}
    return payload, {"ensembles": decay.table}, _checks(rows)


def run_two_block(g: WeightedGraph | None, options) -> tuple[dict, dict, pd.DataFrame]:
    table = verify_two_block_bound(range(1, options.max_block + 1))
    rows = []
    for m, group in table.groupby("m"):
        worst = group.loc[group["value"].idxmax()]
        residual = (group["value"] - group["enumerated"]).abs().max()
        rows.append(
            {
                "check": f"hypergeometric_bound:m={m}",
                "passed": bool(group["passed"].all()),
                "value": worst["value"],
                "bound": worst["bound"],
                "residual": residual,
            }
        )
    tables = {"two_block": table}
    if g is not None and g.n <= options.state_cap:
        origin = default_origin(g)
        partition = build_partition(g, origin, options.block_radius, eccentricity(g, origin) + 1)
        comparisons = pd.DataFrame(
            [two_block_comparison(g, partition, i, options.alpha, cap=options.state_cap) for i in range(len(partition.blocks))]
        )
        tables["two_block_comparison"] = comparisons
        rows.extend(
            {"check": f"comparison:block={r.block}", "passed": bool(r.passed), "value": r.lambda_min, "bound": -PSD_TOL, "residual": np.nan}
            for r in comparisons.itertuples()
        )
    elif g is not None:
        logger.warning(f"Graph has {g.n} vertices, above the state cap {options.state_cap}; two-block comparison skipped.")
    payload = {"max_block": options.max_block, "rows": len(table)}
    return payload, tables, _checks(rows)


def run_averaging(g: WeightedGraph, options) -> tuple[dict, dict, pd.DataFrame]:
    origin = default_origin(g)
    partition = build_partition(g, origin, options.block_radius, eccentricity(g, origin) + 1)
    index = g.index
    rng = stream(options.seed, "averaging")
    records = []
    for sample in range(options.samples):
        occ = rng.integers(0, 2, g.n).tolist()
        bound = partition_average_bound(partition, occ, index)
        values = dict(zip(g.vertices, rng.standard_normal(g.n)))
        residual = averaging_decomposition(
            (partition.reference, *partition.blocks), (partition.tail,) if partition.tail else (), values, partition.ball
        )
        records.append(bound | {"sample": sample, "decomposition_residual": residual})
    table = pd.DataFrame(records)
    slack = (table["bound"] - table["lhs"]).min()
    rows = [
        {
            "check": "partition_bound",
            "passed": bool(table["holds"].all()),
            "value": table["lhs"].max(),
            "bound": table["bound"].max(),
            "residual": slack,
        },
        {
            "check": "decomposition_identity",
            "passed": bool(table["decomposition_residual"].max() <= 1e-12),
            "value": table["decomposition_residual"].max(),
            "bound": 1e-12,
            "residual": table["decomposition_residual"].max(),
        },
    ]
    payload = {
        "center": origin,
        "block_size": partition.block_size,
        "blocks": partition.count,
        "tail": len(partition.tail),
    }
    return payload, {"averaging": table}, _checks(rows)


def _chain_marginals(g: WeightedGraph, spec: BoundarySpec, cap: int) -> np.ndarray:
    pi = stationary_vector(generator_matrix(g, spec, cap=cap))
    return state_bits(g.n).T.astype(float) @ pi


def run_boundary(g: WeightedGraph, spec: BoundarySpec | None, options) -> tuple[dict, dict, pd.DataFrame]:
    if spec is None:
        raise InputError("The boundary suite needs a graph file with a boundary section.")
    if g.n > BOUNDARY_CAP:
        raise StateSpaceTooLarge(f"Boundary suite enumerates 2^{g.n} states; cap is 2^{BOUNDARY_CAP}.")
    report = verify_boundary_lemmas(g, spec, samples=options.samples, alpha=options.alpha, seed=options.seed)
    profile = report.profile
    chain = _chain_marginals(g, spec, BOUNDARY_CAP)
    gap = float(np.abs(chain - profile.rho).max())
    checks = report.checks.reindex(columns=CHECK_COLUMNS)
    checks = pd.concat(
        [
            checks,
            _checks(
                [
                    {"check": "marginal_duality", "passed": profile.agreement <= 1e-8, "value": profile.agreement, "bound": 1e-8, "residual": profile.agreement},
                    {"check": "marginal_full_chain", "passed": gap <= 1e-8, "value": gap, "bound": 1e-8, "residual": gap},
                ]
            ),
        ],
        ignore_index=True,
    )
    payload = {
        "sup_term": report.sup_term,
        "flow_energy_bound": report.flow_energy_bound,
        "delta": spec.delta,
        "rho": dict(zip(g.vertices, profile.rho.tolist())),
    }
    return payload, {"boundary": checks}, checks


def run_spectral(g: WeightedGraph, options) -> tuple[dict, dict, pd.DataFrame]:
    ex = scaled_exhaustion(graph_exhaustion(g), volume_mode=options.volume_mode, exit_mode=options.exit_mode)
    table = spectral_table(
        ex, list(ex.levels), get_bundle(options.bundle), options.block_radius, alpha=options.alpha, cap=SPECTRAL_CAP
    )
    computed = table[~table["skipped"]]
    values = computed["normalized"].to_numpy()
    steps = np.diff(values)
    worst = float(steps.max()) if steps.size else 0.0
    rows = [
        {
            "check": "nonincreasing",
            "passed": bool(worst <= 1e-10),
            "value": worst,
            "bound": 1e-10,
            "residual": np.nan,
        }
    ]
    rows.extend(
        {"check": f"finite:level={r.level}", "passed": bool(np.isfinite(r.normalized)), "value": r.normalized, "bound": np.nan, "residual": np.nan}
        for r in computed.itertuples()
    )
    payload = {"levels": len(table), "computed": len(computed)}
    return payload, {"spectral": table}, _checks(rows)
