"""
Monte Carlo local-ergodicity experiment on an exhaustion.

For every level N and eps, M trajectories of the speeded-up process run to
the horizon; the time integral of each requested replacement field at each
probe point is exact (piecewise-constant paths), and the exceedance
frequency of |integral| > delta is reported with its confidence interval.
"""
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
import pandas as pd
from scipy.stats import beta, norm

from src.common.errors import InsufficientTrajectories, ValidationError
from src.ergodicity_harness.bundles import BUNDLES, default_anchor
from src.ergodicity_harness.partition import build_partition, reference_block
from src.ergodicity_harness.ufields import field_context, field_function
from src.exclusion_sim.boundary import make_boundary_spec
from src.exclusion_sim.configuration import Configuration
from src.exclusion_sim.measures import MeasureSpec
from src.exclusion_sim.observers import BoundaryIntegral, FieldIntegral
from src.exclusion_sim.simulator import run_trajectories
from src.graph_core.families import FAMILIES, canonical_radii, family_exhaustion
from src.graph_core.graph import WeightedGraph
from src.graph_core.io import read_graph
from src.graph_core.metric import GraphExhaustion, ball, default_origin, distances, exhaust, probe_points
from src.potential_theory.marginal import stationary_marginal
from src.potential_theory.scaling import scaled_exhaustion

logger = logging.getLogger(__name__)

EXPERIMENT_FIELDS = ("full", "one_block", "two_block")
PROBES = ("origin", "interior", "near_boundary")
RESERVOIR_PLACEMENTS = ("none", "origin", "rim")
BOUNDARY_WEIGHTS = ("constant", "ramp")


@dataclass(frozen=True)
class ExperimentConfig:
    """
    `graph` is a family name or the path of a graph JSON file; `levels` are
    the exhaustion levels N under test. The reference block is the BFS-first
    part of B(p, block_radius) of size `block_size` (whole ball when unset).
    """
    graph: str
    horizon: float
    levels: tuple[int, ...] = (2, 3, 4)
    eps: tuple[float, ...] = (0.5,)
    block_radius: float = 2.0
    block_size: int | None = None
    bundle: str = "occupation"
    fields: tuple[str, ...] = ("one_block",)
    delta: float = 0.1
    alpha: float = 0.5
    trajectories: int = 1000
    seed: int = 0
    confidence: float = 0.95
    probes: tuple[str, ...] = ("origin",)
    reservoirs: str = "none"
    lambda_plus: float = 1.0
    lambda_minus: float = 1.0
    boundary_weight: str = "constant"
    volume_mode: str = "measure"
    exit_mode: str = "max"
    threads: int = 1

    def __post_init__(self):
        if not self.graph:
            raise ValidationError("graph", "a family name or graph file is required")
        if not self.horizon > 0:
            raise ValidationError("horizon", f"must be positive, got {self.horizon}")
        if not self.levels or any(int(n) != n or n < 1 for n in self.levels):
            raise ValidationError("levels", f"must be positive integers, got {self.levels}")
        if not self.eps or any(not 0.0 < e <= 1.0 for e in self.eps):
            raise ValidationError("epsilon", f"values must lie in (0, 1], got {self.eps}")
        if not self.block_radius > 0:
            raise ValidationError("block_radius", "must be positive")
        if self.block_size is not None and self.block_size < 1:
            raise ValidationError("block_size", "must be at least 1")
        if self.bundle not in BUNDLES:
            raise ValidationError("bundle", f"unknown bundle {self.bundle!r}; choose from {sorted(BUNDLES)}")
        if not self.fields or any(f not in EXPERIMENT_FIELDS for f in self.fields):
            raise ValidationError("fields", f"choose from {EXPERIMENT_FIELDS}")
        if not self.delta > 0:
            raise ValidationError("delta", "must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValidationError("alpha", "must lie in [0, 1]")
        if self.trajectories < 1:
            raise ValidationError("trajectories", "need at least one trajectory")
        if not 0.0 < self.confidence < 1.0:
            raise ValidationError("confidence", "must lie in (0, 1)")
        if not self.probes or any(p not in PROBES for p in self.probes):
            raise ValidationError("probes", f"choose from {PROBES}")
        if self.reservoirs not in RESERVOIR_PLACEMENTS:
            raise ValidationError("reservoirs", f"choose from {RESERVOIR_PLACEMENTS}")
        if not (self.lambda_plus > 0 and self.lambda_minus > 0):
            raise ValidationError("lambda_plus", "reservoir rates must be positive")
        if self.boundary_weight not in BOUNDARY_WEIGHTS:
            raise ValidationError("boundary_weight", f"choose from {BOUNDARY_WEIGHTS}")
        if self.threads < 1:
            raise ValidationError("threads", "must be at least 1")

    @property
    def needs_ball(self) -> bool:
        return any(f in ("full", "two_block") for f in self.fields)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    curves: pd.DataFrame
    boundary: pd.DataFrame
    scales: pd.DataFrame = field(repr=False)

    def trend(self, field_name: str, eps: float, probe: str = "sup", policy: str | None = None) -> pd.Series:
        """Estimate (point or upper bound) by level for one curve."""
        rows = self.curves[
            (self.curves["field"] == field_name) & (self.curves["eps"] == eps) & (self.curves["probe"] == probe)
        ]
        if policy is not None:
            rows = rows[rows["policy"] == policy]
        return rows.set_index("level")["estimate"].sort_index()

    def strictly_decreasing(self, field_name: str, eps: float, probe: str = "sup", policy: str | None = None) -> bool:
        values = self.trend(field_name, eps, probe, policy).to_numpy()
        return bool(np.all(np.diff(values) < 0))


def point_estimate(exceedances: int, total: int) -> float:
    if exceedances == 0:
        raise InsufficientTrajectories(f"No exceedances in {total} trajectories.")
    return exceedances / total


def wilson_interval(exceedances: int, total: int, confidence: float) -> tuple[float, float]:
    z = norm.ppf(0.5 + confidence / 2.0)
    p = exceedances / total
    denom = 1.0 + z**2 / total
    center = (p + z**2 / (2 * total)) / denom
    half = z * math.sqrt(p * (1 - p) / total + z**2 / (4 * total**2)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def clopper_pearson_upper(exceedances: int, total: int, confidence: float) -> float:
    """One-sided upper confidence bound for a binomial proportion."""
    if exceedances >= total:
        return 1.0
    return float(beta.ppf(confidence, exceedances + 1, total - exceedances))


def build_exhaustion(config: ExperimentConfig) -> GraphExhaustion:
    top = max(config.levels)
    if config.graph in FAMILIES:
        ex = family_exhaustion(config.graph, top)
    else:
        g, _ = read_graph(config.graph)
        ex = exhaust(g, default_origin(g), canonical_radii("path", top))
    return scaled_exhaustion(ex, volume_mode=config.volume_mode, exit_mode=config.exit_mode)


def _rim_reservoirs(sub: WeightedGraph, origin: int) -> list[int]:
    """Greedy independent set, by id, of the vertices farthest from the origin."""
    dist = distances(sub, origin)
    far = dist.max()
    chosen = []
    for v, d in zip(sub.vertices, dist):
        if d == far and all(w not in chosen for w, _ in sub.neighbors(v)):
            chosen.append(v)
    return chosen


def _reservoirs(config: ExperimentConfig, sub: WeightedGraph, origin: int):
    if config.reservoirs == "none":
        return None
    sites = [origin] if config.reservoirs == "origin" else _rim_reservoirs(sub, origin)
    return make_boundary_spec(sub, {a: (config.lambda_plus, config.lambda_minus) for a in sites})


def _probe_contexts(config: ExperimentConfig, ex: GraphExhaustion, level: int, eps: float):
    sub = ex.subgraph(level)
    bundle = BUNDLES[config.bundle]
    eps_radius = ex.eps_radius(eps, level)
    if config.needs_ball and not config.block_radius < eps_radius:
        raise ValidationError(
            "block_radius", f"{config.block_radius} is not below r_eps = {eps_radius} at level {level}, eps {eps}"
        )
    points = probe_points(ex, level)
    contexts, seen = [], set()
    for name in config.probes:
        p = points[name]
        if p in seen:
            continue
        seen.add(p)
        block = reference_block(sub, p, config.block_radius, config.block_size)
        eps_ball = set(ball(sub, p, eps_radius))
        second = None
        if "two_block" in config.fields:
            partition = build_partition(sub, p, config.block_radius, eps_radius, config.block_size)
            second = partition.blocks[0]
        window = eps_ball if config.needs_ball else eps_ball | set(block)
        ctx = field_context(sub, bundle, default_anchor(bundle, sub, p), block, window, second)
        contexts.append((name, p, ctx))
    return contexts


def _estimate_row(integrals: np.ndarray, config: ExperimentConfig, volume: float) -> dict:
    total = integrals.size
    exceedances = int(np.sum(np.abs(integrals) > config.delta))
    low, high = wilson_interval(exceedances, total, config.confidence)
    try:
        estimate, kind = point_estimate(exceedances, total), "point"
    except InsufficientTrajectories:
        estimate, kind = clopper_pearson_upper(0, total, config.confidence), "upper_bound"
    return {
        "trajectories": total,
        "exceedances": exceedances,
        "p_hat": exceedances / total,
        "wilson_low": low,
        "wilson_high": high,
        "estimate": estimate,
        "estimate_kind": kind,
        "log_rate": -math.log(estimate) / volume,
        "mean_integral": float(np.mean(integrals)),
        "sd_integral": float(np.std(integrals, ddof=1)) if total > 1 else 0.0,
    }


def ergodicity_experiment(config: ExperimentConfig) -> ExperimentReport:
    ex = build_exhaustion(config)
    missing = [n for n in config.levels if n not in ex.levels]
    if missing:
        raise ValidationError("levels", f"exhaustion has no levels {missing}")
    weight = None if config.boundary_weight == "constant" else (lambda t: t)
    curve_rows, boundary_rows = [], []

    for level in sorted(config.levels):
        sub = ex.subgraph(level)
        volume, time_scale = ex.volumes[level - 1], ex.time_scales[level - 1]
        spec = _reservoirs(config, sub, ex.origin)
        if spec is None:
            policies = {"product": MeasureSpec.bernoulli(config.alpha)}
        else:
            policies = {
                "product": MeasureSpec.product(stationary_marginal(sub, spec).rho),
                "empty": Configuration.empty(sub),
            }
        for eps in config.eps:
            contexts = _probe_contexts(config, ex, level, eps)

            def observers():
                made = [
                    FieldIntegral(f"{name}:{f}", field_function(ctx, f), ctx.support)
                    for name, _, ctx in contexts
                    for f in config.fields
                ]
                if spec is not None:
                    made.extend(
                        BoundaryIntegral(f"boundary:{a}", sub.position(a), spec.target_density(a), weight)
                        for a in spec.boundary
                    )
                return made

            for policy, initial in policies.items():
                runs = run_trajectories(
                    sub,
                    spec,
                    initial,
                    time_scale,
                    config.horizon,
                    config.trajectories,
                    config.seed,
                    observer_factory=observers,
                    label=f"experiment:{level}:{eps}:{policy}",
                    threads=config.threads,
                )
                base = {
                    "level": level,
                    "eps": eps,
                    "eps_radius": ex.eps_radius(eps, level),
                    "policy": policy,
                    "volume": volume,
                    "time_scale": time_scale,
                }
                for f in config.fields:
                    per_probe = []
                    for name, p, _ in contexts:
                        integrals = np.array([r.observables[f"{name}:{f}"] for r in runs])
                        row = base | {"field": f, "probe": name, "vertex": p} | _estimate_row(integrals, config, volume)
                        per_probe.append(row)
                    curve_rows.extend(per_probe)
                    worst = max(per_probe, key=lambda r: (r["estimate"], r["exceedances"]))
                    curve_rows.append(worst | {"probe": "sup"})
                if spec is not None and eps == config.eps[0]:
                    for a in spec.boundary:
                        values = np.array([r.observables[f"boundary:{a}"] for r in runs])
                        se = float(np.std(values, ddof=1) / math.sqrt(values.size)) if values.size > 1 else math.nan
                        boundary_rows.append(
                            base | {
                                "site": a,
                                "target": spec.target_density(a),
                                "mean": float(values.mean()),
                                "standard_error": se,
                                "z_score": float(values.mean() / se) if se and se > 0 else 0.0,
                            }
                        )
        logger.info(f"Experiment level {level}: {len(sub.vertices)} vertices, T_N={time_scale:.4g}, V_N={volume:.4g}.")

    scales = pd.DataFrame(
        {"level": list(ex.levels), "radius": list(ex.radii), "volume": list(ex.volumes), "time_scale": list(ex.time_scales)}
    )
    boundary_columns = ["level", "eps", "eps_radius", "policy", "volume", "time_scale", "site", "target", "mean", "standard_error", "z_score"]
    return ExperimentReport(
        config=config,
        curves=pd.DataFrame(curve_rows),
        boundary=pd.DataFrame(boundary_rows, columns=boundary_columns),
        scales=scales,
    )
