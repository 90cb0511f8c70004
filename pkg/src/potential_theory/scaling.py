"""Scale tables of an exhaustion: volumes, exit times, resistance probes and fitted exponents."""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np
import pandas as pd
from scipy.sparse.csgraph import shortest_path

from src.common.errors import InputError, TooFewLevels
from src.common.seeding import stream
from src.exclusion_sim.boundary import make_boundary_spec
from src.graph_core.graph import WeightedGraph
from src.graph_core.metric import GraphExhaustion, ball, eps_index
from src.potential_theory.harmonic import effective_resistance, effective_resistance_between
from src.potential_theory.linalg import DEFAULT_TOL
from src.potential_theory.marginal import stationary_marginal
from src.potential_theory.walks import exit_times

logger = logging.getLogger(__name__)

VOLUME_MODES = ("measure", "count", "closed")
EXIT_MODES = ("max", "origin")


@dataclass(frozen=True)
class ScalingReport:
    levels: pd.DataFrame
    probes: pd.DataFrame
    alpha_hat: float
    beta_hat: float
    alpha_residual: float
    beta_residual: float

    @property
    def volumes(self) -> tuple[float, ...]:
        return tuple(self.levels["volume"])

    @property
    def time_scales(self) -> tuple[float, ...]:
        return tuple(self.levels["time_scale"])


def level_scales(
    ex: GraphExhaustion,
    level: int,
    volume_mode: str = "measure",
    exit_mode: str = "max",
    tol: float = DEFAULT_TOL,
) -> tuple[float, float, dict[int, float]]:
    """
    (V_N, T_N, exit-time table) for one level; exit times are taken in the mother graph.

    volume_mode "measure" and "count" size the open ball B(o, r_N); "closed"
    takes the measure of the closed ball {d <= r_N}, which on the gasket is
    the level-N corner cell.
    """
    if volume_mode not in VOLUME_MODES or exit_mode not in EXIT_MODES:
        raise InputError(f"Unknown volume/exit mode: {volume_mode}/{exit_mode}.")
    members = ex.subgraph(level).vertices
    if volume_mode == "closed":
        volume = ex.mother.volume(ball(ex.mother, ex.origin, ex.radius(level) + 1))
    elif volume_mode == "measure":
        volume = ex.mother.volume(members)
    else:
        volume = float(len(members))
    times = exit_times(ex.mother, members, tol)
    time_scale = max(times.values()) if exit_mode == "max" else times[ex.origin]
    return volume, time_scale, times


def _fit(radii: np.ndarray, values: np.ndarray, window: int) -> tuple[float, float]:
    x, y = np.log(radii[-window:]), np.log(values[-window:])
    if x.size < 2:
        return math.nan, math.nan
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), residual


def _probe_pairs(sub: WeightedGraph, members: tuple[int, ...], k: int, rng) -> list[tuple[int, int]]:
    if len(members) < 2:
        return []
    positions = sub.positions(members)
    dist = shortest_path(sub.conductance_matrix, unweighted=True, indices=positions)[:, positions]
    i, j = np.unravel_index(int(np.argmax(dist)), dist.shape)
    pairs = [tuple(sorted((members[i], members[j])))]
    for _ in range(k):
        y, z = rng.choice(len(members), size=2, replace=False)
        pairs.append(tuple(sorted((members[y], members[z]))))
    return pairs


def scaling_report(
    ex: GraphExhaustion,
    eps_values: Iterable[float] = (0.5, 1.0),
    probe_pairs: int = 8,
    seed: int = 0,
    volume_mode: str = "measure",
    exit_mode: str = "max",
    fit_window: int = 3,
    sr_multiplier: int = 2,
    tol: float = DEFAULT_TOL,
) -> ScalingReport:
    """
    Per level: V_N, T_N, the ratio T_N / V_N, Einstein and strong-recurrence
    diagnostics at the origin, and for each eps the rescaled-resistance
    statistic (T_N / V_N) / R_eff(y, z) over probe pairs in B(o, r_[eps N]).
    Exponents are least-squares slopes of log V_N and log T_N against
    log r_N over the last `fit_window` levels.
    """
    if len(ex.radii) < 3:
        raise TooFewLevels(f"Scaling needs at least 3 levels, got {len(ex.radii)}.")
    if volume_mode not in VOLUME_MODES or exit_mode not in EXIT_MODES:
        raise InputError(f"Unknown volume/exit mode: {volume_mode}/{exit_mode}.")

    mother, origin = ex.mother, ex.origin
    level_rows, probe_rows = [], []
    for level in ex.levels:
        radius = ex.radius(level)
        sub = ex.subgraph(level)
        volume, time_scale, times = level_scales(ex, level, volume_mode, exit_mode, tol)

        inside = set(sub.vertices)
        outside = [v for v in mother.vertices if v not in inside]
        r_out = effective_resistance(mother, {origin}, outside, tol) if outside else math.nan
        einstein = times[origin] / (mother.volume(sub.vertices) * r_out)
        wider = set(ball(mother, origin, sr_multiplier * radius))
        wider_outside = [v for v in mother.vertices if v not in wider]
        sr_ratio = (
            effective_resistance(mother, {origin}, wider_outside, tol) / r_out
            if wider_outside
            else math.nan
        )

        worst = {}
        for eps in eps_values:
            inner_radius = ex.radius(eps_index(eps, level))
            members = ball(sub, origin, inner_radius)
            rng = stream(seed, f"probe-pairs:{level}:{eps}")
            stats = []
            for y, z in _probe_pairs(sub, members, probe_pairs, rng):
                resistance = effective_resistance_between(sub, y, z, tol)
                statistic = (time_scale / volume) / resistance
                stats.append(statistic)
                probe_rows.append(
                    {"level": level, "eps": eps, "y": y, "z": z,
                     "resistance": resistance, "statistic": statistic}
                )
            worst[eps] = min(stats) if stats else math.nan

        row = {
            "level": level,
            "radius": radius,
            "vertices": sub.n,
            "volume": volume,
            "time_scale": time_scale,
            "ratio": time_scale / volume,
            "einstein": einstein,
            "sr_ratio": sr_ratio,
        }
        row.update({f"min_statistic_eps_{eps:g}": value for eps, value in worst.items()})
        level_rows.append(row)
        logger.info(
            f"Level {level}: r={radius}, |B|={sub.n}, V={volume:.6g}, T={time_scale:.6g}."
        )

    levels = pd.DataFrame(level_rows)
    radii = levels["radius"].to_numpy(dtype=float)
    for column, out in (("volume", "local_alpha"), ("time_scale", "local_beta")):
        values = levels[column].to_numpy(dtype=float)
        local = np.full(values.size, math.nan)
        local[1:] = np.diff(np.log(values)) / np.diff(np.log(radii))
        levels[out] = local

    window = min(fit_window, len(levels))
    alpha_hat, alpha_res = _fit(radii, levels["volume"].to_numpy(dtype=float), window)
    beta_hat, beta_res = _fit(radii, levels["time_scale"].to_numpy(dtype=float), window)
    return ScalingReport(levels, pd.DataFrame(probe_rows), alpha_hat, beta_hat, alpha_res, beta_res)


def scaled_exhaustion(
    ex: GraphExhaustion,
    volume_mode: str = "measure",
    exit_mode: str = "max",
    tol: float = DEFAULT_TOL,
) -> GraphExhaustion:
    """The exhaustion with its (V_N, T_N) table filled in."""
    volumes, time_scales = [], []
    for level in ex.levels:
        volume, time_scale, _ = level_scales(ex, level, volume_mode, exit_mode, tol)
        volumes.append(volume)
        time_scales.append(time_scale)
    return ex.with_scales(volumes, time_scales)


def boundary_assumption_table(
    ex: GraphExhaustion,
    reservoirs_for_level: Callable[[int, WeightedGraph], Mapping[int, tuple[float, float]]],
    tol: float = DEFAULT_TOL,
) -> pd.DataFrame:
    """
    Per level: (T_N / V_N) times the total boundary flow of rho_N, the same
    factor times its Dirichlet energy, and the largest gap between rho_N(a)
    and the reservoir density lambda_+(a) / (lambda_+(a) + lambda_-(a)).
    Single-vertex levels carry no edge for a reservoir and give NaN rows.
    """
    if ex.volumes is None:
        ex = scaled_exhaustion(ex, tol=tol)
    rows = []
    for level in ex.levels:
        sub = ex.subgraph(level)
        if sub.n == 1:
            logger.info(f"Level {level} ball is a single vertex; reported as NaN.")
            rows.append({"level": level, "scaled_flow": math.nan, "scaled_energy": math.nan, "rate_gap": math.nan})
            continue
        spec = make_boundary_spec(sub, reservoirs_for_level(level, sub))
        profile = stationary_marginal(sub, spec, tol)
        factor = ex.time_scales[level - 1] / ex.volumes[level - 1]
        rows.append(
            {
                "level": level,
                "scaled_flow": factor * profile.total_flow,
                "scaled_energy": factor * profile.energy,
                "rate_gap": max(abs(profile[a] - spec.target_density(a)) for a in spec.boundary),
            }
        )
    return pd.DataFrame(rows)
