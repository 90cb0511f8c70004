"""Exact event-driven simulation of the (boundary-driven) exclusion process."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from src.common.errors import InputError, ZeroTotalRate
from src.common.seeding import RNG_ALGORITHM, stream
from src.exclusion_sim.boundary import BoundarySpec
from src.exclusion_sim.configuration import Configuration, Transition
from src.exclusion_sim.measures import MeasureSpec
from src.exclusion_sim.observers import Observer
from src.exclusion_sim.rate_tree import RateTree
from src.exclusion_sim.rates import transition_catalogue
from src.graph_core.graph import WeightedGraph

logger = logging.getLogger(__name__)


@dataclass
class Trajectory:
    initial: Configuration
    time_scale: float
    horizon: float
    events: list[tuple[float, Transition]] = field(default_factory=list)
    observables: dict = field(default_factory=dict)
    event_count: int = 0
    absorbed: bool = False
    rng: str = RNG_ALGORITHM

    def final(self) -> Configuration:
        return configuration_at(self, self.horizon)


def configuration_at(trajectory: Trajectory, t: float) -> Configuration:
    """Replay the event log up to and including time t."""
    eta = trajectory.initial
    for time, transition in trajectory.events:
        if time > t:
            break
        eta = eta.apply(transition)
    return eta


class ExclusionSimulator:
    """
    Competing exponential clocks over a fixed transition catalogue. The
    holding time is exponential at (total rate * time_scale); the next
    transition is drawn proportionally to its rate from a partial-sum tree,
    and only transitions touching the changed sites are re-rated.
    """

    def __init__(self, g: WeightedGraph, spec: BoundarySpec | None = None):
        self.graph = g
        self.spec = spec
        self.transitions = transition_catalogue(g, spec)
        self._sites = [tuple(g.index[v] for v in t.sites) for t in self.transitions]
        self._kind_swap = [t.kind == "swap" for t in self.transitions]
        self._base = [c for _, _, c in g.edges]
        if spec is not None:
            self._flip_rates = list(zip(spec.lambda_plus, spec.lambda_minus))
        else:
            self._flip_rates = []
        incident: list[list[int]] = [[] for _ in range(g.n)]
        for k, sites in enumerate(self._sites):
            for i in sites:
                incident[i].append(k)
        self._incident = [tuple(ks) for ks in incident]
        logger.info(
            f"ExclusionSimulator initialized: {g.n} sites, {len(self.transitions)} transitions."
        )

    def _rate(self, k: int, occ: list[int]) -> float:
        sites = self._sites[k]
        if self._kind_swap[k]:
            return self._base[k] if occ[sites[0]] != occ[sites[1]] else 0.0
        plus, minus = self._flip_rates[k - len(self._base)]
        return minus if occ[sites[0]] else plus

    def run(
        self,
        eta0: Configuration,
        time_scale: float,
        horizon: float,
        rng: np.random.Generator,
        observers: Sequence[Observer] = (),
        record_events: bool = True,
    ) -> Trajectory:
        if time_scale <= 0 or horizon <= 0:
            raise InputError("time_scale and horizon must be positive.")
        occ = list(eta0.bits)
        tree = RateTree(self._rate(k, occ) for k in range(len(self.transitions)))
        trajectory = Trajectory(initial=eta0, time_scale=time_scale, horizon=horizon)
        for observer in observers:
            observer.start(0.0, occ)

        t = 0.0
        try:
            while True:
                total = tree.total
                if total <= 0.0:
                    raise ZeroTotalRate("Absorbing configuration.")
                t += rng.exponential(1.0 / (total * time_scale))
                if t >= horizon:
                    break
                k = tree.find(rng.random() * total)
                changed = self._sites[k]
                for i in changed:
                    occ[i] = 1 - occ[i]
                for i in changed:
                    for j in self._incident[i]:
                        tree.update(j, self._rate(j, occ))
                trajectory.event_count += 1
                if record_events:
                    trajectory.events.append((t, self.transitions[k]))
                for observer in observers:
                    observer.update(t, changed, occ)
        except ZeroTotalRate:
            trajectory.absorbed = True
            logger.debug(f"Absorbed after {trajectory.event_count} events.")

        for observer in observers:
            observer.finish(horizon, occ)
            trajectory.observables[observer.name] = observer.result()
        return trajectory


def simulate(
    g: WeightedGraph,
    spec: BoundarySpec | None,
    eta0: Configuration,
    time_scale: float,
    horizon: float,
    observers: Sequence[Observer] = (),
    seed: int = 0,
    index: int = 0,
    record_events: bool = True,
) -> Trajectory:
    rng = stream(seed, "trajectory", index)
    return ExclusionSimulator(g, spec).run(eta0, time_scale, horizon, rng, observers, record_events)


def run_trajectories(
    g: WeightedGraph,
    spec: BoundarySpec | None,
    initial: Configuration | MeasureSpec,
    time_scale: float,
    horizon: float,
    count: int,
    seed: int,
    observer_factory: Callable[[], Sequence[Observer]] = tuple,
    label: str = "trajectory",
    threads: int = 1,
    record_events: bool = False,
) -> list[Trajectory]:
    """
    `count` independent trajectories. Trajectory i draws its initial state
    (when `initial` is a measure) and its path from the stream
    (seed, label, i), so results do not depend on `threads`.
    """
    simulator = ExclusionSimulator(g, spec)

    def one(i: int) -> Trajectory:
        rng = stream(seed, label, i)
        eta0 = initial.sample(g, rng) if isinstance(initial, MeasureSpec) else initial
        return simulator.run(eta0, time_scale, horizon, rng, observer_factory(), record_events)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(count)))
    else:
        results = [one(i) for i in range(count)]
    logger.info(
        f"Ran {count} trajectories ({label}), mean events {np.mean([r.event_count for r in results]):.1f}."
    )
    return results
