"""
Observers see the exact piecewise-constant path: `start` with the initial
occupancies, `update` right after each event (occupancy already changed at
the listed positions), `finish` at the horizon. Integrals are exact sums of
value * holding time.
"""
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad


class Observer:
    name = "observer"

    def start(self, t0: float, occ: list[int]) -> None:
        pass

    def update(self, t: float, changed: Sequence[int], occ: list[int]) -> None:
        pass

    def finish(self, horizon: float, occ: list[int]) -> None:
        pass

    def result(self):
        raise NotImplementedError


class OccupationIntegral(Observer):
    """Integral of eta_t(x) dt for every vertex position."""
    name = "occupation_integral"

    def start(self, t0, occ):
        self._acc = [0.0] * len(occ)
        self._last = [t0] * len(occ)

    def update(self, t, changed, occ):
        for i in changed:
            self._acc[i] += (1 - occ[i]) * (t - self._last[i])
            self._last[i] = t

    def finish(self, horizon, occ):
        for i, value in enumerate(occ):
            self._acc[i] += value * (horizon - self._last[i])
            self._last[i] = horizon

    def result(self) -> np.ndarray:
        return np.array(self._acc)


class FieldIntegral(Observer):
    """Integral of f(eta_t) dt for a local field f that reads only `support` positions."""

    def __init__(self, name: str, field: Callable[[Sequence[int]], float], support: Sequence[int]):
        self.name = name
        self._field = field
        self._support = frozenset(support)

    def start(self, t0, occ):
        self._acc = 0.0
        self._last = t0
        self._value = self._field(occ)
        self._peak = abs(self._value)

    def update(self, t, changed, occ):
        if self._support.isdisjoint(changed):
            return
        self._acc += self._value * (t - self._last)
        self._last = t
        self._value = self._field(occ)
        self._peak = max(self._peak, abs(self._value))

    def finish(self, horizon, occ):
        self._acc += self._value * (horizon - self._last)
        self._last = horizon

    def result(self) -> float:
        return self._acc

    @property
    def peak(self) -> float:
        return self._peak


class BoundaryIntegral(Observer):
    """Integral of G(t) (eta_t(a) - target) dt at one reservoir site; G = 1 when omitted."""

    def __init__(self, name: str, position: int, target: float, weight: Callable[[float], float] | None = None):
        self.name = name
        self._position = position
        self._target = target
        self._weight = weight

    def _segment(self, t0, t1, value):
        if t1 <= t0:
            return 0.0
        mass = (t1 - t0) if self._weight is None else quad(self._weight, t0, t1)[0]
        return mass * (value - self._target)

    def start(self, t0, occ):
        self._acc = 0.0
        self._last = t0

    def update(self, t, changed, occ):
        if self._position in changed:
            self._acc += self._segment(self._last, t, 1 - occ[self._position])
            self._last = t

    def finish(self, horizon, occ):
        self._acc += self._segment(self._last, horizon, occ[self._position])
        self._last = horizon

    def result(self) -> float:
        return self._acc


class Snapshots(Observer):
    """Occupancies at fixed observation times."""
    name = "snapshots"

    def __init__(self, times: Sequence[float]):
        self._times = sorted(float(t) for t in times)

    def start(self, t0, occ):
        self._records = []
        self._next = 0

    def update(self, t, changed, occ):
        if self._next < len(self._times) and self._times[self._next] < t:
            before = list(occ)
            for i in changed:
                before[i] = 1 - before[i]
            while self._next < len(self._times) and self._times[self._next] < t:
                self._records.append(before)
                self._next += 1

    def finish(self, horizon, occ):
        while self._next < len(self._times) and self._times[self._next] <= horizon:
            self._records.append(list(occ))
            self._next += 1

    def result(self) -> np.ndarray:
        return np.array(self._records, dtype=np.int8).reshape(len(self._records), -1)
