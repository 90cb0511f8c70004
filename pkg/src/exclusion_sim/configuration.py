"""Occupation configurations eta: V -> {0, 1} over the canonical vertex order."""
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from src.graph_core.graph import WeightedGraph


class Transition(NamedTuple):
    """swap(x, y) exchanges occupancies along an edge; flip(a) toggles a reservoir site."""
    kind: str
    sites: tuple[int, ...]

    @classmethod
    def swap(cls, x: int, y: int) -> "Transition":
        return cls("swap", (x, y) if x < y else (y, x))

    @classmethod
    def flip(cls, a: int) -> "Transition":
        return cls("flip", (a,))

    def __str__(self) -> str:
        return f"{self.kind}({','.join(map(str, self.sites))})"


@dataclass(frozen=True)
class Configuration:
    graph: WeightedGraph
    bits: tuple[int, ...]

    @classmethod
    def from_occupied(cls, g: WeightedGraph, occupied: Iterable[int]) -> "Configuration":
        occupied = set(occupied)
        return cls(g, tuple(1 if v in occupied else 0 for v in g.vertices))

    @classmethod
    def from_array(cls, g: WeightedGraph, values) -> "Configuration":
        values = np.asarray(values).astype(np.int64)
        return cls(g, tuple(int(b) for b in values))

    @classmethod
    def from_index(cls, g: WeightedGraph, state: int) -> "Configuration":
        return cls(g, tuple((state >> i) & 1 for i in range(g.n)))

    @classmethod
    def empty(cls, g: WeightedGraph) -> "Configuration":
        return cls(g, (0,) * g.n)

    @classmethod
    def full(cls, g: WeightedGraph) -> "Configuration":
        return cls(g, (1,) * g.n)

    def __getitem__(self, v: int) -> int:
        return self.bits[self.graph.position(v)]

    @property
    def particles(self) -> int:
        return sum(self.bits)

    def to_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=np.int8)

    def to_index(self) -> int:
        return sum(b << i for i, b in enumerate(self.bits))

    def swapped(self, x: int, y: int) -> "Configuration":
        bits = list(self.bits)
        i, j = self.graph.position(x), self.graph.position(y)
        bits[i], bits[j] = bits[j], bits[i]
        return Configuration(self.graph, tuple(bits))

    def flipped(self, a: int) -> "Configuration":
        bits = list(self.bits)
        i = self.graph.position(a)
        bits[i] = 1 - bits[i]
        return Configuration(self.graph, tuple(bits))

    def apply(self, transition: Transition) -> "Configuration":
        if transition.kind == "swap":
            return self.swapped(*transition.sites)
        return self.flipped(transition.sites[0])


def state_bits(n: int) -> np.ndarray:
    """(2^n, n) array; row s holds the occupancies of state index s."""
    states = np.arange(2**n, dtype=np.int64)
    return ((states[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.int8)


def swap_permutation(n: int, i: int, j: int) -> np.ndarray:
    """State index map s -> s^{ij} for positions i, j."""
    states = np.arange(2**n, dtype=np.int64)
    differ = ((states >> i) ^ (states >> j)) & 1
    return states ^ (differ * ((1 << i) | (1 << j)))


def flip_permutation(n: int, i: int) -> np.ndarray:
    return np.arange(2**n, dtype=np.int64) ^ (1 << i)
