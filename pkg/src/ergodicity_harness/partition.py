"""Block partition of an eps-ball into equal blocks plus a tail."""
import logging
from dataclasses import dataclass
from functools import cached_property

import networkx as nx

from src.common.errors import BallTooSmall, InconsistentPartition, InputError
from src.graph_core.graph import WeightedGraph
from src.graph_core.metric import distances

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Partition:
    """
    B(p, r_eps) = reference block + blocks + tail. Every block has the size
    of the reference block; the tail is strictly smaller. bridges[i] lists
    z_0 (in the reference block) followed by one minimal-id vertex per
    connected component of blocks[i].
    """
    center: int
    reference: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]
    tail: tuple[int, ...]
    ball: tuple[int, ...]
    components: tuple[tuple[tuple[int, ...], ...], ...]
    bridges: tuple[tuple[int, ...], ...]

    @property
    def block_size(self) -> int:
        return len(self.reference)

    @property
    def count(self) -> int:
        """L_N: the reference block plus the carved blocks."""
        return 1 + len(self.blocks)

    @cached_property
    def pieces(self) -> tuple[tuple[int, ...], ...]:
        return (self.reference, *self.blocks, self.tail)

    def check(self) -> None:
        seen = [v for piece in self.pieces for v in piece]
        if len(seen) != len(set(seen)) or set(seen) != set(self.ball):
            raise InconsistentPartition("Blocks and tail do not cover the ball disjointly.")
        if self.center not in self.reference:
            raise InconsistentPartition("Reference block must contain its center.")
        if any(len(b) != self.block_size for b in self.blocks):
            raise InconsistentPartition("Blocks differ in size from the reference block.")
        if len(self.tail) >= self.block_size:
            raise InconsistentPartition("Tail must be smaller than a block.")
        if self.count != len(self.ball) // self.block_size:
            raise InconsistentPartition("Block count differs from floor(|ball| / block size).")


def _bfs_order(g: WeightedGraph, p: int, members: set[int]) -> list[int]:
    """Members sorted by (hop distance from p, id); every prefix is connected."""
    dist = distances(g, p)
    return sorted(members, key=lambda v: (dist[g.position(v)], v))


def reference_block(g: WeightedGraph, p: int, radius: float, size: int | None = None) -> tuple[int, ...]:
    """First `size` vertices of B(p, radius) in BFS order (all of them by default), sorted by id."""
    dist = distances(g, p)
    inner = {v for v, d in zip(g.vertices, dist) if d < radius}
    if not inner:
        raise InputError(f"Block radius {radius} gives an empty reference block.")
    order = _bfs_order(g, p, inner)
    if size is not None:
        if not 1 <= size <= len(order):
            raise InputError(f"Block size {size} outside [1, {len(order)}].")
        order = order[:size]
    return tuple(sorted(order))


def _carve(g: WeightedGraph, order: list[int], size: int) -> list[int]:
    """
    Grow one block by BFS over unassigned vertices, restarting from the
    lowest-ranked unassigned vertex when the current front runs dry.
    """
    rank = {v: r for r, v in enumerate(order)}
    block, queued = [], set()
    while len(block) < size:
        start = next(v for v in order if v not in queued)
        queue = [start]
        queued.add(start)
        while queue and len(block) < size:
            v = queue.pop(0)
            block.append(v)
            for w in sorted((w for w, _ in g.neighbors(v) if w in rank and w not in queued), key=rank.get):
                queued.add(w)
                queue.append(w)
    return block


def build_partition(
    g: WeightedGraph,
    p: int,
    block_radius: float,
    ball_radius: float,
    block_size: int | None = None,
) -> Partition:
    """
    Reference block: the first `block_size` vertices of B(p, block_radius) in
    BFS order (the whole ball by default). Remaining vertices of
    B(p, ball_radius) are carved greedily into blocks of the same size.
    """
    dist = distances(g, p)
    outer = {v for v, d in zip(g.vertices, dist) if d < ball_radius}
    if not block_radius < ball_radius:
        raise BallTooSmall(f"B({p}, {block_radius}) is not strictly inside B({p}, {ball_radius}).")
    reference = reference_block(g, p, block_radius, block_size)
    size = len(reference)
    count = len(outer) // size
    if count < 2:
        raise BallTooSmall(f"Ball of {len(outer)} vertices holds fewer than two blocks of size {size}.")

    order = _bfs_order(g, p, outer - set(reference))
    blocks = []
    for _ in range(count - 1):
        block = _carve(g, order, size)
        blocks.append(tuple(sorted(block)))
        taken = set(block)
        order = [v for v in order if v not in taken]

    nx_graph = g.to_networkx()
    z0 = min(reference)
    components, bridges = [], []
    for block in blocks:
        parts = sorted(
            (tuple(sorted(c)) for c in nx.connected_components(nx_graph.subgraph(block))),
            key=lambda c: c[0],
        )
        components.append(tuple(parts))
        bridges.append((z0, *(c[0] for c in parts)))

    partition = Partition(
        center=p,
        reference=tuple(sorted(reference)),
        blocks=tuple(blocks),
        tail=tuple(sorted(order)),
        ball=tuple(sorted(outer)),
        components=tuple(components),
        bridges=tuple(bridges),
    )
    partition.check()
    logger.debug(
        f"Partition at {p}: {partition.count} blocks of {size}, tail {len(partition.tail)}, "
        f"largest component count {max((len(c) for c in components), default=0)}."
    )
    return partition
