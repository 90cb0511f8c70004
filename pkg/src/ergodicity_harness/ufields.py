"""Replacement fields: local function minus its global average at a block density."""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from src.common.errors import InconsistentPartition, UnknownVertex
from src.ergodicity_harness.bundles import DEFAULT_BALL_CAP, GlobalAverage, LocalFunctionBundle, global_average_function
from src.ergodicity_harness.partition import Partition
from src.graph_core.graph import WeightedGraph

logger = logging.getLogger(__name__)

FIELDS = ("full", "one_block", "two_block", "block_gap")


@dataclass(frozen=True)
class UFieldContext:
    """
    Everything a U-field needs at one anchor: the bundle, its global average,
    the eps-ball B(p, r_eps), the reference block Lambda_j(p) and optionally a
    second block Lambda_j(y). Vertex sets are stored as positions.
    """
    graph: WeightedGraph
    bundle: LocalFunctionBundle
    anchor: object
    phi: GlobalAverage
    ball: tuple[int, ...]
    block: tuple[int, ...]
    other: tuple[int, ...] | None = None

    @property
    def support(self) -> tuple[int, ...]:
        """Positions any of the fields can read."""
        local = self.graph.positions(self.phi.support).tolist()
        return tuple(sorted(set(local) | set(self.ball) | set(self.block) | set(self.other or ())))


@dataclass(frozen=True)
class UFields:
    full: float
    one_block: float
    two_block: float
    block_gap: float
    residual: float


def _positions(g: WeightedGraph, vertices: Iterable[int], label: str) -> tuple[int, ...]:
    try:
        return tuple(int(i) for i in g.positions(sorted(vertices)))
    except UnknownVertex as exc:
        raise InconsistentPartition(f"{label} has a vertex outside the graph: {exc}") from None


def field_context(
    g: WeightedGraph,
    bundle: LocalFunctionBundle,
    anchor,
    block: Iterable[int],
    ball: Iterable[int],
    other: Iterable[int] | None = None,
    cap: int = DEFAULT_BALL_CAP,
) -> UFieldContext:
    block = _positions(g, block, "block")
    ball = _positions(g, ball, "ball")
    if not block or not ball:
        raise InconsistentPartition("Block and ball must be nonempty.")
    if not set(block) <= set(ball):
        raise InconsistentPartition("Reference block must lie inside the ball.")
    if other is not None:
        other = _positions(g, other, "second block")
        if len(other) != len(block) or set(other) & set(block):
            raise InconsistentPartition("Second block must match the reference size and be disjoint from it.")
    return UFieldContext(
        graph=g,
        bundle=bundle,
        anchor=anchor,
        phi=global_average_function(bundle, g, anchor, cap),
        ball=ball,
        block=block,
        other=other,
    )


def partition_context(
    g: WeightedGraph,
    bundle: LocalFunctionBundle,
    partition: Partition,
    anchor=None,
    second: int | None = None,
    cap: int = DEFAULT_BALL_CAP,
) -> UFieldContext:
    """Context on a partition; `second` picks blocks[second] as Lambda_j(y)."""
    anchor = partition.center if anchor is None else anchor
    if bundle.anchor(anchor) != partition.center:
        raise InconsistentPartition(f"Anchor {anchor} is not centred at {partition.center}.")
    other = partition.blocks[second] if second is not None else None
    return field_context(g, bundle, anchor, partition.reference, partition.ball, other, cap)


def _average(occ: Sequence[int], positions: Sequence[int]) -> float:
    return math.fsum(occ[i] for i in positions) / len(positions)


def u_fields(ctx: UFieldContext, occ: Sequence[int]) -> UFields:
    """
    full = phi_p - Phi_p(avg over the ball), one_block = phi_p - Phi_p(avg
    over Lambda_j(p)), two_block = Phi_p(block avg) - Phi_p(ball avg) and
    block_gap = avg over Lambda_j(p) - avg over Lambda_j(y) (nan without a
    second block). residual = |full - (one_block + two_block)|.
    """
    if len(occ) != ctx.graph.n:
        raise InconsistentPartition(f"Configuration has {len(occ)} sites, graph has {ctx.graph.n}.")
    phi = ctx.bundle(ctx.graph, ctx.anchor, occ)
    block_avg = _average(occ, ctx.block)
    at_ball = ctx.phi(_average(occ, ctx.ball))
    at_block = ctx.phi(block_avg)
    full = phi - at_ball
    one_block = phi - at_block
    two_block = at_block - at_ball
    gap = block_avg - _average(occ, ctx.other) if ctx.other else math.nan
    return UFields(
        full=full,
        one_block=one_block,
        two_block=two_block,
        block_gap=gap,
        residual=abs(full - (one_block + two_block)),
    )


def field_function(ctx: UFieldContext, name: str) -> Callable[[Sequence[int]], float]:
    """Single field as a callable on occupancy lists, for time integrals."""
    if name not in FIELDS:
        raise InconsistentPartition(f"Unknown field '{name}'; choose from {FIELDS}.")
    if name == "block_gap" and not ctx.other:
        raise InconsistentPartition("block_gap needs a second block.")

    def value(occ):
        return getattr(u_fields(ctx, occ), name)

    return value

