"""Block-average identities behind the two-block replacement."""
import math
from typing import Callable, Mapping, Sequence

from src.common.errors import NotAPartition
from src.ergodicity_harness.partition import Partition

VertexValues = Mapping[int, float] | Callable[[int], float]


def _value(g: VertexValues, v) -> float:
    return float(g(v) if callable(g) else g[v])


def _mean(g: VertexValues, piece: Sequence) -> float:
    return math.fsum(_value(g, v) for v in piece) / len(piece)


def averaging_decomposition(
    blocks: Sequence[Sequence],
    tails: Sequence[Sequence],
    g: VertexValues,
    universe: Sequence | None = None,
) -> float:
    """
    |LHS - RHS| for
        avg(Lambda_1) - avg(Lambda)
          = sum_{i>=2} (1/L + |Lambda_i|/|Lambda|)/2 (avg(Lambda_1) - avg(Lambda_i))
          + sum_{i>=1} (1/L - |Lambda_i|/|Lambda|)/2 (avg(Lambda_1) + avg(Lambda_i))
          - sum_l |T_l|/|Lambda| avg(T_l)
    where Lambda is the disjoint union of the blocks and tails.
    """
    pieces = [tuple(b) for b in blocks] + [tuple(t) for t in tails]
    if not blocks or any(not piece for piece in pieces):
        raise NotAPartition("Need at least one block and no empty pieces.")
    members = [v for piece in pieces for v in piece]
    if len(members) != len(set(members)):
        raise NotAPartition("Pieces overlap.")
    if universe is not None and set(universe) != set(members):
        raise NotAPartition("Pieces do not cover the set.")

    size = len(members)
    count = len(blocks)
    first = _mean(g, blocks[0])
    lhs = first - _mean(g, members)
    terms = []
    for i, block in enumerate(blocks):
        share = len(block) / size
        mean = _mean(g, block)
        if i > 0:
            terms.append(0.5 * (1.0 / count + share) * (first - mean))
        terms.append(0.5 * (1.0 / count - share) * (first + mean))
    for tail in tails:
        terms.append(-len(tail) / size * _mean(g, tail))
    return abs(lhs - math.fsum(terms))


def partition_average_bound(partition: Partition, occ: Sequence[int], index: Mapping[int, int]) -> dict:
    """
    |avg(Lambda_j(p)) - avg(ball)| next to its bound: the largest gap to a
    carved block plus the remainder 2 |T| / (L |Lambda_j| + |T|).
    `index` maps vertex ids to positions in occ.
    """
    def avg(piece):
        return math.fsum(occ[index[v]] for v in piece) / len(piece)

    reference = avg(partition.reference)
    gaps = [abs(reference - avg(block)) for block in partition.blocks]
    count, size, tail = partition.count, partition.block_size, len(partition.tail)
    remainder = 2.0 * tail / (count * size + tail)
    lhs = abs(reference - avg(partition.ball))
    bound = max(gaps) + remainder
    return {"lhs": lhs, "max_gap": max(gaps), "remainder": remainder, "bound": bound, "holds": lhs <= bound + 1e-12}
