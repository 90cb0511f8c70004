"""Generators for the example graph families (all conductances 1)."""
import itertools
import logging
from fractions import Fraction

from src.common.errors import BudgetExceeded, InputError
from src.graph_core.graph import WeightedGraph, build_graph
from src.graph_core.metric import GraphExhaustion, default_origin, eccentricity, exhaust

logger = logging.getLogger(__name__)

DEFAULT_MAX_VERTICES = 2_000_000

FAMILIES = ("path", "lattice_box", "sg", "vicsek", "carpet")


def _check_budget(family: str, predicted: int, max_vertices: int) -> None:
    if predicted > max_vertices:
        raise BudgetExceeded(
            f"{family} would have {predicted} vertices; budget is {max_vertices}."
        )


def _relabel(points, edge_pairs, corner_points=()) -> WeightedGraph:
    """Sort coordinate points, give them ids 0..n-1 and build the graph."""
    ordered = sorted(points, key=lambda p: tuple(reversed(p)))
    ids = {p: i for i, p in enumerate(ordered)}
    edges = [(ids[a], ids[b], 1.0) for a, b in edge_pairs]
    return build_graph(edges, vertices=ids.values(), corners=[ids[p] for p in corner_points])


def path_graph(n: int) -> WeightedGraph:
    if n < 1:
        raise InputError("path(n) needs n >= 1.")
    return build_graph([(i, i + 1, 1.0) for i in range(n)])


def lattice_box(d: int, side: int) -> WeightedGraph:
    """Box {0, ..., side-1}^d of Z^d with nearest-neighbour edges."""
    if d < 1 or side < 2:
        raise InputError("lattice_box needs d >= 1 and side >= 2.")
    points = list(itertools.product(range(side), repeat=d))
    edges = []
    for p in points:
        for axis in range(d):
            if p[axis] + 1 < side:
                q = p[:axis] + (p[axis] + 1,) + p[axis + 1:]
                edges.append((p, q))
    corners = [tuple(0 for _ in range(d)), tuple(side - 1 for _ in range(d))]
    return _relabel(points, edges, corners)


def sierpinski_gasket(level: int) -> WeightedGraph:
    """
    Level-N Sierpinski gasket graph.

    Points carry exact dyadic coordinates in the basis a0 = (0, 0),
    a1 = (1, 0), a2 = (0, 1) so shared cell corners coincide exactly.
    The three level-0 corners are flagged, a0 first (the origin).
    """
    if level < 0:
        raise InputError("sg(level) needs level >= 0.")
    zero, one = Fraction(0), Fraction(1)
    a0, a1, a2 = (zero, zero), (one, zero), (zero, one)
    cells = [(a0, a1, a2)]
    for _ in range(level):
        refined = []
        for p, q, r in cells:
            m_pq = ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
            m_pr = ((p[0] + r[0]) / 2, (p[1] + r[1]) / 2)
            m_qr = ((q[0] + r[0]) / 2, (q[1] + r[1]) / 2)
            refined.extend([(p, m_pq, m_pr), (m_pq, q, m_qr), (m_pr, m_qr, r)])
        cells = refined
    points = {p for cell in cells for p in cell}
    edges = [(p, q) for a, b, c in cells for p, q in ((a, b), (b, c), (a, c))]
    return _relabel(points, edges, (a0, a1, a2))


def vicsek_tree(level: int) -> WeightedGraph:
    """
    Level-N Vicsek tree: a cross at level 0 (centre joined to four corners),
    then five scaled copies glued corner-to-corner around a central copy.
    """
    if level < 0:
        raise InputError("vicsek(level) needs level >= 0.")
    diagonals = [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    edges = {((0, 0), d) for d in diagonals}
    half = 1
    for _ in range(level):
        shifted = set()
        for dx, dy in [(0, 0)] + diagonals:
            ox, oy = 2 * half * dx, 2 * half * dy
            for (p, q) in edges:
                shifted.add(((p[0] + ox, p[1] + oy), (q[0] + ox, q[1] + oy)))
        edges = shifted
        half *= 3
    points = {p for e in edges for p in e}
    corners = [(-half, -half), (half, half), (-half, half), (half, -half)]
    return _relabel(points, edges, corners)


def _carpet_keeps(i: int, j: int, level: int) -> bool:
    for _ in range(level):
        if i % 3 == 1 and j % 3 == 1:
            return False
        i //= 3
        j //= 3
    return True


def sierpinski_carpet(level: int) -> WeightedGraph:
    """
    Level-N pre-carpet cell graph: one vertex per unit cell of the 3^N grid
    that survives the removal of middle ninths at every scale, joined to the
    kept cells it shares a side with. Level 1 is an 8-cycle.
    """
    if level < 0:
        raise InputError("carpet(level) needs level >= 0.")
    side = 3**level
    cells = {(i, j) for i in range(side) for j in range(side) if _carpet_keeps(i, j, level)}
    edges = set()
    for i, j in cells:
        for neighbor in ((i + 1, j), (i, j + 1)):
            if neighbor in cells:
                edges.add(((i, j), neighbor))
    corners = dict.fromkeys([(0, 0), (side - 1, side - 1), (0, side - 1), (side - 1, 0)])
    return _relabel(cells, edges, corners)


def predicted_vertices(family: str, **params) -> int:
    if family == "path":
        return params["n"] + 1
    if family == "lattice_box":
        return params["side"] ** params["d"]
    if family == "sg":
        return 3 * (3 ** params["level"] + 1) // 2
    if family == "vicsek":
        return 4 * 5 ** params["level"] + 1
    if family == "carpet":
        return 8 ** params["level"]
    raise InputError(f"Unknown family {family!r}; choose from {FAMILIES}.")


def generate(family: str, max_vertices: int = DEFAULT_MAX_VERTICES, **params) -> WeightedGraph:
    """
    Build a member of a named family, e.g. generate("sg", level=3) or
    generate("lattice_box", d=2, side=5).
    """
    _check_budget(family, predicted_vertices(family, **params), max_vertices)
    builders = {
        "path": lambda: path_graph(params["n"]),
        "lattice_box": lambda: lattice_box(params["d"], params["side"]),
        "sg": lambda: sierpinski_gasket(params["level"]),
        "vicsek": lambda: vicsek_tree(params["level"]),
        "carpet": lambda: sierpinski_carpet(params["level"]),
    }
    graph = builders[family]()
    logger.info(f"Generated {family} {params}: {graph.n} vertices, {len(graph.edges)} edges.")
    return graph


def canonical_radii(family: str, levels: int) -> list[int]:
    base = 3 if family == "carpet" else 2
    return [base**k for k in range(levels)]


def family_exhaustion(
    family: str,
    levels: int,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    d: int = 2,
) -> GraphExhaustion:
    """
    Exhaustion of the smallest family member whose origin eccentricity
    exceeds the largest radius, so every ball has a nonempty exterior.
    """
    if levels < 1:
        raise InputError("Need at least one level.")
    radii = canonical_radii(family, levels)
    target = radii[-1]
    size = 1
    while True:
        if family == "path":
            params = {"n": target + 1}
        elif family == "lattice_box":
            params = {"d": d, "side": target + 2}
        else:
            params = {"level": size}
        graph = generate(family, max_vertices=max_vertices, **params)
        origin = default_origin(graph)
        if eccentricity(graph, origin) > target:
            return exhaust(graph, origin, radii)
        size += 1
