import networkx as nx
import pytest

from src.common.errors import (
    BadRadiusSequence,
    BudgetExceeded,
    DisconnectedGraph,
    DuplicateEdge,
    NonpositiveConductance,
    SelfLoop,
    UnknownVertex,
)
from src.graph_core.families import (
    canonical_radii,
    family_exhaustion,
    generate,
    lattice_box,
    path_graph,
    predicted_vertices,
    sierpinski_carpet,
    sierpinski_gasket,
    vicsek_tree,
)
from src.graph_core.graph import build_graph
from src.graph_core.io import graph_hash, read_graph, write_graph
from src.graph_core.metric import ball, default_origin, diameter, exhaust, induced_subgraph, probe_points


def test_build_graph_rejects_bad_edges():
    with pytest.raises(SelfLoop):
        build_graph([(0, 0, 1.0)])
    with pytest.raises(DuplicateEdge):
        build_graph([(0, 1, 1.0), (1, 0, 2.0)])
    with pytest.raises(NonpositiveConductance):
        build_graph([(0, 1, 0.0)])
    with pytest.raises(DisconnectedGraph):
        build_graph([(0, 1, 1.0), (2, 3, 1.0)])


def test_vertex_weights_are_sums_of_conductances(triangle_with_leaf):
    g = triangle_with_leaf
    assert g.weight(2) == 3.0
    assert g.weight(3) == 1.0
    assert g.volume() == 8.0
    assert g.recompute_weights_match()
    with pytest.raises(UnknownVertex):
        g.weight(9)


def test_path_has_n_plus_one_vertices():
    g = path_graph(5)
    assert g.n == 6
    assert len(g.edges) == 5
    assert diameter(g) == 5


def test_balls_are_open(path4):
    assert ball(path4, 0, 0) == ()
    assert ball(path4, 0, 1) == (0,)
    assert ball(path4, 0, 3) == (0, 1, 2)
    assert ball(path4, 1, 2) == (0, 1, 2)


def test_family_vertex_counts():
    assert sierpinski_gasket(2).n == 15
    assert len(sierpinski_gasket(2).edges) == 27
    assert sierpinski_gasket(3).n == predicted_vertices("sg", level=3)
    assert vicsek_tree(1).n == 21
    assert sierpinski_carpet(2).n == predicted_vertices("carpet", level=2) == 64
    assert lattice_box(2, 3).n == 9
    assert len(lattice_box(2, 3).edges) == 12


def test_carpet_cells_keep_their_holes():
    assert nx.is_isomorphic(sierpinski_carpet(1).to_networkx(), nx.cycle_graph(8))
    g = sierpinski_carpet(2)
    # eight 8-cycles, neighbouring blocks joined along three cell pairs
    assert len(g.edges) == 8 * 8 + 8 * 3
    assert sierpinski_carpet(0).n == 1
    assert default_origin(g) == g.corners[0] == 0


def test_vicsek_is_a_tree():
    for level in range(3):
        assert nx.is_tree(vicsek_tree(level).to_networkx())


def test_gasket_corners_are_flagged():
    g = sierpinski_gasket(3)
    assert len(g.corners) == 3
    assert all(g.degree(c) == 2 for c in g.corners)
    assert default_origin(g) == g.corners[0]


def test_generated_graphs_have_consistent_weights():
    for family, params in [("sg", {"level": 3}), ("vicsek", {"level": 2}), ("carpet", {"level": 2})]:
        assert generate(family, **params).recompute_weights_match()


def test_generate_respects_budget():
    with pytest.raises(BudgetExceeded):
        generate("sg", max_vertices=100, level=6)


def test_exhaust_requires_radii_from_one(path4):
    with pytest.raises(BadRadiusSequence):
        exhaust(path4, 0, [2, 4])
    with pytest.raises(BadRadiusSequence):
        exhaust(path4, 0, [1, 1])


def test_path_exhaustion_ball_sizes():
    ex = family_exhaustion("path", 4)
    assert ex.radii == (1, 2, 4, 8)
    assert [ex.subgraph(level).n for level in ex.levels] == [1, 2, 4, 8]
    assert ex.eps_radius(0.5, 4) == 2


def test_canonical_radii_for_carpet_use_powers_of_three():
    assert canonical_radii("carpet", 3) == [1, 3, 9]


def test_gasket_exhaustion_balls_are_connected():
    ex = family_exhaustion("sg", 4)
    for level in ex.levels:
        sub = ex.subgraph(level)
        assert nx.is_connected(sub.to_networkx())
        assert ex.origin in sub


def test_induced_subgraph_must_stay_connected(path4):
    with pytest.raises(DisconnectedGraph):
        induced_subgraph(path4, [0, 2])


def test_probe_points_lie_in_the_ball():
    ex = family_exhaustion("sg", 3)
    points = probe_points(ex, 3)
    assert set(points) == {"origin", "interior", "near_boundary"}
    assert all(v in ex.subgraph(3) for v in points.values())


def test_graph_file_round_trip(tmp_path, triangle_with_leaf):
    reservoirs = {0: (1.0, 2.0), 3: (2.0, 1.0)}
    path = write_graph(triangle_with_leaf, tmp_path / "g.json", reservoirs)
    g, loaded = read_graph(path)
    assert g == triangle_with_leaf
    assert loaded == reservoirs
    assert graph_hash(g, loaded) == graph_hash(triangle_with_leaf, reservoirs)
    assert graph_hash(g) != graph_hash(g, loaded)
