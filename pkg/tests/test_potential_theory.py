import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.common.errors import (
    BoundaryEdgePresent,
    ComplementEmpty,
    EmptySet,
    InputError,
    OverlappingSets,
    SameVertex,
)
from src.exclusion_sim.boundary import make_boundary_spec
from src.exclusion_sim.generator import generator_matrix, stationary_vector
from src.exclusion_sim.configuration import state_bits
from src.graph_core.families import family_exhaustion, path_graph, sierpinski_gasket
from src.graph_core.graph import build_graph
from src.potential_theory.harmonic import (
    dirichlet_energy,
    effective_resistance,
    effective_resistance_between,
    flow,
    resistance_matrix,
    solve_harmonic,
)
from src.potential_theory.marginal import boundary_flow_scaling, stationary_marginal
from src.potential_theory.scaling import boundary_assumption_table, level_scales, scaled_exhaustion, scaling_report
from src.potential_theory.trace import trace_network
from src.potential_theory.walks import (
    commute_time,
    exit_times,
    green_function,
    hitting_time,
    mean_exit_time,
)
from tests.conftest import random_connected_graph


@pytest.mark.parametrize("n", [1, 10, 200])
def test_path_resistance_is_its_length(n):
    assert effective_resistance_between(path_graph(n), 0, n) == pytest.approx(n, rel=1e-10)


def test_triangle_pair_resistance(triangle):
    assert effective_resistance_between(triangle, 0, 1) == pytest.approx(2.0 / 3.0, abs=1e-12)


def test_resistance_errors(triangle):
    with pytest.raises(SameVertex):
        effective_resistance_between(triangle, 1, 1)
    with pytest.raises(EmptySet):
        effective_resistance(triangle, set(), {1})
    with pytest.raises(OverlappingSets):
        effective_resistance(triangle, {0, 1}, {1})


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 12))
def test_resistance_satisfies_the_triangle_inequality(seed, n):
    rng = np.random.default_rng(seed)
    g = random_connected_graph(rng, n)
    x, y, z = (int(v) for v in rng.choice(g.n, size=3, replace=False))
    r_xz = effective_resistance_between(g, x, z)
    assert r_xz <= effective_resistance_between(g, x, y) + effective_resistance_between(g, y, z) + 1e-10


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.1, 10.0), min_size=1, max_size=11))
def test_series_conductances_add_their_resistances(conductances):
    chain = build_graph((i, i + 1, c) for i, c in enumerate(conductances))
    expected = math.fsum(1.0 / c for c in conductances)
    assert effective_resistance_between(chain, 0, len(conductances)) == pytest.approx(expected, rel=1e-10)


def test_resistance_matrix_matches_harmonic_solves(triangle_with_leaf):
    matrix = resistance_matrix(triangle_with_leaf)
    for x in range(4):
        for y in range(x + 1, 4):
            assert matrix[x, y] == pytest.approx(effective_resistance_between(triangle_with_leaf, x, y), abs=1e-10)
    # resistance is a metric
    assert matrix[0, 3] <= matrix[0, 2] + matrix[2, 3] + 1e-12


def test_harmonic_field_on_a_path_is_linear():
    field = solve_harmonic(path_graph(4), [0, 4], {0: 0.0, 4: 1.0})
    np.testing.assert_allclose(field.values, np.linspace(0.0, 1.0, 5), atol=1e-12)
    assert field.residual <= 1e-12
    assert flow(path_graph(4), field.values, 0) == pytest.approx(0.25)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-5.0, 5.0, allow_nan=False), min_size=3, max_size=3))
def test_harmonic_extension_minimizes_energy(interior):
    g = path_graph(4)
    field = solve_harmonic(g, [0, 4], {0: 0.0, 4: 1.0})
    competitor = np.array([0.0, *interior, 1.0])
    assert dirichlet_energy(g, competitor) >= field.energy - 1e-12


def test_commute_time_identity_on_random_graphs():
    rng = np.random.default_rng(7)
    for _ in range(200):
        g = random_connected_graph(rng, int(rng.integers(2, 13)))
        y, z = (int(v) for v in rng.choice(g.n, size=2, replace=False))
        assert commute_time(g, y, z).residual <= 1e-8


def test_exit_time_on_a_reflecting_path():
    times = exit_times(path_graph(10), range(5))
    assert times[0] == pytest.approx(25.0, rel=1e-10)
    assert hitting_time(path_graph(10), 0, {5}) == pytest.approx(25.0, rel=1e-10)
    assert mean_exit_time(path_graph(10), 2, range(5)) == pytest.approx(21.0, rel=1e-10)
    assert mean_exit_time(path_graph(10), 7, range(5)) == 0.0
    with pytest.raises(ComplementEmpty):
        exit_times(path_graph(3), range(4))


def test_green_function_is_reversible(triangle_with_leaf):
    green = green_function(triangle_with_leaf, [0, 1, 2])
    assert green.reversibility_residual() <= 1e-10


def test_gasket_corner_resistance_scales_by_five_thirds():
    resistances = []
    for level in range(1, 6):
        g = sierpinski_gasket(level)
        resistances.append(effective_resistance_between(g, g.corners[0], g.corners[1]))
    ratios = np.array(resistances[1:]) / np.array(resistances[:-1])
    np.testing.assert_allclose(ratios, 5.0 / 3.0, rtol=0.02)


def test_gasket_volume_and_exit_time_ratios():
    ex = scaled_exhaustion(family_exhaustion("sg", 5), volume_mode="closed")
    volumes = np.array(ex.volumes)
    times = np.array(ex.time_scales)
    # corner cell of level N: 2 * 3^(N+1) edge ends plus four outward edges
    assert volumes[-1] == pytest.approx(2 * 3**5 + 4)
    assert volumes[-1] / volumes[-2] == pytest.approx(3.0, rel=0.05)
    assert times[-1] / times[-2] == pytest.approx(5.0, rel=0.05)


def test_open_ball_volume_is_below_the_closed_cell():
    ex = family_exhaustion("sg", 4)
    open_volume, _, _ = level_scales(ex, 4)
    closed_volume, _, _ = level_scales(ex, 4, volume_mode="closed")
    assert open_volume < closed_volume
    with pytest.raises(InputError):
        level_scales(ex, 4, volume_mode="hull")


def test_path_scaling_exponents():
    report = scaling_report(family_exhaustion("path", 7), eps_values=(0.5,), probe_pairs=2, fit_window=3)
    assert report.beta_hat == pytest.approx(2.0, abs=1e-6)
    assert report.alpha_hat == pytest.approx(1.0, abs=0.05)
    assert {"local_alpha", "local_beta", "einstein", "sr_ratio"} <= set(report.levels.columns)
    assert (report.probes["statistic"] > 0).all()


def test_boundary_assumption_table_on_a_driven_path():
    def reservoirs(level, sub):
        if len(sub) < 3:
            return {sub.vertices[0]: (1.0, 1.0)}
        return {sub.vertices[0]: (1.0, 1.0), sub.vertices[-1]: (1.0, 3.0)}

    table = boundary_assumption_table(family_exhaustion("path", 4), reservoirs)
    assert list(table["level"]) == [1, 2, 3, 4]
    # B(o, 1) = {o} has no edge to drive
    assert table.iloc[0][["scaled_flow", "scaled_energy", "rate_gap"]].isna().all()
    second = table.iloc[1]
    assert second["scaled_flow"] == pytest.approx(0.0, abs=1e-12)
    assert second["rate_gap"] == pytest.approx(0.0, abs=1e-12)
    assert (table["scaled_energy"].dropna() >= 0).all()
    assert (table.loc[table["level"] >= 3, "scaled_flow"] > 0).all()


def test_reservoir_on_an_isolated_vertex_is_rejected():
    with pytest.raises(InputError):
        make_boundary_spec(build_graph([], vertices=[0]), {0: (1.0, 1.0)})


def test_trace_network_rows_sum_to_vertex_weights(triangle_with_leaf):
    for g, boundary in [
        (path_graph(2), [0, 2]),
        (triangle_with_leaf, [0, 3]),
        (sierpinski_gasket(2), sierpinski_gasket(2).corners),
    ]:
        trace = trace_network(g, boundary)
        assert trace.row_sum_residual() <= 1e-12
        np.testing.assert_allclose(trace.kernel.sum(axis=1), 1.0, atol=1e-12)
        assert trace.energy_residual(np.arange(len(trace.boundary), dtype=float)) <= 1e-8


def test_trace_of_a_path_is_the_series_conductance():
    trace = trace_network(path_graph(2), [0, 2])
    assert trace.c_hat(0, 2) == pytest.approx(0.5)


def test_trace_rejects_adjacent_boundary(triangle):
    with pytest.raises(BoundaryEdgePresent):
        trace_network(triangle, [0, 1])


def _chain_marginals(g, spec):
    pi = stationary_vector(generator_matrix(g, spec))
    return state_bits(g.n).T.astype(float) @ pi


def test_stationary_marginal_agrees_with_the_full_chain():
    rng = np.random.default_rng(3)
    instances = 0
    while instances < 10:
        g = random_connected_graph(rng, int(rng.integers(3, 9)))
        a, b = (int(v) for v in rng.choice(g.n, size=2, replace=False))
        if g.conductance(a, b) > 0:
            continue
        reservoirs = {a: tuple(rng.uniform(0.5, 3.0, 2)), b: tuple(rng.uniform(0.5, 3.0, 2))}
        spec = make_boundary_spec(g, reservoirs)
        profile = stationary_marginal(g, spec)
        np.testing.assert_allclose(profile.rho, _chain_marginals(g, spec), atol=1e-8)
        low, high = profile.bounds
        assert low <= profile.rho.min() and profile.rho.max() <= high
        instances += 1


def test_equal_reservoirs_give_a_flat_profile(path4):
    spec = make_boundary_spec(path4, {0: (2.0, 2.0), 3: (2.0, 2.0)})
    profile = stationary_marginal(path4, spec)
    np.testing.assert_allclose(profile.rho, 0.5, atol=1e-12)
    assert profile.total_flow == pytest.approx(0.0, abs=1e-12)
    assert profile.energy == pytest.approx(0.0, abs=1e-12)


def test_boundary_flows_balance(path4):
    spec = make_boundary_spec(path4, {0: (3.0, 1.0), 3: (1.0, 3.0)})
    profile = stationary_marginal(path4, spec)
    assert math.fsum(profile.flows.values()) == pytest.approx(0.0, abs=1e-12)
    assert profile[0] > profile[3]


def test_gasket_boundary_flow_converges():
    table = boundary_flow_scaling(range(1, 6), [(1.0, 1.0), (2.0, 1.0), (1.0, 2.0)])
    gaps = (table["ratio"].iloc[1:] - 1.0).abs()
    assert gaps.iloc[-1] < gaps.iloc[0]
    assert gaps.iloc[-1] < 0.1
