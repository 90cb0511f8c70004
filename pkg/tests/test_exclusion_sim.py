import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.common.errors import BoundaryEdgePresent, NotIrreducible, RateNonpositive
from src.exclusion_sim.boundary import make_boundary_spec
from src.exclusion_sim.configuration import Configuration, Transition
from src.exclusion_sim.generator import (
    detailed_balance_check,
    evolve_marginals,
    generator_matrix,
    hyperplane_generator,
    stationary_distribution,
    stationary_vector,
)
from src.exclusion_sim.measures import MeasureSpec, radon_nikodym_ratio
from src.exclusion_sim.observers import BoundaryIntegral, OccupationIntegral, Snapshots
from src.exclusion_sim.rate_tree import RateTree
from src.exclusion_sim.rates import active_rates, total_rate
from src.exclusion_sim.simulator import configuration_at, run_trajectories, simulate
from src.graph_core.families import path_graph


@pytest.fixture
def driven_leaf(triangle_with_leaf):
    spec = make_boundary_spec(triangle_with_leaf, {0: (1.0, 2.0), 3: (2.5, 0.5)})
    return triangle_with_leaf, spec


def test_generator_rows_sum_to_zero(driven_leaf):
    g, spec = driven_leaf
    for part in ("full", "exclusion", "boundary"):
        matrix = generator_matrix(g, spec, part=part)
        assert matrix.shape == (16, 16)
        np.testing.assert_allclose(matrix.sum(axis=1), 0.0, atol=1e-12)
    sparse = generator_matrix(g, spec, dense_limit=1)
    np.testing.assert_allclose(sparse.toarray(), generator_matrix(g, spec), atol=0)


def test_closed_system_is_not_irreducible(path4):
    with pytest.raises(NotIrreducible):
        stationary_vector(generator_matrix(path4))


def test_hyperplane_restriction_has_uniform_law(triangle_with_leaf):
    matrix = generator_matrix(triangle_with_leaf)
    block, states = hyperplane_generator(matrix, 4, 2)
    assert len(states) == 6
    np.testing.assert_allclose(stationary_vector(block), 1.0 / 6.0, atol=1e-12)


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.8])
def test_bernoulli_measures_satisfy_detailed_balance(triangle_with_leaf, alpha):
    assert detailed_balance_check(triangle_with_leaf, MeasureSpec.bernoulli(alpha)) <= 1e-12


def test_equal_symmetric_reservoirs_leave_half_density_invariant(path4):
    spec = make_boundary_spec(path4, {0: (1.5, 1.5), 3: (1.5, 1.5)})
    pi = stationary_vector(generator_matrix(path4, spec))
    np.testing.assert_allclose(pi, 1.0 / 16.0, atol=1e-12)


def test_dense_and_sparse_stationary_solvers_agree(driven_leaf):
    g, spec = driven_leaf
    matrix = generator_matrix(g, spec)
    np.testing.assert_allclose(stationary_vector(matrix, dense_limit=1), stationary_vector(matrix), atol=1e-9)


def test_stationary_distribution_wraps_the_stationary_vector(driven_leaf):
    g, spec = driven_leaf
    matrix = generator_matrix(g, spec)
    measure = stationary_distribution(matrix)
    assert measure.kind == "explicit"
    np.testing.assert_allclose(measure.state_probabilities(g.n), stationary_vector(matrix), atol=1e-12)
    assert ((measure.marginals(g.n) > 0) & (measure.marginals(g.n) < 1)).all()


def test_active_rates_list_every_enabled_transition(path4):
    spec = make_boundary_spec(path4, {0: (1.0, 2.0), 3: (3.0, 0.5)})
    eta = Configuration.from_occupied(path4, [1])
    rates = dict(active_rates(path4, spec, eta))
    assert rates == {
        Transition.swap(0, 1): 1.0,
        Transition.swap(1, 2): 1.0,
        Transition.flip(0): 1.0,
        Transition.flip(3): 3.0,
    }
    assert total_rate(path4, spec, eta) == pytest.approx(6.0)
    assert total_rate(path4, None, Configuration.full(path4)) == 0.0


def test_boundary_spec_validation(triangle):
    with pytest.raises(BoundaryEdgePresent):
        make_boundary_spec(triangle, {0: (1.0, 1.0), 1: (1.0, 1.0)})
    with pytest.raises(RateNonpositive):
        make_boundary_spec(triangle, {0: (0.0, 1.0)})


def test_boundary_spec_constants(path4):
    spec = make_boundary_spec(path4, {0: (3.0, 1.0), 3: (1.0, 1.0)})
    assert spec.gamma == pytest.approx(3.0)
    assert spec.delta == pytest.approx(0.25)
    assert spec.target_density(0) == pytest.approx(0.75)
    assert not spec.is_symmetric


def test_radon_nikodym_ratios(path4):
    eta = Configuration.from_occupied(path4, {1})
    nu = MeasureSpec.bernoulli(0.25)
    assert radon_nikodym_ratio(nu, eta, Transition.flip(0)) == pytest.approx(1.0 / 3.0)
    assert radon_nikodym_ratio(nu, eta, Transition.flip(1)) == pytest.approx(3.0)
    assert radon_nikodym_ratio(nu, eta, Transition.swap(2, 3)) == 1.0


def test_simulation_conserves_particles_without_reservoirs(triangle_with_leaf):
    eta0 = Configuration.from_occupied(triangle_with_leaf, {0, 3})
    trajectory = simulate(triangle_with_leaf, None, eta0, time_scale=2.0, horizon=5.0, seed=11)
    assert trajectory.event_count > 0
    eta = eta0
    for _, transition in trajectory.events:
        eta = eta.apply(transition)
        assert eta.particles == 2
    assert trajectory.final() == eta
    assert configuration_at(trajectory, 0.0) == eta0


def test_same_seed_replays_the_same_path(driven_leaf):
    g, spec = driven_leaf
    eta0 = Configuration.empty(g)
    first = simulate(g, spec, eta0, 1.0, 3.0, seed=4, index=2)
    second = simulate(g, spec, eta0, 1.0, 3.0, seed=4, index=2)
    assert first.events == second.events


def test_trajectories_do_not_depend_on_thread_count(driven_leaf):
    g, spec = driven_leaf

    def run(threads):
        return run_trajectories(
            g, spec, MeasureSpec.bernoulli(0.5), 1.0, 2.0, count=12, seed=5,
            observer_factory=lambda: (OccupationIntegral(),), threads=threads,
        )

    serial, pooled = run(1), run(4)
    for a, b in zip(serial, pooled):
        assert a.initial == b.initial
        assert a.event_count == b.event_count
        np.testing.assert_array_equal(a.observables["occupation_integral"], b.observables["occupation_integral"])


def test_occupation_integrals_add_up_to_particle_time(triangle_with_leaf):
    eta0 = Configuration.from_occupied(triangle_with_leaf, {1, 2, 3})
    trajectory = simulate(triangle_with_leaf, None, eta0, 1.0, 4.0, observers=(OccupationIntegral(),), seed=2)
    total = trajectory.observables["occupation_integral"].sum()
    assert total == pytest.approx(3 * 4.0, rel=1e-12)


def test_full_configuration_is_absorbing(path4):
    trajectory = simulate(path4, None, Configuration.full(path4), 1.0, 1.0, observers=(Snapshots([0.5]),))
    assert trajectory.absorbed
    assert trajectory.event_count == 0
    np.testing.assert_array_equal(trajectory.observables["snapshots"], [[1, 1, 1, 1]])


def test_simulated_marginals_match_the_exact_law(path4):
    eta0 = Configuration.from_occupied(path4, {0, 1})
    spec = make_boundary_spec(path4, {0: (1.0, 2.0), 3: (2.0, 1.0)})
    exact = evolve_marginals(path4, spec, eta0, 0.5)
    runs = run_trajectories(
        path4, spec, eta0, 1.0, 1.0, count=4000, seed=17,
        observer_factory=lambda: (Snapshots([0.5]),),
    )
    samples = np.array([r.observables["snapshots"][0] for r in runs], dtype=float)
    mean = samples.mean(axis=0)
    se = np.sqrt(np.maximum(exact * (1.0 - exact), 1e-4) / len(runs))
    assert np.all(np.abs(mean - exact) <= 4.0 * se)


@pytest.mark.slow
def test_simulated_marginals_match_the_exact_law_on_eight_sites():
    g = path_graph(7)
    eta0 = Configuration.from_occupied(g, {0, 1, 2})
    spec = make_boundary_spec(g, {0: (1.0, 2.0), 7: (3.0, 1.0)})
    times = [0.5, 2.0]
    runs = run_trajectories(
        g, spec, eta0, 1.0, 2.5, count=10_000, seed=23,
        observer_factory=lambda: (Snapshots(times),),
    )
    snapshots = np.array([r.observables["snapshots"] for r in runs], dtype=float)
    for k, t in enumerate(times):
        exact = evolve_marginals(g, spec, eta0, t)
        mean = snapshots[:, k, :].mean(axis=0)
        se = np.sqrt(np.maximum(exact * (1.0 - exact), 1e-4) / len(runs))
        assert np.all(np.abs(mean - exact) <= 4.0 * se)


def test_boundary_integral_is_centred_at_stationarity(path4):
    spec = make_boundary_spec(path4, {0: (1.0, 1.0), 3: (1.0, 1.0)})
    runs = run_trajectories(
        path4, spec, MeasureSpec.bernoulli(0.5), 1.0, 1.0, count=2000, seed=23,
        observer_factory=lambda: (BoundaryIntegral("site_0", path4.position(0), 0.5),),
    )
    values = np.array([r.observables["site_0"] for r in runs])
    se = values.std(ddof=1) / math.sqrt(len(values))
    assert abs(values.mean()) <= 4.0 * se


@settings(max_examples=50, deadline=None)
@given(st.lists(st.one_of(st.just(0.0), st.floats(0.01, 10.0)), min_size=1, max_size=40))
def test_rate_tree_sampling_brackets(rates):
    tree = RateTree(rates)
    assert tree.total == pytest.approx(math.fsum(rates), rel=1e-12, abs=1e-12)
    prefix = 0.0
    for i, rate in enumerate(rates):
        if rate > 0.0:
            assert tree.find(prefix + 0.5 * rate) == i
        prefix += rate
    tree.update(0, 1.0)
    assert tree.total == pytest.approx(1.0 + math.fsum(rates[1:]), rel=1e-12)
