import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.common.errors import BallTooSmall, InputError, KOutOfRange, NotAPartition, UnequalSizes
from src.common.seeding import stream
from src.ergodicity_harness.averaging import averaging_decomposition, partition_average_bound
from src.ergodicity_harness.boundary_lemmas import verify_boundary_lemmas
from src.ergodicity_harness.bundles import BUNDLES, get_bundle, global_average, global_average_function
from src.ergodicity_harness.ensembles import (
    canonical_expectation,
    equivalence_gap_closed_form,
    two_block_bound,
    verify_equivalence_of_ensembles,
    verify_two_block_bound,
)
from src.ergodicity_harness.mpl import mpl_graph_table, mpl_psd_check, mpl_sweep, two_block_comparison
from src.ergodicity_harness.partition import build_partition, reference_block
from src.ergodicity_harness.spectral import spectral_estimate, spectral_table
from src.ergodicity_harness.ufields import field_function, partition_context, u_fields
from src.exclusion_sim.boundary import make_boundary_spec
from src.graph_core.families import family_exhaustion, path_graph, sierpinski_gasket
from src.graph_core.metric import default_origin
from src.potential_theory.scaling import scaled_exhaustion


@pytest.fixture
def path9():
    return path_graph(9)


@pytest.fixture
def path_partition(path9):
    return build_partition(path9, 0, 3, 10)


# --- bundles ---

@pytest.mark.parametrize("alpha", [0.0, 0.3, 1.0])
def test_occupation_average_is_the_density(path4, alpha):
    assert global_average(BUNDLES["occupation"], path4, 1, alpha) == pytest.approx(alpha)


def test_edge_pair_average(path4):
    phi = global_average_function(BUNDLES["edge_pairs"], path4, (0, 1))
    assert phi.support == (0, 1)
    assert phi(0.4) == pytest.approx(0.16)
    assert phi.lipschitz() == pytest.approx(2.0, rel=1e-3)


def test_unknown_bundle():
    with pytest.raises(InputError):
        get_bundle("triples")


@settings(max_examples=50, deadline=None)
@given(
    name=st.sampled_from(sorted(BUNDLES)),
    occ=st.lists(st.integers(0, 1), min_size=15, max_size=15),
    outside=st.lists(st.integers(0, 1), min_size=15, max_size=15),
)
def test_bundles_only_read_their_ball(name, occ, outside):
    g = sierpinski_gasket(2)
    bundle = BUNDLES[name]
    anchors = [(u, v) for u, v, _ in g.edges] if bundle.kind == "edge" else list(g.vertices)
    for p in anchors:
        inside = set(g.positions(bundle.support(g, p)).tolist())
        mutated = [occ[i] if i in inside else outside[i] for i in range(g.n)]
        assert bundle(g, p, mutated) == bundle(g, p, occ)


# --- partition ---

def test_path_partition_blocks_and_tail(path_partition):
    assert path_partition.reference == (0, 1, 2)
    assert path_partition.blocks == ((3, 4, 5), (6, 7, 8))
    assert path_partition.tail == (9,)
    assert path_partition.count == 3
    assert path_partition.bridges[0] == (0, 3)


def test_partition_needs_a_larger_ball(path9):
    with pytest.raises(BallTooSmall):
        build_partition(path9, 0, 3, 3)
    with pytest.raises(BallTooSmall):
        build_partition(path9, 0, 3, 5)


def test_gasket_partition_covers_the_ball():
    g = sierpinski_gasket(4)
    partition = build_partition(g, default_origin(g), 2, 8)
    pieces = [v for piece in partition.pieces for v in piece]
    assert sorted(pieces) == list(partition.ball)
    assert partition.count == len(partition.ball) // partition.block_size
    assert all(len(block) == partition.block_size for block in partition.blocks)


def test_reference_block_size_option(path9):
    assert reference_block(path9, 4, 3, size=3) == (3, 4, 5)
    with pytest.raises(InputError):
        reference_block(path9, 4, 3, size=9)


# --- averaging ---

@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.integers(1, 5), min_size=1, max_size=4),
    st.lists(st.integers(1, 3), max_size=2),
    st.integers(0, 2**32 - 1),
)
def test_averaging_decomposition_is_an_identity(block_sizes, tail_sizes, seed):
    rng = np.random.default_rng(seed)
    cursor, blocks, tails = 0, [], []
    for size in block_sizes:
        blocks.append(list(range(cursor, cursor + size)))
        cursor += size
    for size in tail_sizes:
        tails.append(list(range(cursor, cursor + size)))
        cursor += size
    values = dict(enumerate(rng.random(cursor)))
    assert averaging_decomposition(blocks, tails, values, universe=range(cursor)) <= 1e-12


def test_averaging_rejects_overlap():
    with pytest.raises(NotAPartition):
        averaging_decomposition([[0, 1], [1, 2]], [], {0: 0.0, 1: 1.0, 2: 0.5})


def test_partition_average_bound_holds(path9, path_partition):
    rng = stream(3, "partition-bound")
    for _ in range(50):
        occ = rng.integers(0, 2, path9.n).tolist()
        result = partition_average_bound(path_partition, occ, path9.index)
        assert result["holds"]
        assert result["remainder"] == pytest.approx(2.0 / 10.0)


def test_u_field_split_is_exact(path9, path_partition):
    ctx = partition_context(path9, BUNDLES["occupation"], path_partition, second=0)
    rng = stream(5, "u-fields")
    for _ in range(50):
        occ = rng.integers(0, 2, path9.n).tolist()
        fields = u_fields(ctx, occ)
        assert fields.residual <= 1e-12
        assert not math.isnan(fields.block_gap)
    empty = u_fields(ctx, [0] * path9.n)
    assert empty.full == 0.0 and empty.one_block == 0.0
    assert field_function(ctx, "one_block")([1] + [0] * 9) == pytest.approx(1.0 - 1.0 / 3.0)


# --- ensembles ---

def test_two_block_bound_for_small_blocks():
    table = verify_two_block_bound(range(1, 15))
    assert table["passed"].all()
    assert (table["value"] - table["enumerated"]).abs().max() <= 1e-12
    worst = table.groupby("m")["value"].max()
    assert (worst <= [two_block_bound(m) for m in worst.index]).all()


def test_two_block_sizes_must_match():
    with pytest.raises(UnequalSizes):
        verify_two_block_bound([(3, 4)])


def test_canonical_expectation():
    assert canonical_expectation(range(4), 2, lambda eta: eta[0]) == pytest.approx(0.5)
    assert canonical_expectation(range(4), 2, lambda eta: eta[0] * eta[1]) == pytest.approx(1.0 / 6.0)
    with pytest.raises(KOutOfRange):
        canonical_expectation(range(3), 4, sum)


def test_edge_pair_ensemble_gap_decays():
    g = path_graph(20)
    sizes = (2, 4, 8, 12, 16)
    decay = verify_equivalence_of_ensembles(g, [range(n) for n in sizes], BUNDLES["edge_pairs"], (0, 1))
    gaps = dict(zip(decay.table["size"], decay.table["sup_gap"]))
    assert decay.monotone
    assert gaps[12] < gaps[4]
    for n in sizes:
        assert gaps[n] == pytest.approx(equivalence_gap_closed_form(n), abs=1e-12)


# --- moving particle ---

def test_moving_particle_on_small_graphs(path4, triangle):
    assert mpl_psd_check(path4, 0, 3, 0.5) >= -1e-10
    assert mpl_psd_check(triangle, 0, 2, 0.3) >= -1e-10
    table = mpl_graph_table(triangle)
    assert len(table) == 6
    assert table["passed"].all()


def test_moving_particle_sweep_on_four_vertices():
    table = mpl_sweep(max_vertices=4, random_instances=5, seed=1)
    assert set(table["conductances"]) == {"unit", "random"}
    assert table["passed"].all()


@pytest.mark.slow
def test_moving_particle_sweep_on_five_vertices():
    table = mpl_sweep(max_vertices=5, alphas=(0.3, 0.5), random_instances=100)
    assert table["passed"].all()


def test_two_block_comparison_on_a_path(path9, path_partition):
    result = two_block_comparison(path9, path_partition, 0, 0.5)
    assert result["factor"] == pytest.approx(4.0)
    assert result["passed"]


# --- spectral ---

def test_spectral_estimate_vanishes_without_perturbation(path4):
    assert spectral_estimate(path4, lambda occ: occ[0] - 0.5, 0.0, 7.0, 16.0) == 0.0


def test_spectral_eigenvalue_grows_with_kappa(path4):
    def field(occ):
        return occ[0] - 0.5 * (occ[0] + occ[1])

    eigenvalues = [kappa * 7.0 * spectral_estimate(path4, field, kappa, 7.0, 16.0) for kappa in (0.5, 1.0, 2.0, 4.0)]
    assert np.all(np.diff(eigenvalues) >= -1e-12)


def test_one_block_spectral_trend_on_the_path():
    ex = scaled_exhaustion(family_exhaustion("path", 4))
    table = spectral_table(ex, [2, 3, 4], BUNDLES["occupation"], block_radius=2)
    assert not table["skipped"].any()
    normalized = table["normalized"].to_numpy()
    assert np.all(normalized >= -1e-12)
    assert np.all(np.diff(normalized) <= 1e-12)


def test_spectral_table_skips_large_levels():
    ex = scaled_exhaustion(family_exhaustion("path", 5))
    table = spectral_table(ex, [5], BUNDLES["occupation"], block_radius=2)
    assert table["skipped"].tolist() == [True]


# --- boundary lemmas ---

def test_boundary_lemmas_on_a_driven_path(path4):
    spec = make_boundary_spec(path4, {0: (3.0, 1.0), 3: (1.0, 3.0)})
    report = verify_boundary_lemmas(path4, spec, samples=32)
    assert report.passed
    assert report.sup_term <= report.flow_energy_bound


def test_boundary_lemmas_without_flow(path4):
    spec = make_boundary_spec(path4, {0: (2.0, 2.0), 3: (1.0, 1.0)})
    report = verify_boundary_lemmas(path4, spec, samples=16)
    assert report.sup_term == pytest.approx(0.0, abs=1e-12)
    assert report.flow_energy_bound == pytest.approx(0.0, abs=1e-12)
