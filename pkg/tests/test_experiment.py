import math

import pytest

from src.common.errors import InsufficientTrajectories, ValidationError
from src.ergodicity_harness.experiment import (
    ExperimentConfig,
    clopper_pearson_upper,
    ergodicity_experiment,
    point_estimate,
    wilson_interval,
)


def test_config_rejects_bad_values():
    with pytest.raises(ValidationError) as excinfo:
        ExperimentConfig(graph="sg", horizon=1.0, eps=(1.5,))
    assert excinfo.value.field == "epsilon"
    with pytest.raises(ValidationError):
        ExperimentConfig(graph="sg", horizon=0.0)
    with pytest.raises(ValidationError):
        ExperimentConfig(graph="sg", horizon=1.0, fields=("three_block",))
    with pytest.raises(ValidationError):
        ExperimentConfig(graph="sg", horizon=1.0, reservoirs="everywhere")


def test_config_needs_ball_for_macroscopic_fields():
    assert not ExperimentConfig(graph="sg", horizon=1.0).needs_ball
    assert ExperimentConfig(graph="sg", horizon=1.0, fields=("full",)).needs_ball


def test_clopper_pearson_bound_for_no_exceedances():
    expected = 1.0 - 0.05 ** (1.0 / 2000)
    assert clopper_pearson_upper(0, 2000, 0.95) == pytest.approx(expected, rel=1e-9)
    assert clopper_pearson_upper(0, 2000, 0.95) == pytest.approx(0.0014967, abs=1e-7)
    assert clopper_pearson_upper(5, 5, 0.95) == 1.0


def test_point_estimate_needs_an_exceedance():
    assert point_estimate(3, 10) == pytest.approx(0.3)
    with pytest.raises(InsufficientTrajectories):
        point_estimate(0, 10)


def test_wilson_interval_brackets_the_frequency():
    low, high = wilson_interval(30, 100, 0.95)
    assert low < 0.3 < high
    assert wilson_interval(0, 100, 0.95)[0] <= 1e-12


def test_small_path_experiment_tables():
    config = ExperimentConfig(
        graph="path",
        horizon=0.5,
        levels=(2, 3),
        eps=(1.0,),
        block_radius=1.0,
        fields=("one_block", "full"),
        trajectories=40,
        seed=3,
    )
    report = ergodicity_experiment(config)
    curves = report.curves
    # per level: two fields, each with one probe row plus the sup row
    assert len(curves) == 8
    assert set(curves["probe"]) == {"origin", "sup"}
    assert set(curves["policy"]) == {"product"}
    # a single-site block makes the one-block field vanish identically
    one_block = curves[curves["field"] == "one_block"]
    assert (one_block["exceedances"] == 0).all()
    assert (one_block["estimate_kind"] == "upper_bound").all()
    assert (curves["wilson_low"] <= curves["p_hat"] + 1e-12).all()
    assert (curves["p_hat"] <= curves["wilson_high"]).all()
    assert report.boundary.empty
    assert list(report.scales["level"]) == [1, 2, 3]
    assert list(report.trend("one_block", 1.0).index) == [2, 3]


def test_rim_reservoir_experiment_reports_boundary_statistics():
    config = ExperimentConfig(
        graph="path",
        horizon=0.5,
        levels=(2,),
        block_radius=1.0,
        trajectories=20,
        reservoirs="rim",
        lambda_plus=2.0,
        lambda_minus=1.0,
        boundary_weight="ramp",
    )
    report = ergodicity_experiment(config)
    assert set(report.curves["policy"]) == {"product", "empty"}
    assert len(report.boundary) == 2
    assert set(report.boundary["site"]) == {1}
    assert report.boundary["target"].iloc[0] == pytest.approx(2.0 / 3.0)
    assert report.boundary["standard_error"].map(math.isfinite).all()


def test_block_radius_must_fit_inside_the_eps_ball():
    config = ExperimentConfig(graph="path", horizon=0.5, levels=(2,), fields=("full",), trajectories=5)
    with pytest.raises(ValidationError):
        ergodicity_experiment(config)


@pytest.mark.slow
def test_gasket_one_block_exceedances_decrease_with_level():
    config = ExperimentConfig(
        graph="sg",
        horizon=1.0,
        levels=(2, 3, 4),
        eps=(0.5,),
        block_radius=2.0,
        bundle="occupation",
        fields=("one_block",),
        delta=0.1,
        alpha=0.5,
        trajectories=2000,
        seed=0,
    )
    report = ergodicity_experiment(config)
    assert report.strictly_decreasing("one_block", 0.5)
