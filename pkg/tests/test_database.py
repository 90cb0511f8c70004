from types import SimpleNamespace

import pandas as pd
import pytest

from src.cli.manifest import RunManifest
from src.cli.suites import run_mpl
from src.database.manager import ResultStore


@pytest.fixture
def store(tmp_path):
    store = ResultStore(f"sqlite:///{tmp_path / 'results.db'}")
    store.create_tables()
    return store


@pytest.fixture
def manifest():
    return RunManifest(
        command="verify",
        argv=["verify", "--suite", "mpl"],
        seed=0,
        tolerances={"solve": 1e-10},
        graph_hash="ab" * 32,
        inputs={"suite": "mpl"},
    )


def test_run_id_ignores_timestamp_and_outputs(manifest):
    other = RunManifest(**{**manifest.__dict__, "timestamp": "2000-01-01T00:00:00+00:00", "outputs": ["x.json"]})
    assert other.run_id == manifest.run_id
    assert RunManifest(**{**manifest.__dict__, "seed": 1}).run_id != manifest.run_id


def test_record_run_and_checks(store, manifest):
    checks = pd.DataFrame(
        [
            {"check": "commute_identity", "passed": True, "value": 1e-12, "bound": 1e-8, "residual": 1e-12},
            {"check": "row_sums", "passed": False, "value": 0.5, "bound": 1e-12, "residual": float("nan")},
        ]
    )
    assert store.record_run(manifest.as_dict())
    store.record_checks(manifest.run_id, "mpl", checks)
    run = store.get_run(manifest.run_id)
    assert run.command == "verify"
    assert run.graph_hash == "ab" * 32
    stored = store.checks_frame(manifest.run_id).sort_values("check")
    assert stored["check"].tolist() == ["commute_identity", "row_sums"]
    assert stored["passed"].astype(bool).tolist() == [True, False]
    assert stored["residual"].isna().tolist() == [False, True]


def test_repeated_run_replaces_the_previous_record(store, manifest):
    checks = pd.DataFrame([{"check": "duality", "passed": True, "value": 0.0, "bound": 1e-8, "residual": 0.0}])
    for _ in range(2):
        assert store.record_run(manifest.as_dict())
        store.record_checks(manifest.run_id, "boundary", checks)
    assert len(store.checks_frame(manifest.run_id)) == 1
    assert store.get_run("missing") is None


def test_duplicate_check_names_leave_nothing_behind(store, manifest):
    checks = pd.DataFrame([{"check": "same", "passed": True}, {"check": "same", "passed": False}])
    assert store.record_run(manifest.as_dict())
    assert not store.record_checks(manifest.run_id, "mpl", checks)
    assert store.checks_frame(manifest.run_id).empty
    store.discard_run(manifest.run_id)
    assert store.get_run(manifest.run_id) is None


def test_moving_particle_sweep_checks_are_all_stored(store, manifest):
    options = SimpleNamespace(alphas=(0.3, 0.5), max_vertices=4, random_instances=20, seed=0, state_cap=14)
    _, _, checks = run_mpl(None, options)
    assert checks["check"].is_unique
    assert store.record_run(manifest.as_dict())
    assert store.record_checks(manifest.run_id, "mpl", checks)
    assert len(store.checks_frame(manifest.run_id)) == len(checks)
