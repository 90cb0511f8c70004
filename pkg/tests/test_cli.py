import json

import pandas as pd
import pytest

from src.cli.config_loader import load_config
from src.cli.main import EXIT_ERROR, EXIT_OK, dispatch
from src.common.errors import InputError, ParseError, ValidationError
from src.graph_core.families import path_graph
from src.graph_core.graph import build_graph
from src.graph_core.io import read_graph, write_graph


@pytest.fixture
def run_cli(settings_file):
    def run(*argv):
        return dispatch([*argv, "--settings", str(settings_file), "--no-db"])

    return run


@pytest.fixture
def triangle_file(tmp_path):
    return write_graph(build_graph([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]), tmp_path / "triangle.json")


def test_generate_writes_graph_and_manifest(run_cli, tmp_path):
    out = tmp_path / "path.json"
    assert run_cli("generate", "--family", "path", "--n", "5", "--out", str(out)) == EXIT_OK
    g, reservoirs = read_graph(out)
    assert g.n == 6
    assert reservoirs is None
    manifest = json.loads((tmp_path / "path.json.manifest.json").read_text())
    assert manifest["command"] == "generate"
    assert len(manifest["run_id"]) == 64


def test_generate_with_reservoirs(run_cli, tmp_path):
    out = tmp_path / "driven.json"
    code = run_cli(
        "generate", "--family", "path", "--n", "3", "--reservoir", "0", "2", "1",
        "--reservoir", "3", "1", "2", "--out", str(out),
    )
    assert code == EXIT_OK
    _, reservoirs = read_graph(out)
    assert reservoirs == {0: (2.0, 1.0), 3: (1.0, 2.0)}


def test_unknown_subcommand_is_a_usage_error(run_cli):
    assert run_cli("teleport") == EXIT_ERROR


def test_verify_mpl_on_a_triangle(run_cli, triangle_file, tmp_path):
    out = tmp_path / "mpl.json"
    assert run_cli("verify", "--suite", "mpl", "--graph", str(triangle_file), "--out", str(out)) == EXIT_OK
    report = json.loads(out.read_text())
    assert report["schema"] == 1
    assert report["passed"] is True
    assert report["provenance"]["graph_hash"]
    assert len(report["checks"]) == 6


def test_resistance_output_is_reproducible(run_cli, triangle_file, tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for out in (first, second):
        assert run_cli("resistance", "--graph", str(triangle_file), "--seed", "7", "--out", str(out)) == EXIT_OK
    a, b = json.loads(first.read_text()), json.loads(second.read_text())
    assert a["result"] == b["result"]
    assert a["checks"] == b["checks"]
    pairs = pd.DataFrame(a["result"]["pairs"])
    assert pairs["r_eff"].tolist() == pytest.approx([2.0 / 3.0] * 3)


def test_marginal_needs_reservoirs(run_cli, triangle_file):
    assert run_cli("marginal", "--graph", str(triangle_file)) == EXIT_ERROR


def test_marginal_with_reservoirs(run_cli, tmp_path):
    graph = write_graph(path_graph(3), tmp_path / "p.json", {0: (3.0, 1.0), 3: (1.0, 3.0)})
    out = tmp_path / "marginal.json"
    assert run_cli("marginal", "--graph", str(graph), "--out", str(out), "--csv") == EXIT_OK
    report = json.loads(out.read_text())
    assert {c["check"] for c in report["checks"]} == {"duality", "density_bounds", "full_chain"}
    table = pd.read_csv(tmp_path / "marginal.marginal.csv")
    assert table["rho"].iloc[0] > table["rho"].iloc[-1]


def test_simulate_always_writes_observables(run_cli, tmp_path):
    graph = write_graph(path_graph(4), tmp_path / "p.json")
    out = tmp_path / "sim.json"
    code = run_cli(
        "simulate", "--graph", str(graph), "--horizon", "1.0", "--time-scale", "2",
        "--trajectories", "5", "--times", "0.5", "1.0", "--out", str(out),
    )
    assert code == EXIT_OK
    table = pd.read_csv(tmp_path / "sim.observables.csv")
    assert len(table) == 5 * 2
    report = json.loads(out.read_text())
    assert report["checks"][0]["check"] == "particle_conservation"


def test_experiment_command_writes_curves(run_cli, tmp_path):
    config = tmp_path / "exp.cfg"
    config.write_text(
        "graph = path\nhorizon = 0.5\nlevels = 2, 3\nepsilon = 1.0\n"
        "block_radius = 1.0\nfields = full\ntrajectories = 10\n"
    )
    out = tmp_path / "curves.csv"
    assert run_cli("experiment", "--config", str(config), "--out", str(out)) == EXIT_OK
    curves = pd.read_csv(out)
    assert set(curves["level"]) == {2, 3}
    assert (tmp_path / "curves.scales.csv").is_file()


# --- experiment config files ---

def test_config_defaults(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("# gasket run\ngraph = sg\nT = 1.0  # horizon\n")
    config = load_config(path)
    assert config.graph == "sg"
    assert config.horizon == 1.0
    assert config.levels == (2, 3, 4)
    assert config.eps == (0.5,)


def test_config_rejects_eps_outside_unit_interval(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("graph = sg\nhorizon = 1\nepsilon = 1.5\n")
    with pytest.raises(ValidationError) as excinfo:
        load_config(path)
    assert excinfo.value.field == "epsilon"


def test_config_duplicate_key_reports_its_line(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("graph = sg\nhorizon = 1\ngraph = path\n")
    with pytest.raises(ParseError) as excinfo:
        load_config(path)
    assert excinfo.value.line == 3


def test_config_rejects_unknown_keys_and_missing_files(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("graph = sg\nhorizon = 1\ncolour = blue\n")
    with pytest.raises(ValidationError) as excinfo:
        load_config(path)
    assert excinfo.value.field == "colour"
    with pytest.raises(InputError):
        load_config(tmp_path / "missing.cfg")
