# /tests/test_cli.py

import json

import click
import pandas as pd
import pytest
from click.testing import CliRunner

from conftest import binary_entropy
from strongconverse.cli import create_cli, parse_cli
from strongconverse.models import RunConfig


@pytest.fixture
def runner():
    return CliRunner()


def _invoke(runner, tmp_path, *args, name="reporte.json"):
    out = tmp_path / name
    result = runner.invoke(create_cli(), [*args, "--out", str(out)], obj={})
    return result, out


def test_parse_exponent_command():
    config = parse_cli(["exponent", "--channel", "depolarizing:0.25", "--rate", "1.5"])
    assert isinstance(config, RunConfig)
    assert config.command == "exponent"
    assert config.rate == 1.5
    assert (config.seed, config.budget, config.format) == (42, 20, "json")


def test_parse_verify_command():
    config = parse_cli(["verify", "--suite", "all", "--seed", "7"])
    assert (config.command, config.suite, config.seed) == ("verify", "all", 7)


def test_parse_grid_and_simulate_options():
    config = parse_cli(["simulate", "--channel", "bsc:0.1", "--rounds", "2", "--messages", "3", "--grid", "1.5,2,4"])
    assert (config.rounds, config.messages, config.grid) == (2, 3, (1.5, 2.0, 4.0))


@pytest.mark.parametrize("args", [
    ["divergence", "--rho", "mixed:2", "--sigma", "mixed:2", "--alpha", "1"],
    ["exponent", "--channel", "bsc:0.1", "--rate", "1", "--unknown"],
    ["exponent", "--channel", "bsc:0.1", "--rate", "1", "--grid", "0.5,2"],
    ["verify", "--suite", "nonexistent"],
    ["capacity", "--channel", "bsc:0.1", "--seed", "-1"],
])
def test_usage_errors(args, runner):
    with pytest.raises(click.UsageError) as excinfo:
        parse_cli(args)
    assert excinfo.value.exit_code == 2
    assert runner.invoke(create_cli(), args, obj={}).exit_code == 2


def test_divergence_report(runner, tmp_path):
    result, out = _invoke(runner, tmp_path, "divergence", "--rho", "ket:0,2", "--sigma", "mixed:2", "--alpha", "2")
    assert result.exit_code == 0
    report = json.loads(out.read_text())
    assert report["passed"] is True
    assert report["command"] == "divergence"
    assert report["result"]["value"] == pytest.approx(1.0)


def test_relative_entropy_without_alpha(runner, tmp_path):
    result, out = _invoke(runner, tmp_path, "divergence", "--rho", "ket:0,2", "--sigma", "mixed:2")
    assert result.exit_code == 0
    report = json.loads(out.read_text())
    assert report["result"]["kind"] == "umegaki"
    assert report["result"]["value"] == pytest.approx(1.0)


def test_eb_check_report(runner, tmp_path):
    result, out = _invoke(runner, tmp_path, "eb-check", "--channel", "depolarizing:0.2")
    assert result.exit_code == 0
    data = json.loads(out.read_text())["result"]
    assert data["verdict"] == "EB"
    assert abs(data["boundary_estimate"] - 1.0 / 3.0) <= 1e-9


def test_eb_check_white_noise_robustness(runner, tmp_path):
    result, out = _invoke(runner, tmp_path, "eb-check", "--channel", "identity")
    assert result.exit_code == 0
    data = json.loads(out.read_text())["result"]
    assert data["verdict"] == "NotEB"
    assert data["boundary_estimate"] is None
    assert data["white_noise_robustness"] == pytest.approx(1.0 / 3.0, abs=1e-9)


def test_capacity_of_binary_symmetric_channel(runner, tmp_path):
    result, out = _invoke(runner, tmp_path, "capacity", "--channel", "bsc:0.1", "--budget", "4")
    assert result.exit_code == 0
    data = json.loads(out.read_text())["result"]
    assert abs(data["value"] - (1 - binary_entropy(0.1))) <= 1e-5


def test_identical_runs_are_byte_identical(runner, tmp_path):
    args = ["eb-check", "--channel", "depolarizing:0.2", "--seed", "3"]
    _, first = _invoke(runner, tmp_path, *args, name="a.json")
    _, second = _invoke(runner, tmp_path, *args, name="b.json")
    assert first.read_bytes() == second.read_bytes()


def test_missing_channel_file_exits_3(runner, tmp_path):
    result, _ = _invoke(runner, tmp_path, "eb-check", "--channel", str(tmp_path / "no_existe.json"))
    assert result.exit_code == 3


def test_malformed_channel_file_exits_4(runner, tmp_path):
    path = tmp_path / "canal.json"
    path.write_text(json.dumps({"kind": "kraus"}))
    result, _ = _invoke(runner, tmp_path, "eb-check", "--channel", str(path))
    assert result.exit_code == 4


def test_non_eb_simulation_fails_with_report(runner, tmp_path):
    result, out = _invoke(runner, tmp_path, "simulate", "--channel", "identity", "--messages", "2")
    assert result.exit_code == 1
    report = json.loads(out.read_text())
    assert report["passed"] is False
    assert report["result"]["error"] == "NotEntanglementBreaking"
    assert report["failures"]


def test_verify_nagaoka_suite(runner, tmp_path):
    result, out = _invoke(runner, tmp_path, "verify", "--suite", "nagaoka", "--cases", "50")
    assert result.exit_code == 0
    report = json.loads(out.read_text())
    suite = report["result"]["suites"][0]
    assert suite["suite"] == "nagaoka"
    assert suite["cases"] == 50
    assert suite["failures"] == []


def test_csv_output(runner, tmp_path):
    result, out = _invoke(
        runner, tmp_path, "divergence", "--rho", "ket:0,2", "--sigma", "mixed:2", "--format", "csv", name="d.csv",
    )
    assert result.exit_code == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["quantity", "value"]
    rows = dict(zip(frame["quantity"], frame["value"]))
    assert float(rows["result.value"]) == pytest.approx(1.0)


def test_stdout_report_when_no_out(runner):
    result = runner.invoke(create_cli(), ["divergence", "--rho", "mixed:2", "--sigma", "mixed:2"], obj={})
    assert result.exit_code == 0
    assert json.loads(result.output)["result"]["value"] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.slow
def test_verify_nagaoka_full_suite(runner, tmp_path):
    result, out = _invoke(runner, tmp_path, "verify", "--suite", "nagaoka")
    assert result.exit_code == 0
    assert json.loads(out.read_text())["result"]["suites"][0]["cases"] == 1000


def test_eb_check_on_named_channel_file(runner, tmp_path):
    path = tmp_path / "depolarizante.json"
    path.write_text(json.dumps({"kind": "named", "name": "depolarizing", "params": {"lambda": 0.25}}))
    result, out = _invoke(runner, tmp_path, "eb-check", "--channel", str(path))
    assert result.exit_code == 0
    assert json.loads(out.read_text())["result"]["verdict"] == "EB"


def test_exponent_csv_has_only_curve_columns(runner, tmp_path):
    result, out = _invoke(
        runner, tmp_path, "exponent", "--channel", "replacement:2", "--rate", "1", "--budget", "2",
        "--format", "csv", name="e.csv",
    )
    assert result.exit_code == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["alpha", "chi_alpha", "term"]
    assert (frame["alpha"] > 1).all()


@pytest.mark.slow
def test_verify_all_is_byte_identical(runner, tmp_path):
    args = ["verify", "--suite", "all", "--seed", "7", "--cases", "1", "--budget", "2"]
    first, a = _invoke(runner, tmp_path, *args, name="a.json")
    second, b = _invoke(runner, tmp_path, *args, name="b.json")
    assert first.exit_code == second.exit_code
    assert a.read_bytes() == b.read_bytes()
