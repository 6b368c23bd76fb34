import io
import json
import os
import sys

import pytest

from sdpkit import app
from sdpkit.app import EXIT_FAILURE, EXIT_INVALID, EXIT_SUCCESS, EXIT_UNHANDLED, main, render_text
from sdpkit.schemas import Subcommand

pytestmark = pytest.mark.cli

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
GOLDEN_DIGITS = 9
GOLDEN_ATOL = 1e-3


def data_path(name):
    return os.path.join(DATA_DIR, name)


def load_golden(name):
    with open(data_path(name), mode="r", encoding="utf-8") as golden_file:
        return json.load(golden_file)


def round_golden(value):
    if isinstance(value, dict):
        return {key: round_golden(val) for key, val in value.items()}
    if isinstance(value, list):
        return [round_golden(item) for item in value]
    if isinstance(value, float):
        if abs(value) < 10 ** -GOLDEN_DIGITS:
            return 0.0
        return float(f"{value:.{GOLDEN_DIGITS}g}")
    return value


def assert_golden_subset(actual, expected, where="$"):
    """
    Every field of the golden report must be present and match, floats within the golden tolerance.
    """
    if isinstance(expected, dict):
        assert isinstance(actual, dict), where
        for key, val in expected.items():
            assert key in actual, f"{where}.{key}"
            assert_golden_subset(actual[key], val, f"{where}.{key}")
    elif isinstance(expected, list):
        assert isinstance(actual, list) and len(actual) == len(expected), where
        for index, (act, exp) in enumerate(zip(actual, expected)):
            assert_golden_subset(act, exp, f"{where}[{index}]")
    elif isinstance(expected, float):
        assert actual == pytest.approx(expected, rel=1e-5, abs=GOLDEN_ATOL), where
    else:
        assert actual == expected, where


def run_cli(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.mark.parametrize("args, golden", [
    (["psd", "--input", data_path("a3z2.mat")], "psd.json"),
    (["chol", "--input", data_path("chol.mat")], "chol.json"),
    (["eig", "--input", data_path("diag.mat")], "eig.json"),
])
def test_golden_exact(capsys, args, golden):
    code, out, _ = run_cli(capsys, *args)
    assert code == EXIT_SUCCESS
    assert round_golden(json.loads(out)) == load_golden(golden)


@pytest.mark.functional
@pytest.mark.parametrize("args, golden", [
    (["solve", "--input", data_path("sqrt2.dat-s")], "solve.json"),
    (["theta", "--input", data_path("c5.graph")], "theta.json"),
    (["stable", "--input", data_path("c5.graph")], "stable.json"),
    (["copos", "--input", data_path("horn.mat"), "--r", "0"], "copos.json"),
    (["sos", "--input", data_path("quartic.poly")], "sos.json"),
    (["maxcut", "--input", data_path("c5w.graph"), "--seed", "7", "--trials", "2000"], "maxcut.json"),
    (["qcr", "--input", data_path("two.binqp"), "--scheme", "r2"], "qcr.json"),
])
def test_golden_solver(capsys, args, golden):
    code, out, _ = run_cli(capsys, *args)
    assert code == EXIT_SUCCESS
    assert_golden_subset(json.loads(out), load_golden(golden))


def test_every_subcommand_has_golden():
    goldens = {name[:-len(".json")] for name in os.listdir(DATA_DIR) if name.endswith(".json")}
    assert {str(sub) for sub in Subcommand} <= goldens


def test_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    for sub in Subcommand:
        assert str(sub) in out


def test_missing_subcommand(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == EXIT_INVALID


def test_parse_error_exit(tmp_path, capsys):
    path = tmp_path / "bad.mat"
    path.write_text("2\n1 2\n3 1\n")
    code, out, err = run_cli(capsys, "psd", "--input", str(path))
    assert code == EXIT_INVALID
    assert out == ""
    assert "ParseError" in err
    assert "line [3]" in err


def test_missing_file_exit(tmp_path, capsys):
    code, _, err = run_cli(capsys, "psd", "--input", str(tmp_path / "missing.mat"))
    assert code == EXIT_INVALID
    assert "FileNotFoundError" in err


def test_copos_requires_level(capsys):
    code, _, err = run_cli(capsys, "copos", "--input", data_path("horn.mat"))
    assert code == EXIT_INVALID
    assert "ValidationError" in err


def test_invalid_option_exit(capsys):
    code, _, _ = run_cli(capsys, "maxcut", "--input", data_path("c5w.graph"), "--trials", "0")
    assert code == EXIT_INVALID


@pytest.mark.functional
def test_module_error_exit(capsys):
    code, out, err = run_cli(capsys, "sos", "--input", data_path("negative.poly"))
    assert code == EXIT_FAILURE
    assert out == ""
    assert "Infeasible:" in err


def test_unhandled_error_exit(capsys, monkeypatch):
    def boom(value, cmd):
        raise RuntimeError("boom")

    monkeypatch.setitem(app.RUNNERS, Subcommand.PSD, boom)
    code, out, _ = run_cli(capsys, "psd", "--input", data_path("a3z2.mat"))
    assert code == EXIT_UNHANDLED
    assert out == ""


def test_stdin_input(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("2\n2 0\n0 3\n"))
    code, out, _ = run_cli(capsys, "psd", "--input", "-")
    assert code == EXIT_SUCCESS
    report = json.loads(out)
    assert report["is_pd"] is True
    assert report["min_eigenvalue"] == 2.0


def test_text_format(capsys):
    code, out, _ = run_cli(capsys, "psd", "--input", data_path("a3z2.mat"), "--format", "text")
    assert code == EXIT_SUCCESS
    lines = out.splitlines()
    assert "is_psd: true" in lines
    assert "is_pd: false" in lines
    assert any(line.startswith("witness: [") for line in lines)


def test_render_text_nested():
    lines = render_text({"a": {"b": 1, "c": [[1, 2], [3]]}, "d": None})
    assert lines == ["a.b: 1", "a.c[0]: [1, 2]", "a.c[1]: [3]", "d: null"]


def test_output_file(tmp_path, capsys):
    path = tmp_path / "report.json"
    code, out, _ = run_cli(capsys, "chol", "--input", data_path("chol.mat"), "--output", str(path))
    assert code == EXIT_SUCCESS
    assert out == ""
    assert round_golden(json.loads(path.read_text())) == load_golden("chol.json")


@pytest.mark.functional
def test_config_defaults_and_override(tmp_path, capsys):
    config = tmp_path / "config.yml"
    config.write_text("seed: 3\ntrials: 25\ntol: 1.0e-7\n")
    code, out, _ = run_cli(capsys, "maxcut", "--input", data_path("c5w.graph"), "--config", str(config))
    assert code == EXIT_SUCCESS
    assert json.loads(out)["trials"] == 25
    code, out, _ = run_cli(capsys, "maxcut", "--input", data_path("c5w.graph"), "--config", str(config),
                           "--trials", "40")
    assert code == EXIT_SUCCESS
    assert json.loads(out)["trials"] == 40


def test_config_unknown_key(tmp_path, capsys):
    config = tmp_path / "config.yml"
    config.write_text("colour: blue\n")
    code, _, err = run_cli(capsys, "psd", "--input", data_path("a3z2.mat"), "--config", str(config))
    assert code == EXIT_INVALID
    assert "ValidationError" in err
