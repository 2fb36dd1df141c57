import importlib
import io
import json
import logging
import sys
import threading

import pandas as pd
import pytest

from superloc import app, cli
from superloc.exact import parse_complex
from superloc.homspace import Isotropic, Periplectic, gl_root_data


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in ("SUPERLOC_MAX_ENUM", "SUPERLOC_MAX_GROUP", "SUPERLOC_LOG"):
        monkeypatch.delenv(name, raising=False)


def test_parse_volume():
    cmd = cli.parse(["volume", "periplectic", "--r", "2", "--s", "2", "--json"])
    assert isinstance(cmd, cli.Volume)
    assert cmd.spec == Periplectic(2, 2)
    assert cmd.json


def test_parse_verify_linear():
    cmd = cli.parse(["verify-linear", "--lambdas", "3i,1+2i", "--profiles", "2", "--count", "7"])
    assert isinstance(cmd, cli.VerifyLinear)
    assert cmd.rep.lambdas == (parse_complex("3i"), parse_complex("1+2i"))
    assert (cmd.count, cmd.max_degree, cmd.seed) == (7, 2, 0)


def test_parse_flag_from_gl():
    cmd = cli.parse(["fixed-points", "flag", "--gl", "3", "2", "--d", "2"])
    assert cmd.spec.root_data == gl_root_data(3, 2, 2)


def test_parse_workers_override_config():
    cmd = cli.parse(["fixed-points", "periplectic", "--r", "2", "--s", "2", "--workers", "3"])
    assert cmd.config.workers == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["volume", "isotropic"],
        ["volume", "periplectic", "--r", "2"],
        ["volume", "flag"],
        ["volume", "flag", "--gl", "2", "2", "--osp", "1", "1"],
        ["chain", "periplectic"],
        ["fixed-points", "flag", "--gl", "2", "1", "--oracle"],
        ["volume", "isotropic", "--n", "0"],
        ["volume", "isotropic", "--n", "2", "--export", "out.txt"],
        ["dist-check", "polediff", "--eps", "0.1,x"],
        ["verify-linear", "--lambdas", "3i", "--rep-file", "rep.json"],
        ["unknown"],
    ],
)
def test_usage_errors(argv, capsys):
    code, out, _ = run(argv, capsys)
    assert code == cli.EXIT_USAGE
    assert out == ""


def test_help_exits_cleanly(capsys):
    code, out, _ = run(["--help"], capsys)
    assert code == cli.EXIT_OK
    assert "superloc" in out


def test_volume_json(capsys):
    code, out, _ = run(["volume", "periplectic", "--r", "2", "--s", "2", "--json"], capsys)
    assert code == cli.EXIT_OK
    payload = json.loads(out)
    assert payload["command"] == "volume"
    assert payload["seed"] is None
    assert payload["convention"]
    result = payload["result"]
    assert result["count"] == 2
    assert result["exponent_m"] == 4
    assert result["value"] == "2*(2*pi/i)^4"
    assert result["verdict"] == "Splitting"


def test_volume_zero_is_still_success(capsys):
    code, out, _ = run(["volume", "periplectic", "--r", "1", "--s", "1", "--json"], capsys)
    assert code == cli.EXIT_OK
    result = json.loads(out)["result"]
    assert result["count"] == 0
    assert result["nonzero"] is False
    assert result["verdict"] == "Inconclusive"


def test_volume_text_output(capsys):
    code, out, _ = run(["volume", "isotropic", "--n", "3"], capsys)
    assert code == cli.EXIT_OK
    assert "Isotropic(3)" in out
    assert "4*(2*pi/i)^9" in out


def test_fixed_points_with_oracle(capsys):
    code, out, _ = run(["fixed-points", "isotropic", "--n", "5", "--oracle", "--json"], capsys)
    assert code == cli.EXIT_OK
    result = json.loads(out)["result"]
    assert result["count"] == 16
    assert result["oracle_agrees"] is True


def test_fixed_points_flag(capsys):
    code, out, _ = run(["fixed-points", "flag", "--osp", "2", "1", "--d", "1", "--json"], capsys)
    assert code == cli.EXIT_OK
    assert json.loads(out)["result"]["count"] == 2


def test_root_file(tmp_path, capsys):
    path = tmp_path / "roots.json"
    path.write_text(json.dumps(gl_root_data(3, 2, 2).to_dict()), encoding="utf-8")
    code, out, _ = run(["volume", "flag", "--root-file", str(path), "--json"], capsys)
    assert code == cli.EXIT_OK
    assert json.loads(out)["result"]["count"] == 2


def test_missing_root_file(tmp_path, capsys):
    code, _, err = run(["volume", "flag", "--root-file", str(tmp_path / "absent.json")], capsys)
    assert code == cli.EXIT_ERROR
    assert json.loads(err)["error"] == "ReportFileError"


@pytest.mark.parametrize(
    "patch",
    [
        {"weights_basis_rank": "x"},
        {"weyl_generators": [{"reflection": ["a", 0, 0, 0, 0]}]},
        {"weyl_generators": [{"perm": ["a", "b"]}]},
        {"weyl_generators": [7]},
    ],
)
def test_malformed_root_file(tmp_path, capsys, patch):
    path = tmp_path / "roots.json"
    path.write_text(json.dumps({**gl_root_data(3, 2, 2).to_dict(), **patch}), encoding="utf-8")
    code, out, err = run(["volume", "flag", "--root-file", str(path)], capsys)
    assert code == cli.EXIT_ERROR
    assert out == ""
    assert json.loads(err)["error"] == "ConfigError"


@pytest.mark.parametrize(
    "rep",
    [
        {"torus_rank": 1, "q_square": ["3"], "summands": [{"chi": ["a"]}]},
        {"torus_rank": "un", "q_square": ["3"], "summands": [{"chi": [1]}]},
        {"torus_rank": 1, "q_square": ["3"], "summands": [5]},
    ],
)
def test_malformed_rep_file(tmp_path, capsys, rep):
    path = tmp_path / "rep.json"
    path.write_text(json.dumps(rep), encoding="utf-8")
    code, out, err = run(["verify-linear", "--rep-file", str(path)], capsys)
    assert code == cli.EXIT_ERROR
    assert out == ""
    assert json.loads(err)["error"] == "ConfigError"


def test_verify_linear_passes(capsys):
    code, out, _ = run(["verify-linear", "--lambdas", "3i", "--count", "20", "--json"], capsys)
    assert code == cli.EXIT_OK
    result = json.loads(out)["result"]
    assert result["failures"] == 0
    assert len(result["forms"]) == 20


def test_verify_linear_rep_file(tmp_path, capsys):
    path = tmp_path / "rep.json"
    rep = {"torus_rank": 2, "q_square": [["0", "3"], ["1", "2"]],
           "summands": [{"chi": [1, 0], "flipped": False}, {"chi": [0, 1], "flipped": True}]}
    path.write_text(json.dumps(rep), encoding="utf-8")
    code, out, _ = run(["verify-linear", "--rep-file", str(path), "--count", "5", "--json"], capsys)
    assert code == cli.EXIT_OK
    assert json.loads(out)["result"]["failures"] == 0


def test_verify_linear_same_seed_same_bytes(capsys):
    argv = ["verify-linear", "--count", "6", "--seed", "11", "--json"]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert first == second
    assert json.loads(first)["seed"] == 11


def test_degenerate_lambda_is_a_domain_error(capsys):
    code, out, err = run(["verify-linear", "--lambdas", "0"], capsys)
    assert code == cli.EXIT_ERROR
    assert out == ""
    diagnostic = json.loads(err)
    assert diagnostic["error"] == "NondegeneracyError"
    assert diagnostic["message"]


def test_enumeration_limit_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("SUPERLOC_MAX_ENUM", "3")
    code, _, err = run(["fixed-points", "periplectic", "--r", "2", "--s", "2"], capsys)
    assert code == cli.EXIT_ERROR
    assert json.loads(err)["error"] == "EnumerationLimitError"


def test_invalid_environment(monkeypatch, capsys):
    monkeypatch.setenv("SUPERLOC_MAX_ENUM", "beaucoup")
    code, _, err = run(["volume", "isotropic", "--n", "2"], capsys)
    assert code == cli.EXIT_ERROR
    assert json.loads(err)["error"] == "ConfigError"


def test_dist_check_polediff(capsys):
    code, out, _ = run(["dist-check", "polediff", "--json"], capsys)
    assert code == cli.EXIT_OK
    result = json.loads(out)["result"]
    assert result["ok"] is True
    assert len(result["eps_trace"]) == 4


def test_dist_check_sigma(capsys):
    code, out, _ = run(["dist-check", "sigma", "--lambda", "1+2i", "--profile", "0,1", "--json"], capsys)
    assert code == cli.EXIT_OK
    result = json.loads(out)["result"]
    assert result["identity"] == "sigma"
    assert result["smooth"]["ok"] is True
    assert result["delta"]["ok"] is True


def test_dist_check_sigma_export_lists_both_parts(tmp_path, capsys):
    target = tmp_path / "sigma.csv"
    code, _, _ = run(["dist-check", "sigma", "--export", str(target)], capsys)
    assert code == cli.EXIT_OK
    df = pd.read_csv(target, sep=";")
    assert sorted(set(df["part"])) == ["delta", "smooth"]
    assert len(df) == 8


def test_dist_check_too_few_eps(capsys):
    code, _, err = run(["dist-check", "polediff", "--eps", "0.2,0.1"], capsys)
    assert code == cli.EXIT_ERROR
    assert json.loads(err)["error"] == "ConfigError"


def test_calibrate(capsys):
    code, out, _ = run(["calibrate", "--lambda", "3i", "--json"], capsys)
    assert code == cli.EXIT_OK
    result = json.loads(out)["result"]
    assert result["matches"] is True
    assert result["kappa"]["im"] == "2"


def test_chain_periplectic(capsys):
    code, out, _ = run(["chain", "periplectic", "--n", "4", "--json"], capsys)
    assert code == cli.EXIT_OK
    assert json.loads(out)["result"]["conclusion"] == "P(2)×P(2) is splitting in P(4)"


def test_chain_broken(capsys):
    code, out, _ = run(["chain", "periplectic", "--n", "2", "--parts", "1,1", "--json"], capsys)
    assert code == cli.EXIT_FAILED
    assert json.loads(out)["result"]["conclusion"] == "ChainBroken"


def test_chain_flag(capsys):
    code, _, _ = run(["chain", "flag", "--gl", "3", "2", "--d", "2"], capsys)
    assert code == cli.EXIT_OK


@pytest.mark.parametrize("suffix", [".csv", ".xlsx", ".ods"])
def test_export(tmp_path, suffix, capsys):
    target = tmp_path / f"volume{suffix}"
    code, _, _ = run(["volume", "periplectic", "--r", "2", "--s", "2", "--export", str(target)], capsys)
    assert code == cli.EXIT_OK
    assert target.exists()
    if suffix == ".csv":
        df = pd.read_csv(target, sep=";")
        assert int(df.loc[0, "count"]) == 2


def test_execute_with_streams():
    out, err = io.StringIO(), io.StringIO()
    code = cli.execute(cli.Volume(spec=Isotropic(2), json=True), out, err)
    assert code == cli.EXIT_OK
    assert json.loads(out.getvalue())["result"]["count"] == 2
    assert err.getvalue() == ""


def test_app_main_logs_to_configured_file(tmp_path, monkeypatch, capsys):
    log_file = tmp_path / "superloc.log"
    monkeypatch.setenv("SUPERLOC_LOG", str(log_file))
    logger = logging.getLogger("superloc")
    monkeypatch.setattr(logger, "handlers", [])
    monkeypatch.setattr(sys, "excepthook", sys.excepthook)
    monkeypatch.setattr(threading, "excepthook", threading.excepthook)
    code = app.main(["volume", "periplectic", "--r", "2", "--s", "2"])
    capsys.readouterr()
    for handler in logger.handlers:
        handler.flush()
    assert code == cli.EXIT_OK
    text = log_file.read_text(encoding="utf-8")
    assert "superloc started" in text
    assert "volume Periplectic(2,2)" in text
    for handler in logger.handlers:
        handler.close()


def test_main_module_import_does_not_run():
    module = importlib.import_module("superloc.__main__")
    assert module.main is app.main
