import json
from pathlib import Path

import pandas as pd
import pytest

from superloc.config import ConfigError, QuadratureError, RunConfig, SuperlocError
from superloc.constants import KAPPA, LOC_SIGN, convention
from superloc.exact import cq
from superloc.io_reports import (
    ReportFileError,
    dump_json,
    load_json,
    report_frame,
    save_output,
    save_spreadsheet,
)


def test_run_config_defaults():
    config = RunConfig()
    assert config.max_enum == 9
    assert config.max_group_order == 10**6
    assert config.workers == 1


def test_run_config_from_env():
    config = RunConfig.from_env({"SUPERLOC_MAX_ENUM": "7", "SUPERLOC_MAX_GROUP": "500", "SUPERLOC_LOG": "/tmp/x.log"})
    assert config.max_enum == 7
    assert config.max_group_order == 500
    assert config.log_path == Path("/tmp/x.log")


def test_run_config_overrides():
    config = RunConfig.from_env({"SUPERLOC_MAX_ENUM": "7"}, max_enum=4, workers=None)
    assert config.max_enum == 4
    assert config.workers == 1


@pytest.mark.parametrize("value", ["0", "-2", "abc", "1.5"])
def test_run_config_rejects_bad_values(value):
    with pytest.raises(ConfigError):
        RunConfig.from_env({"SUPERLOC_MAX_ENUM": value})


def test_error_hierarchy():
    assert issubclass(ConfigError, SuperlocError)
    assert issubclass(ReportFileError, SuperlocError)
    err = QuadratureError("non convergée", {"eps": 0.1})
    assert err.diagnostics == {"eps": 0.1}


def test_convention_is_frozen():
    assert KAPPA == cq(0, 2)
    assert LOC_SIGN == 1
    d = convention()
    assert d["sign"] == 1
    assert d["kappa"] == ["0", "2"]
    assert json.dumps(d)


def test_load_json(tmp_path):
    path = tmp_path / "rep.json"
    path.write_text('{"torus_rank": 1}', encoding="utf-8")
    assert load_json(path) == {"torus_rank": 1}


def test_load_json_errors(tmp_path):
    with pytest.raises(ReportFileError):
        load_json(tmp_path / "absent.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(ReportFileError):
        load_json(broken)
    array = tmp_path / "array.json"
    array.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ReportFileError):
        load_json(array)


def test_dump_json_is_sorted():
    text = dump_json({"b": 1, "a": "é"})
    assert text.index('"a"') < text.index('"b"')
    assert "é" in text


def test_save_output_csv(tmp_path):
    target = tmp_path / "rows.csv"
    save_output(target, {"volume": report_frame([{"count": 2, "value": "2*(2*pi/i)^4"}])})
    df = pd.read_csv(target, sep=";")
    assert list(df.columns) == ["count", "value"]


def test_save_spreadsheet_truncates_sheet_names(tmp_path):
    target = tmp_path / "rows.xlsx"
    long_name = "x" * 40
    save_spreadsheet(target, {long_name: report_frame([{"a": 1}])})
    sheets = pd.read_excel(target, sheet_name=None, engine="openpyxl")
    assert list(sheets) == ["x" * 31]


def test_save_output_errors(tmp_path):
    with pytest.raises(ReportFileError):
        save_output(tmp_path / "rows.txt", {"t": report_frame([{"a": 1}])})
    with pytest.raises(ReportFileError):
        save_output(tmp_path / "rows.csv", {})
