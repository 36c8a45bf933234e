"""
Tests for the command layer: outputs, exit codes and determinism
"""

import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from main_application import main

ROOT = Path(__file__).parent


def run(tmp_path, *argv, threads="1"):
    out = io.StringIO()
    args = list(argv) + ["--log-dir", str(tmp_path / "logs"), "--cache-dir", str(tmp_path / "cache"),
                         "--threads", threads]
    code = main(args, stdout=out)
    return code, out.getvalue()


def test_count_json(tmp_path):
    code, out = run(tmp_path, "count", "--family", "rg", "--m", "2", "--n", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["count"] == "1"
    assert payload["method"] in ("dense-power", "matvec")
    assert "elapsed_seconds" not in payload


def test_count_timing_and_csv(tmp_path):
    code, out = run(tmp_path, "count", "--family", "tnc", "--m", "2", "--n", "3", "--timing")
    assert code == 0
    payload = json.loads(out)
    assert payload["count"] == "13"
    assert "elapsed_seconds" in payload
    assert payload["degenerate_reason"]

    code, out = run(tmp_path, "count", "--family", "kb", "--m", "4", "--n", "3", "--p", "1", "--output", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["family", "m", "n", "p", "count", "method"]
    assert rows[1][:4] == ["kb", "4", "3", "1"]


def test_count_matches_oracle(tmp_path):
    code, out = run(tmp_path, "oracle", "--family", "kb", "--m", "4", "--n", "3", "--p", "1", "--compare")
    assert code == 0
    payload = json.loads(out)
    assert payload["agrees"] is True
    assert payload["formula"] == payload["total"]


def test_oracle_histogram(tmp_path):
    code, out = run(tmp_path, "oracle", "--family", "tg", "--m", "4", "--n", "3", "--p", "0", "--histogram")
    assert code == 0
    assert "1" in json.loads(out)["by_cycle_count"]
    code, out = run(tmp_path, "oracle", "--family", "rg", "--m", "2", "--n", "3")
    assert json.loads(out)["total"] == "1"


def test_matrix_command(tmp_path):
    code, out = run(tmp_path, "matrix", "--m", "2", "--kind", "circular")
    assert code == 0
    payload = json.loads(out)
    assert len(payload["entries"]) == 6
    assert sum(entry[2] for entry in payload["entries"]) == 10

    code, out = run(tmp_path, "matrix", "--m", "1", "--kind", "linear")
    assert json.loads(out)["entries"] == [["1", "1", 1]]


def test_matrix_output_is_byte_identical(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert run(tmp_path / "one", "matrix", "--m", "5", "--kind", "circular", "--out", str(first))[0] == 0
    assert run(tmp_path / "two", "matrix", "--m", "5", "--kind", "circular", "--out", str(second),
               threads="4")[0] == 0
    assert first.read_bytes() == second.read_bytes()


def test_structure_command(tmp_path):
    code, out = run(tmp_path, "structure", "--m", "3", "--kind", "circular")
    assert code == 0
    payload = json.loads(out)
    assert [c["size"] for c in payload["components"]] == [4, 4]
    code, out = run(tmp_path, "structure", "--m", "4", "--kind", "linear", "--output", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["s_label", "size", "contains", "bipartite"]
    assert [row[1] for row in rows[1:]] == ["6", "8", "2"]


def test_decode_command(tmp_path):
    code, out = run(tmp_path, "decode", "--family", "kb", "--m", "4", "--n", "3", "--p", "1",
                    "--columns", "bfdb cabb dfac")
    assert code == 0
    payload = json.loads(out)
    assert payload["cycles"] == 2
    assert payload["walk"] == ["0110", "0000", "1100", "0011"]

    code, out = run(tmp_path, "decode", "--family", "kb", "--m", "4", "--n", "3", "--p", "1",
                    "--columns", "bfdb cabb feab")
    assert code == 1
    assert json.loads(out)["valid"] is False


def test_verify_command(tmp_path):
    reports = tmp_path / "reports"
    code, out = run(tmp_path, "verify", "--m-max", "2", "--report-dir", str(reports))
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] is True
    assert {"m": 2, "kind": "circular", "sizes": [2, 2], "ok": True} in payload["structure"]
    assert sorted(path.name for path in reports.iterdir()) == [
        "structure_circular_m1.json", "structure_circular_m2.json",
        "structure_linear_m1.json", "structure_linear_m2.json",
    ]


def test_verify_detects_corrupted_cache(tmp_path):
    assert run(tmp_path, "matrix", "--m", "2", "--kind", "linear")[0] == 0
    cached = next((tmp_path / "cache").glob("matrix_linear_m2_*.json"))
    cached.write_text(cached.read_text().replace('"11", "11", 1', '"11", "11", 2'))
    code, out = run(tmp_path, "verify", "--m-max", "2", "--kind", "linear", "--no-differentials")
    assert code == 1
    assert any(v["check"] == "matrix-integrity" for v in json.loads(out)["violations"])


def test_sweep_csv(tmp_path):
    code, out = run(tmp_path, "sweep", "--families", "rg,tg", "--m-min", "3", "--m-max", "3",
                    "--n-min", "3", "--n-max", "4", "--output", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["family", "m", "n", "p", "count"]
    assert len(rows) == 1 + 2 + 2 * 3
    assert rows[1][:4] == ["rg", "3", "3", ""]


def test_threads_do_not_change_output(tmp_path):
    argv = ["sweep", "--families", "kb", "--m-min", "3", "--m-max", "4", "--n-min", "3", "--n-max", "5"]
    assert run(tmp_path / "one", *argv) == run(tmp_path / "many", *argv, threads="4")


@pytest.mark.parametrize("argv, expected", [
    (["matrix", "--m", "20", "--kind", "circular"], 2),
    (["oracle", "--family", "tnc", "--m", "2", "--n", "3"], 2),
    (["oracle", "--family", "rg", "--m", "7", "--n", "7"], 2),
    (["count", "--family", "tg", "--m", "4", "--n", "3"], 3),
    (["count", "--family", "rg", "--m", "4", "--n", "3", "--p", "1"], 3),
    (["count", "--family", "cube", "--m", "4", "--n", "3"], 3),
    (["count", "--family", "rg", "--m", "two", "--n", "3"], 3),
    (["count", "--family", "rg", "--m", "2", "--n", "3", "--threads", "0"], 3),
    (["bogus"], 3),
])
def test_exit_codes(tmp_path, argv, expected):
    out = io.StringIO()
    code = main(argv + ["--log-dir", str(tmp_path / "logs"), "--cache-dir", str(tmp_path / "cache")], stdout=out)
    assert code == expected


def test_errors_are_logged(tmp_path):
    run(tmp_path, "matrix", "--m", "20", "--kind", "circular")
    errors = (tmp_path / "logs" / "gridfactor_errors.log").read_text()
    assert "ResourceLimitError" in errors


def test_entry_point_script(tmp_path):
    result = subprocess.run(
        [sys.executable, str(ROOT / "main.py"), "count", "--family", "ms", "--m", "2", "--n", "2",
         "--log-dir", str(tmp_path / "logs"), "--cache-dir", str(tmp_path / "cache")],
        capture_output=True, text=True, timeout=120,
    )
    assert result.returncode == 0, result.stderr
    assert json.loads(result.stdout)["count"] == "3"


def test_count_survives_unwritable_cache(tmp_path):
    blocker = tmp_path / "cachefile"
    blocker.write_text("not a directory")
    out = io.StringIO()
    code = main(["count", "--family", "rg", "--m", "2", "--n", "2", "--threads", "1",
                 "--log-dir", str(tmp_path / "logs"), "--cache-dir", str(blocker / "sub")], stdout=out)
    assert code == 0
    assert json.loads(out.getvalue())["count"] == "1"
