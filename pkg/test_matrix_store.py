"""
Tests for matrix serialization, checksums and the on-disk cache
"""

import json
from pathlib import Path

import pytest

from core.errors import ConfigurationError, MatrixIntegrityError
from core.matrix_store import FORMAT_VERSION, MatrixStore, deserialize_matrix, serialize_matrix
from core.run_config import CACHE_DIR_ENV, RunConfig
from core.transfer import build_matrix


def test_serialized_matrix_reloads():
    matrix = build_matrix(4, "circular")
    text = serialize_matrix(matrix)
    assert deserialize_matrix(text) == matrix
    assert serialize_matrix(build_matrix(4, "circular", threads=4)) == text


def test_serialized_fields():
    payload = json.loads(serialize_matrix(build_matrix(2, "circular")))
    assert payload["m"] == 2
    assert payload["kind"] == "circular"
    assert payload["format_version"] == FORMAT_VERSION
    assert len(payload["entries"]) == 6
    assert sum(mult for _, _, mult in payload["entries"]) == 10
    assert payload["entries"][0] == ["00", "00", 1]


def test_width_one_linear_file():
    payload = json.loads(serialize_matrix(build_matrix(1, "linear")))
    assert payload["entries"] == [["1", "1", 1]]


def test_tampered_entry_fails_checksum():
    payload = json.loads(serialize_matrix(build_matrix(3, "linear")))
    payload["entries"][0][2] = 2
    with pytest.raises(MatrixIntegrityError, match="Checksum"):
        deserialize_matrix(json.dumps(payload))


def test_unknown_format_version():
    payload = json.loads(serialize_matrix(build_matrix(2, "linear")))
    payload["format_version"] = "2.0"
    with pytest.raises(MatrixIntegrityError, match="version"):
        deserialize_matrix(json.dumps(payload))
    payload["format_version"] = "1.7"
    assert deserialize_matrix(json.dumps(payload)).m == 2


def test_malformed_text():
    with pytest.raises(MatrixIntegrityError):
        deserialize_matrix("{not json")
    with pytest.raises(MatrixIntegrityError):
        deserialize_matrix(json.dumps({"m": 2}))


def test_store_writes_and_reuses_cache(run_config, logger):
    first = MatrixStore(run_config, logger)
    matrix = first.get(3, "circular")
    path = first.cache_path(3, "circular")
    assert path.exists()
    assert first.get(3, "circular") is matrix

    second = MatrixStore(run_config, logger)
    assert second.get(3, "circular") == matrix
    assert any("MATRIX_LOAD" in line for line in logger.get_recent_events())


def test_corrupted_cache_is_detected(run_config, logger):
    store = MatrixStore(run_config, logger)
    store.get(3, "linear")
    path = store.cache_path(3, "linear")
    path.write_text(path.read_text().replace('"01', '"11', 1))

    valid, message = store.validate_matrix_file(path)
    assert not valid
    assert "Checksum" in message
    with pytest.raises(MatrixIntegrityError):
        MatrixStore(run_config, logger).get(3, "linear")


def test_validate_matrix_file(store, tmp_path):
    path = store.save(build_matrix(2, "linear"), tmp_path / "m2.json")
    assert store.validate_matrix_file(path) == (True, "width 2 linear matrix with 5 entries")
    assert not store.validate_matrix_file(tmp_path / "missing.json")[0]


def test_cache_can_be_disabled(tmp_path):
    config = RunConfig(cache_dir=tmp_path / "cache", use_cache=False, threads=1)
    store = MatrixStore(config)
    store.get(2, "circular")
    assert not (tmp_path / "cache").exists()


def test_unwritable_cache_still_returns_matrix(tmp_path, logger):
    blocker = tmp_path / "cachefile"
    blocker.write_text("not a directory")
    config = RunConfig(cache_dir=blocker / "sub", threads=1)
    matrix = MatrixStore(config, logger).get(2, "circular")
    assert matrix == build_matrix(2, "circular")
    errors = (Path(logger.log_dir) / "gridfactor_errors.log").read_text()
    assert "MATRIX_SAVE" in errors


def test_config_from_env(monkeypatch, tmp_path):
    monkeypatch.setenv(CACHE_DIR_ENV, str(tmp_path / "env-cache"))
    assert RunConfig.from_env().resolved_cache_dir() == tmp_path / "env-cache"
    assert RunConfig.from_env(cache_dir=tmp_path / "flag").resolved_cache_dir() == tmp_path / "flag"
    assert RunConfig.from_env(threads=None).threads == "auto"


@pytest.mark.parametrize("changes", [{"width_cap": 0}, {"output": "xml"}, {"threads": "many"}, {"threads": 0}])
def test_config_validation(changes):
    with pytest.raises(ConfigurationError):
        RunConfig().with_overrides(**changes)
