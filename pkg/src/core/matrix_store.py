#!/usr/bin/env python3
"""
Matrix Store Component
Serializes transfer matrices to JSON, verifies their checksums and keeps an
on-disk cache keyed by width, kind, format version and letter-table version
"""

import hashlib
import json
import threading
import traceback
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

from packaging.version import InvalidVersion, Version

from core.alphabet import LETTER_TABLE_VERSION, BinaryWord, ColumnKind
from core.errors import MatrixIntegrityError
from core.run_config import RunConfig
from core.run_logger import EnumerationLogger
from core.transfer import SERIAL_ORDER, TransferMatrix, build_matrix

FORMAT_VERSION = "1.0"


def _checksum(m: int, kind: str, entries: list) -> str:
    canonical = json.dumps({"m": m, "kind": kind, "entries": entries}, separators=(",", ":"), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def matrix_to_payload(matrix: TransferMatrix) -> dict:
    entries = [
        [str(BinaryWord.from_index(v, matrix.m)), str(BinaryWord.from_index(w, matrix.m)), mult]
        for v, w, mult in matrix.entries()
    ]
    return {
        "m": matrix.m,
        "kind": matrix.kind.value,
        "order": SERIAL_ORDER,
        "format_version": FORMAT_VERSION,
        "letter_table_version": LETTER_TABLE_VERSION,
        "checksum": _checksum(matrix.m, matrix.kind.value, entries),
        "entries": entries,
    }


def serialize_matrix(matrix: TransferMatrix) -> str:
    """Byte-stable JSON text for a matrix (one entry per line)"""
    payload = matrix_to_payload(matrix)
    entries = payload.pop("entries")
    head = json.dumps(payload, indent=2)
    body = ",\n".join("    " + json.dumps(entry) for entry in entries)
    if body:
        return head[:-2] + ',\n  "entries": [\n' + body + "\n  ]\n}\n"
    return head[:-2] + ',\n  "entries": []\n}\n'


def _compatible(version_text: str) -> bool:
    try:
        return Version(version_text).major == Version(FORMAT_VERSION).major
    except InvalidVersion:
        return False


def deserialize_matrix(text: str) -> TransferMatrix:
    """
    Parse matrix JSON and verify it

    Raises:
        MatrixIntegrityError: malformed JSON, unknown format, or checksum mismatch
    """
    try:
        payload = json.loads(text)
        m = int(payload["m"])
        kind = payload["kind"]
        entries = payload["entries"]
        checksum = payload["checksum"]
        version = payload.get("format_version", "0")
    except (ValueError, KeyError, TypeError) as e:
        raise MatrixIntegrityError(f"Malformed matrix file: {e}")

    if not _compatible(str(version)):
        raise MatrixIntegrityError(f"Unsupported matrix format version {version!r} (reader is {FORMAT_VERSION})")
    if payload.get("order", SERIAL_ORDER) != SERIAL_ORDER:
        raise MatrixIntegrityError(f"Unknown word order {payload.get('order')!r}")
    if _checksum(m, kind, entries) != checksum:
        raise MatrixIntegrityError(f"Checksum mismatch for width {m} {kind} matrix")

    rows: Dict[int, Dict[int, int]] = {}
    try:
        for v, w, mult in entries:
            rows.setdefault(BinaryWord.parse(v).index, {})[BinaryWord.parse(w).index] = int(mult)
    except (ValueError, TypeError) as e:
        raise MatrixIntegrityError(f"Malformed matrix entry: {e}")
    return TransferMatrix(m, kind, rows)


class MatrixStore:
    """
    Builds transfer matrices on demand and caches them in memory and on disk
    """

    def __init__(self, config: Optional[RunConfig] = None, logger: Optional[EnumerationLogger] = None):
        """
        Args:
            config: Run configuration (width cap, threads, cache location)
            logger: Enumeration logger for the audit trail
        """
        self.config = config or RunConfig()
        self.logger = logger
        self._memo: Dict[Tuple[int, ColumnKind], TransferMatrix] = {}
        self._lock = threading.Lock()

    def cache_path(self, m: int, kind: Union[str, ColumnKind]) -> Path:
        kind = ColumnKind.parse(kind)
        name = f"matrix_{kind.value}_m{m}_f{FORMAT_VERSION}_l{LETTER_TABLE_VERSION}.json"
        return self.config.resolved_cache_dir() / name

    def get(self, m: int, kind: Union[str, ColumnKind]) -> TransferMatrix:
        """
        Return the matrix for (m, kind): from memory, from the cache, or freshly built

        Raises:
            ResourceLimitError: m above the configured width cap
            MatrixIntegrityError: a cached file exists but fails verification
        """
        kind = ColumnKind.parse(kind)
        key = (m, kind)
        with self._lock:
            if key in self._memo:
                return self._memo[key]

        matrix = None
        path = self.cache_path(m, kind)
        if self.config.use_cache and path.exists():
            matrix = self.load(path)
            if matrix.m != m or matrix.kind is not kind:
                raise MatrixIntegrityError(f"Cache file {path} holds width {matrix.m} {matrix.kind.value}")

        if matrix is None:
            matrix = build_matrix(m, kind, width_cap=self.config.width_cap,
                                  threads=self.config.resolved_threads())
            self._log_computation("MATRIX_BUILD", f"m={m} kind={kind.value} nnz={matrix.nnz}")
            if self.config.use_cache:
                try:
                    self.save(matrix, path)
                except OSError:
                    # save has logged the failure
                    pass

        with self._lock:
            self._memo[key] = matrix
        return matrix

    def save(self, matrix: TransferMatrix, path: Union[str, Path]) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp_path = path.with_suffix(path.suffix + ".tmp")
            tmp_path.write_text(serialize_matrix(matrix), encoding="utf-8")
            tmp_path.replace(path)
        except OSError as e:
            self._log_error("MATRIX_SAVE", f"Failed to write {path}: {e}", traceback.format_exc())
            raise
        self._log_file_operation("MATRIX_SAVE", str(path))
        return path

    def load(self, path: Union[str, Path]) -> TransferMatrix:
        path = Path(path)
        try:
            matrix = deserialize_matrix(path.read_text(encoding="utf-8"))
        except MatrixIntegrityError as e:
            self._log_file_operation("MATRIX_LOAD", str(path), "ERROR")
            self._log_error("MATRIX_INTEGRITY", f"{path}: {e}")
            raise
        self._log_file_operation("MATRIX_LOAD", str(path))
        return matrix

    def validate_matrix_file(self, path: Union[str, Path]) -> Tuple[bool, str]:
        """
        Validate a serialized matrix without caching it

        Returns:
            Tuple of (is_valid, message)
        """
        try:
            matrix = deserialize_matrix(Path(path).read_text(encoding="utf-8"))
        except OSError as e:
            return False, f"Cannot read {path}: {e}"
        except MatrixIntegrityError as e:
            return False, str(e)
        return True, f"width {matrix.m} {matrix.kind.value} matrix with {matrix.nnz} entries"

    def _log_computation(self, operation: str, info: str):
        if self.logger:
            self.logger.log_computation(operation, info)

    def _log_file_operation(self, operation: str, path: str, result: str = "SUCCESS"):
        if self.logger:
            self.logger.log_file_operation(operation, path, result)

    def _log_error(self, error_type: str, message: str, stack_trace: Optional[str] = None):
        if self.logger:
            self.logger.log_error(error_type, message, stack_trace)
