#!/usr/bin/env python3
"""
Enumeration Logger Component
Provides an audit trail and event logging for enumeration runs: which
matrices were built or loaded, which counts and censuses were computed,
and every failure with its stack trace.
"""

import datetime
import logging
import sys
import threading
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import List, Optional


class MicrosecondFormatter(logging.Formatter):
    def formatTime(self, record, datefmt=None):
        ct = datetime.datetime.fromtimestamp(record.created)
        if datefmt:
            if '%f' in datefmt:
                datefmt = datefmt.replace('%f', f'{ct.microsecond:06d}')
            return ct.strftime(datefmt)
        return ct.strftime('%Y-%m-%d %H:%M:%S')


class EnumerationLogger:
    """
    Event, error and audit logging for the grid factor engine
    """

    def __init__(self, log_dir: str = "logs", max_file_size: int = 10485760, backup_count: int = 5,
                 verbose: bool = False):
        """
        Initialize the enumeration logger

        Args:
            log_dir: Directory for log files
            max_file_size: Maximum size of each log file in bytes (default 10MB)
            backup_count: Number of backup files to keep
            verbose: Also mirror events to stderr
        """
        self.log_dir = Path(log_dir)
        self.max_file_size = max_file_size
        self.backup_count = backup_count
        self.verbose = verbose
        self._lock = threading.Lock()

        self.log_dir.mkdir(parents=True, exist_ok=True)
        self._setup_loggers()
        self.log_event("SYSTEM", "Enumeration logger initialized", "INFO")

    def _setup_loggers(self):
        """Set up one logger per purpose, namespaced by log directory"""
        namespace = f"gridfactor.{self.log_dir.resolve()}"

        self.event_logger = logging.getLogger(f"{namespace}.events")
        self.event_logger.setLevel(logging.INFO)

        self.error_logger = logging.getLogger(f"{namespace}.errors")
        self.error_logger.setLevel(logging.ERROR)

        self.audit_logger = logging.getLogger(f"{namespace}.audit")
        self.audit_logger.setLevel(logging.INFO)

        for logger in [self.event_logger, self.error_logger, self.audit_logger]:
            for handler in list(logger.handlers):
                handler.close()
            logger.handlers.clear()
            logger.propagate = False

        detailed_formatter = MicrosecondFormatter(
            '%(asctime)s | %(levelname)8s | %(name)s | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S.%f'
        )
        audit_formatter = MicrosecondFormatter(
            '%(asctime)s | AUDIT | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S.%f'
        )

        for logger, filename, formatter in [
            (self.event_logger, "gridfactor_events.log", detailed_formatter),
            (self.error_logger, "gridfactor_errors.log", detailed_formatter),
            (self.audit_logger, "gridfactor_audit.log", audit_formatter),
        ]:
            handler = RotatingFileHandler(
                self.log_dir / filename,
                maxBytes=self.max_file_size,
                backupCount=self.backup_count
            )
            handler.setFormatter(formatter)
            logger.addHandler(handler)

        if self.verbose:
            console = logging.StreamHandler(sys.stderr)
            console.setFormatter(logging.Formatter('%(levelname)s | %(message)s'))
            self.event_logger.addHandler(console)

    def log_event(self, event_type: str, message: str, severity: str = "INFO"):
        """
        Log an event with specified type and severity

        Args:
            event_type: Type of event (e.g., 'MATRIX_BUILD', 'CENSUS', 'SYSTEM')
            message: Event description
            severity: Severity level ('INFO', 'WARNING', 'ERROR', 'CRITICAL')
        """
        with self._lock:
            formatted_message = f"{event_type} | {message}"
            level = severity.upper()

            if level == "INFO":
                self.event_logger.info(formatted_message)
            elif level == "WARNING":
                self.event_logger.warning(formatted_message)
            elif level == "ERROR":
                self.event_logger.error(formatted_message)
                self.error_logger.error(formatted_message)
            elif level == "CRITICAL":
                self.event_logger.critical(formatted_message)
                self.error_logger.critical(formatted_message)

    def log_file_operation(self, operation: str, filepath: str, result: str = "SUCCESS"):
        """
        Log cache reads and writes

        Args:
            operation: Type of file operation (MATRIX_LOAD, MATRIX_SAVE, REPORT_WRITE, ...)
            filepath: Path to the file
            result: Result of the operation (SUCCESS, ERROR, ...)
        """
        message = f"FILE_OP | {operation} | {filepath} | {result}"

        with self._lock:
            self.audit_logger.info(message)
        self.log_event("FILE_OPERATION", message, "INFO" if result == "SUCCESS" else "ERROR")

    def log_computation(self, operation: str, info: str, result: str = "SUCCESS"):
        """
        Log an engine computation

        Args:
            operation: Type of computation (MATRIX_BUILD, COUNT, CENSUS, VERIFY, ...)
            info: What was computed (widths, families, values)
            result: Result of the operation
        """
        message = f"COMPUTE | {operation} | {info} | {result}"

        with self._lock:
            self.audit_logger.info(message)
        self.log_event("COMPUTATION", message, "INFO" if result == "SUCCESS" else "ERROR")

    def log_system_event(self, event: str, details: str = ""):
        message = f"SYSTEM | {event}"
        if details:
            message += f" | {details}"

        with self._lock:
            self.audit_logger.info(message)
        self.log_event("SYSTEM", f"{event} - {details}", "INFO")

    def log_error(self, error_type: str, error_message: str, stack_trace: Optional[str] = None):
        """
        Log errors with detailed information

        Args:
            error_type: Type of error
            error_message: Error description
            stack_trace: Optional stack trace
        """
        message = f"ERROR | {error_type} | {error_message}"
        if stack_trace:
            message += f" | STACK: {stack_trace}"

        with self._lock:
            self.audit_logger.error(message)
        self.log_event("ERROR", message, "ERROR")

    def get_log_files(self) -> List[str]:
        return sorted(str(path) for path in self.log_dir.glob("*.log*") if path.is_file())

    def get_recent_events(self, count: int = 100) -> List[str]:
        """
        Get recent events from the event log

        Args:
            count: Number of recent events to retrieve
        """
        for handler in self.event_logger.handlers:
            handler.flush()
        event_log_path = self.log_dir / "gridfactor_events.log"
        if not event_log_path.exists():
            return []
        try:
            with open(event_log_path, 'r', encoding='utf-8') as f:
                lines = f.readlines()
        except OSError as e:
            self.log_error("LOG_READ", f"Failed to read recent events: {e}")
            return []
        return lines[-count:]

    def close(self):
        """Flush and release the file handlers"""
        for logger in [self.event_logger, self.error_logger, self.audit_logger]:
            for handler in list(logger.handlers):
                handler.flush()
                handler.close()
            logger.handlers.clear()
