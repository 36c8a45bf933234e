#!/usr/bin/env python3
"""
Run configuration: resource caps, output format, threading and cache location
"""

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Union

from core.errors import ConfigurationError

CACHE_DIR_ENV = "GRIDFACTOR_CACHE_DIR"
OUTPUT_FORMATS = ("json", "csv")


@dataclass(frozen=True)
class RunConfig:
    """
    Settings shared by every command

    Args:
        width_cap: Largest width for which transfer matrices are built
        census_vertex_cap: Largest grid the brute-force census will search
        dense_dim_cap: Largest matrix dimension evaluated by dense powers
        output: json or csv
        threads: Worker count, or "auto" for the CPU count
        cache_dir: Matrix cache directory (None uses the default location)
        use_cache: Read and write the on-disk matrix cache
        log_dir: Directory for the rotating log files
    """

    width_cap: int = 14
    census_vertex_cap: int = 36
    dense_dim_cap: int = 1024
    output: str = "json"
    threads: Union[int, str] = "auto"
    cache_dir: Optional[Path] = None
    use_cache: bool = True
    log_dir: str = "logs"
    verbose: bool = False
    timing: bool = False

    @classmethod
    def from_env(cls, **overrides) -> "RunConfig":
        """Build a config, taking the cache directory from GRIDFACTOR_CACHE_DIR when set"""
        env_dir = os.environ.get(CACHE_DIR_ENV)
        if env_dir and overrides.get("cache_dir") is None:
            overrides["cache_dir"] = Path(env_dir)
        overrides = {key: value for key, value in overrides.items() if value is not None}
        return cls(**overrides).validate()

    def validate(self) -> "RunConfig":
        for name in ("width_cap", "census_vertex_cap", "dense_dim_cap"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
        if self.output not in OUTPUT_FORMATS:
            raise ConfigurationError(f"output must be one of {OUTPUT_FORMATS}, got {self.output!r}")
        self.resolved_threads()
        return self

    def resolved_threads(self) -> int:
        if self.threads == "auto":
            return os.cpu_count() or 1
        try:
            threads = int(self.threads)
        except (TypeError, ValueError):
            raise ConfigurationError(f"threads must be a positive integer or 'auto', got {self.threads!r}")
        if threads < 1:
            raise ConfigurationError(f"threads must be a positive integer or 'auto', got {self.threads!r}")
        return threads

    def resolved_cache_dir(self) -> Path:
        if self.cache_dir is not None:
            return Path(self.cache_dir)
        return Path.home() / ".cache" / "gridfactor"

    def with_overrides(self, **changes) -> "RunConfig":
        return replace(self, **changes).validate()
