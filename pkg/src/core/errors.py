#!/usr/bin/env python3
"""
Exception hierarchy for the grid factor engine
Every exception carries the process exit code the command line reports for it
"""


class GridFactorError(Exception):
    """Base class for all engine errors"""

    exit_code = 1


class VerificationFailure(GridFactorError):
    """An invariant check produced at least one violation"""

    exit_code = 1


class MatrixIntegrityError(GridFactorError):
    """A serialized transfer matrix failed its checksum or format check"""

    exit_code = 1


class CodeMatrixError(GridFactorError):
    """A code matrix does not describe a 2-factor of its grid"""

    exit_code = 1


class ResourceLimitError(GridFactorError):
    """A configured width, vertex or dimension cap was exceeded"""

    exit_code = 2


class GridRangeError(GridFactorError):
    """The requested grid is degenerate (loops or parallel edges)"""

    exit_code = 2


class InvalidArgumentError(GridFactorError, ValueError):
    """Malformed input: words, grid specs, configuration values"""

    exit_code = 3


class InvalidWordError(InvalidArgumentError):
    pass


class InvalidSpecError(InvalidArgumentError):
    pass


class ConfigurationError(InvalidArgumentError):
    pass
