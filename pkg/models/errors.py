"""
Error taxonomy shared by every package.

Each error carries the process exit code the CLI reports for it, so a CI job
can tell usage, data and numeric failures apart without parsing messages.
"""

from __future__ import annotations

from typing import Optional

from config import EXIT_DATA, EXIT_NUMERIC, EXIT_USAGE


class RRLDError(Exception):
    """Base class for toolkit errors."""

    exit_code = EXIT_DATA


class ConfigurationError(RRLDError, ValueError):
    """Raised when a configuration violates one of its constraints."""

    exit_code = EXIT_USAGE


class DimensionError(RRLDError, ValueError):
    """Raised on shape or length mismatches."""

    exit_code = EXIT_NUMERIC


class TemperatureError(RRLDError, ValueError):
    """Raised when a softmax temperature is not strictly positive."""

    exit_code = EXIT_NUMERIC


class NumericError(RRLDError, ValueError):
    """Raised on non-finite values or malformed probability inputs."""

    exit_code = EXIT_NUMERIC

    def __init__(
        self,
        message: str,
        *,
        component: Optional[str] = None,
        step: Optional[int] = None,
        grad_norm: Optional[float] = None,
    ) -> None:
        super().__init__(message)
        self.component = component
        self.step = step
        self.grad_norm = grad_norm


class ContractViolation(RRLDError, RuntimeError):
    """Raised when a stop-gradient input still carries a gradient path."""

    exit_code = EXIT_NUMERIC


class PolicyParseError(RRLDError, ValueError):
    """Raised when an augmentation policy document cannot be parsed."""

    exit_code = EXIT_USAGE

    def __init__(self, message: str, *, line: Optional[int] = None) -> None:
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")
        self.line = line


class DatasetError(RRLDError, RuntimeError):
    """Raised on dataset layout, split or iteration problems."""

    exit_code = EXIT_DATA

    def __init__(self, message: str, *, path: Optional[str] = None) -> None:
        suffix = f" ({path})" if path else ""
        super().__init__(f"{message}{suffix}")
        self.path = path


class CheckpointError(RRLDError, RuntimeError):
    """Raised when a checkpoint cannot be written or read."""

    exit_code = EXIT_DATA

    def __init__(self, message: str, *, path: Optional[str] = None) -> None:
        suffix = f" ({path})" if path else ""
        super().__init__(f"{message}{suffix}")
        self.path = path


class RegistryError(RRLDError, RuntimeError):
    """Raised when a run-registry operation fails."""

    exit_code = EXIT_DATA


class ReportError(RRLDError, RuntimeError):
    """Raised when completed runs cannot be aggregated into one table."""

    exit_code = EXIT_DATA
