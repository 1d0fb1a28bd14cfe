"""
Utility functions for the RRLD toolkit
"""

from .checksums import file_checksum, parameter_checksum, tensor_checksum
from .log_setup import attach_run_log, configure_logging, detach_run_log, get_console
from .seeding import derive_seed, enable_determinism, make_generator
from .settings import find_project_root, get_output_root, get_version_string

__all__ = [
    "file_checksum",
    "parameter_checksum",
    "tensor_checksum",
    "attach_run_log",
    "configure_logging",
    "detach_run_log",
    "get_console",
    "derive_seed",
    "enable_determinism",
    "make_generator",
    "find_project_root",
    "get_output_root",
    "get_version_string",
]
