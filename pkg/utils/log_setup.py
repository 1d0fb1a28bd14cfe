"""
Logging configuration built on rich.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler

FILE_LOG_FORMAT = "%(asctime)s %(levelname)-5.5s [%(name)s] %(message)s"

_console: Optional[Console] = None


def get_console() -> Console:
    """Shared stderr console so log lines and tables do not interleave."""
    global _console
    if _console is None:
        _console = Console(stderr=True)
    return _console


def configure_logging(level: int | str = logging.INFO, log_file: Optional[Path] = None) -> None:
    """
    Install a RichHandler on the root logger, replacing earlier handlers.

    Parameters
    ----------
    level:
        Root log level.
    log_file:
        Optional plain-text log written alongside run artifacts.
    """
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    root.setLevel(level)
    root.addHandler(
        RichHandler(console=get_console(), show_path=False, rich_tracebacks=False, markup=False)
    )
    if log_file is not None:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(FILE_LOG_FORMAT))
        root.addHandler(file_handler)


def attach_run_log(log_file: Path) -> logging.Handler:
    """Add a file handler for one run directory; caller removes it when done."""
    log_file.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(log_file, encoding="utf-8")
    handler.setFormatter(logging.Formatter(FILE_LOG_FORMAT))
    logging.getLogger().addHandler(handler)
    return handler


def detach_run_log(handler: logging.Handler) -> None:
    logging.getLogger().removeHandler(handler)
    handler.close()
