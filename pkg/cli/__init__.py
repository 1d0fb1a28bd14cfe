"""
Command-line entry point: synth, corrupt, train, eval, report, selftest.
"""

from __future__ import annotations

import logging
from typing import Optional, Sequence

from config import EXIT_FAILURE
from models import RRLDError
from utils import configure_logging

from .parser import build_parser

logger = logging.getLogger(__name__)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except RRLDError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except KeyboardInterrupt:
        logger.error("interrupted")
        return EXIT_FAILURE


__all__ = ["main", "build_parser"]
