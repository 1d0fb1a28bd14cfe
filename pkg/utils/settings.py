"""
Settings helpers for output locations and version stamping.

Resolution order mirrors the database settings: an environment variable wins,
otherwise everything lands under the project root.
"""

from __future__ import annotations

import os
import subprocess
from pathlib import Path

from config import DEFAULT_OUTPUT_DIRNAME, OUTPUT_ROOT_ENV, TOOLKIT_VERSION


def find_project_root() -> Path:
    """Return the repository root (the directory holding config.py)."""
    return Path(__file__).resolve().parent.parent


def get_output_root() -> Path:
    """
    Resolve the output root in the following order:

    1. `RRLD_OUTPUT_ROOT` environment variable.
    2. `<project root>/runs`.
    """
    env_override = os.getenv(OUTPUT_ROOT_ENV)
    if env_override:
        return Path(env_override).expanduser().resolve()
    return find_project_root() / DEFAULT_OUTPUT_DIRNAME


def get_version_string() -> str:
    """Toolkit version plus the git revision when the checkout has one."""
    try:
        completed = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=find_project_root(),
            capture_output=True,
            text=True,
            timeout=5,
            check=False,
        )
    except (OSError, subprocess.SubprocessError):
        return TOOLKIT_VERSION
    revision = completed.stdout.strip()
    if completed.returncode != 0 or not revision:
        return TOOLKIT_VERSION
    return f"{TOOLKIT_VERSION}+{revision}"
