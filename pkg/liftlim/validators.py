"""Parameter validation utilities for analysis options."""

import re
from typing import List

from .words import IDENTIFIER

REPORT_FORMATS = ["text", "structured"]

COMMANDS = [
    "check",
    "classify",
    "fiber",
    "pi1",
    "pi0",
    "deck",
    "density",
    "meet",
    "compare",
    "thread-from",
    "lift",
    "restrict",
]


class ValidationError(Exception):
    """Validation error for analysis parameters."""
    pass


def validate_horizon(horizon: int) -> None:
    """Validate an analysis horizon.

    Args:
        horizon: Number of stages to examine

    Raises:
        ValidationError: If not a positive integer
    """
    if isinstance(horizon, bool) or not isinstance(horizon, int) or horizon <= 0:
        raise ValidationError(f"Horizon must be a positive integer, got {horizon!r}")


def validate_budget(max_cosets: int) -> None:
    """Validate a coset enumeration budget.

    Args:
        max_cosets: Limit on live cosets

    Raises:
        ValidationError: If not a positive integer
    """
    if isinstance(max_cosets, bool) or not isinstance(max_cosets, int) or max_cosets <= 0:
        raise ValidationError(f"Coset budget must be a positive integer, got {max_cosets!r}")


def validate_report_format(report: str) -> None:
    """Validate report format.

    Args:
        report: Format name

    Raises:
        ValidationError: If format is invalid
    """
    if report not in REPORT_FORMATS:
        raise ValidationError(
            f"Invalid report format: '{report}'. "
            f"Valid formats: {', '.join(REPORT_FORMATS)}"
        )


def validate_command(command: str) -> None:
    """Validate analysis command.

    Args:
        command: Command name

    Raises:
        ValidationError: If command is unknown
    """
    if command not in COMMANDS:
        raise ValidationError(
            f"Invalid command: '{command}'. "
            f"Valid commands: {', '.join(COMMANDS)}"
        )


def validate_identifier(name: str) -> None:
    """Validate a generator, group or hom name.

    Args:
        name: Identifier

    Raises:
        ValidationError: If the name is not an identifier
    """
    if not IDENTIFIER.fullmatch(name):
        raise ValidationError(
            f"Invalid name: '{name}'. "
            "Expected a letter or underscore followed by letters, digits or underscores"
        )


def validate_indices(text: str) -> List[int]:
    """Validate an index list such as '0,2,4' or '0,2,4,...'.

    Returns:
        The listed indices (without the continuation)

    Raises:
        ValidationError: If the list is malformed or not strictly increasing
    """
    if not re.match(r'^\s*\d+(\s*,\s*\d+)*(\s*,\s*\.\.\.)?\s*$', text):
        raise ValidationError(
            f"Invalid index list: '{text}'. "
            "Expected comma separated naturals, optionally ending in '...' (e.g., '0,2,4,...')"
        )
    indices = [int(p) for p in text.split(",") if p.strip() != "..."]
    if any(b <= a for a, b in zip(indices, indices[1:])):
        raise ValidationError(f"Indices must be strictly increasing, got {text}")
    if text.strip().endswith("...") and len(indices) < 2:
        raise ValidationError("An endless index list needs at least two indices")
    return indices

