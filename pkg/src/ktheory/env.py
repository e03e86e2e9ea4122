"""Environment overrides for the size guards on exhaustive computations."""

from __future__ import annotations

import os

from .errors import InputError


def guard(name: str, default: int) -> int:
    """Integer limit ``default`` unless the environment variable ``name`` overrides it."""
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise InputError(f"{name} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise InputError(f"{name} must be positive, got {value}")
    return value
