"""Collects one pass/fail line per acceptance criterion."""

from __future__ import annotations

_LINES: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> str:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    _LINES[number] = line
    print(line)
    return line


def lines() -> list[str]:
    return [_LINES[k] for k in sorted(_LINES)]
