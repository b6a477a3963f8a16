"""Bundled small pattern instances used by the docs and golden tests."""

from __future__ import annotations

from importlib import resources

from ..pattern import PatternMatrix, parse_pattern

NAMES = (
    "example1.pat",
    "example1-prime.pat",
    "example2.pat",
    "example3.pat",
    "M1.pat",
    "M2.pat",
    "M3.pat",
)


def fixture_text(name: str) -> str:
    return resources.files(__package__).joinpath(name).read_text(encoding="utf-8")


def load(name: str) -> PatternMatrix:
    """Parse a bundled pattern by file name (see NAMES)."""
    return parse_pattern(fixture_text(name))
