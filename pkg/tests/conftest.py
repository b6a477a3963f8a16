"""Shared fixtures: bundled patterns and seeded random-pattern factories."""

from __future__ import annotations

import numpy as np
import pytest

from glrmc import PatternMatrix, fixtures


@pytest.fixture(scope="session")
def example1() -> PatternMatrix:
    return fixtures.load("example1.pat")


@pytest.fixture(scope="session")
def example1_prime() -> PatternMatrix:
    return fixtures.load("example1-prime.pat")


@pytest.fixture(scope="session")
def example2() -> PatternMatrix:
    return fixtures.load("example2.pat")


@pytest.fixture(scope="session")
def example3() -> PatternMatrix:
    return fixtures.load("example3.pat")


@pytest.fixture(scope="session")
def table_m1() -> PatternMatrix:
    return fixtures.load("M1.pat")


@pytest.fixture(scope="session")
def table_m2() -> PatternMatrix:
    return fixtures.load("M2.pat")


@pytest.fixture(scope="session")
def table_m3() -> PatternMatrix:
    return fixtures.load("M3.pat")


def random_mixed_pattern(n: int, m: int, seed) -> PatternMatrix:
    """Entries i.i.d. uniform over {0, *, ?}."""
    rng = np.random.default_rng(seed)
    return PatternMatrix(rng.integers(0, 3, size=(n, m)).astype(np.int8))


def random_support_pattern(n: int, m: int, seed, star_prob: float = 0.5) -> PatternMatrix:
    """{0, *} pattern with i.i.d. Bernoulli * entries (no ? entries)."""
    rng = np.random.default_rng(seed)
    grid = (rng.random((n, m)) < star_prob).astype(np.int8)
    return PatternMatrix(grid)
