"""Pattern parsing, derived patterns, and the standing-assumption screen."""

from __future__ import annotations

import numpy as np
import pytest

from glrmc import (
    EmptyPatternError,
    EntryKind,
    IllegalCharacterError,
    IndexOutOfRangeError,
    InvalidKError,
    PatternMatrix,
    RaggedRowsError,
    assumption1_holds,
    bar_pattern,
    generic_rank,
    hat_pattern,
    parse_pattern,
    serialize,
    transpose,
    with_basis_columns,
)
from conftest import random_mixed_pattern


class TestParse:
    def test_example1_index_sets(self, example1):
        assert example1.shape == (2, 4)
        assert example1.omega_zero == {(2, 4)}
        assert example1.omega_star == {(1, 1), (1, 3), (2, 1), (2, 2)}
        assert example1.omega_query == {(1, 2), (1, 4), (2, 3)}

    def test_singleton_zero(self):
        pat = parse_pattern("0")
        assert pat.shape == (1, 1)
        assert pat.omega_zero == {(1, 1)}
        assert not pat.omega_star and not pat.omega_query

    def test_illegal_character_position(self):
        with pytest.raises(IllegalCharacterError) as err:
            parse_pattern("**\n*x")
        assert err.value.row == 2
        assert err.value.col == 2

    def test_ragged_rows(self):
        with pytest.raises(RaggedRowsError):
            parse_pattern("**\n***")

    def test_empty(self):
        with pytest.raises(EmptyPatternError):
            parse_pattern("# only a comment\n\n")

    def test_whitespace_comments_crlf(self):
        pat = parse_pattern("# header\r\n* ? * ?\r\n * * ? 0\r\n")
        assert serialize(pat) == "*?*?\n**?0\n"

    def test_roundtrip(self):
        for i in range(25):
            pat = random_mixed_pattern(3, 5, seed=(101, i))
            assert parse_pattern(serialize(pat)) == pat

    def test_entry_accessor_and_bounds(self, example1):
        assert example1.entry(2, 4) is EntryKind.ZERO
        assert example1.entry(1, 1) is EntryKind.STAR
        with pytest.raises(IndexOutOfRangeError):
            example1.entry(3, 1)
        with pytest.raises(IndexOutOfRangeError):
            example1.entry(1, 5)


class TestDerivedPatterns:
    def test_bar_example1(self, example1):
        assert serialize(bar_pattern(example1)) == "*0*0\n**00\n"

    def test_hat_example1(self, example1):
        assert serialize(hat_pattern(example1)) == "****\n***0\n"

    def test_bar_hat_fixed_points(self):
        stars = parse_pattern("**\n**")
        zeros = parse_pattern("00\n00")
        queries = parse_pattern("??\n??")
        assert bar_pattern(stars) == stars
        assert hat_pattern(zeros) == zeros
        assert bar_pattern(queries) == zeros
        assert hat_pattern(queries) == stars

    def test_with_basis_columns_example2(self, example2):
        promoted = with_basis_columns(example2, (1, 2))
        assert promoted.entry(2, 2) is EntryKind.STAR
        # Columns outside the basis keep their ? entries.
        assert promoted.entry(3, 3) is EntryKind.QUERY
        assert promoted.entry(1, 4) is EntryKind.QUERY

    def test_with_basis_columns_edges(self, example1):
        assert with_basis_columns(example1, ()) == example1
        assert with_basis_columns(example1, range(1, 5)) == hat_pattern(example1)
        with pytest.raises(IndexOutOfRangeError):
            with_basis_columns(example1, (5,))

    def test_with_basis_columns_idempotent_monotone(self):
        for i in range(20):
            pat = random_mixed_pattern(4, 5, seed=(202, i))
            small = with_basis_columns(pat, (1, 3))
            large = with_basis_columns(pat, (1, 2, 3))
            assert with_basis_columns(small, (1, 3)) == small
            assert small.omega_star <= large.omega_star

    def test_transpose(self, example1):
        t = transpose(example1)
        assert t.shape == (4, 2)
        assert t.omega_zero == {(4, 2)}
        assert transpose(t) == example1

    def test_partition_counts(self):
        for i in range(20):
            pat = random_mixed_pattern(3, 6, seed=(303, i))
            total = len(pat.omega_zero) + len(pat.omega_star) + len(pat.omega_query)
            assert total == 18

    def test_bar_rank_below_hat_rank(self):
        for i in range(30):
            pat = random_mixed_pattern(4, 6, seed=(404, i))
            assert generic_rank(bar_pattern(pat)) <= generic_rank(hat_pattern(pat))


class TestAssumption1:
    def test_example1_holds(self, example1):
        holds, diag = assumption1_holds(example1, 1)
        assert holds
        assert "2" in diag

    def test_all_query_fails(self):
        holds, diag = assumption1_holds(parse_pattern("???\n???\n???"), 1)
        assert not holds
        assert "grank" in diag

    def test_tall_pattern_fails(self):
        holds, diag = assumption1_holds(parse_pattern("**\n**\n**"), 1)
        assert not holds
        assert "transpose" in diag

    def test_invalid_k(self, example1):
        with pytest.raises(InvalidKError):
            assumption1_holds(example1, 0)
        with pytest.raises(InvalidKError):
            assumption1_holds(example1, 3)


class TestImmutability:
    def test_grid_read_only(self, example1):
        with pytest.raises(ValueError):
            example1.grid[0, 0] = 1

    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            PatternMatrix(np.array([[0, 3]], dtype=np.int8))
