"""Bipartite-graph view of patterns and generic rank via maximum matching.

The generic rank of a {0,*} pattern equals the maximum matching
cardinality of its support graph, so every rank query here reduces to a
Hopcroft-Karp run on a boolean support matrix.  Row-deleted rank queries,
which the feasibility tests issue in bulk, reuse the base matching and
probe a single alternating path instead of recomputing from scratch.

Graphs are immutable and all queries allocate their own scratch state, so
concurrent use of one graph is safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from . import _kernels
from .errors import QueryEntryPresentError
from .pattern import QUERY, STAR, ZERO, EntryKind, PatternMatrix, as_index_set

BOTH_LABELS = frozenset((STAR, QUERY))
STAR_ONLY = frozenset((STAR,))


@dataclass(frozen=True)
class MatchingResult:
    """A maximum matching: its (unique) cardinality and one witness pair set."""

    cardinality: int
    pairs: tuple[tuple[int, int], ...]  # 1-based (row, col), sorted by row


class PatternBipartiteGraph:
    """Bipartite graph of a pattern: row vertices vs column vertices.

    An edge joins row j and column i whenever the entry is not a fixed
    zero; the edge label is the entry kind (* or ?).
    """

    def __init__(self, pattern: PatternMatrix):
        self.pattern = pattern

    @property
    def n_rows(self) -> int:
        return self.pattern.n_rows

    @property
    def n_cols(self) -> int:
        return self.pattern.n_cols

    @cached_property
    def edges(self) -> tuple[tuple[int, int, EntryKind], ...]:
        """All edges as (row, col, label), row-major order, 1-based."""
        g = self.pattern.grid
        rows, cols = np.nonzero(g != int(ZERO))
        return tuple(
            (int(r) + 1, int(c) + 1, EntryKind(int(g[r, c])))
            for r, c in zip(rows, cols)
        )

    @property
    def star_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((r, c) for r, c, lab in self.edges if lab is STAR)

    @property
    def query_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((r, c) for r, c, lab in self.edges if lab is QUERY)


def build_graph(pattern: PatternMatrix) -> PatternBipartiteGraph:
    return PatternBipartiteGraph(pattern)


def _support(
    grid: np.ndarray,
    rows: tuple[int, ...] | None,
    cols: tuple[int, ...] | None,
    labels: frozenset[EntryKind],
) -> np.ndarray:
    """uint8 edge indicator over the full shape with inactive lines zeroed."""
    if STAR in labels and QUERY in labels:
        sup = grid != int(ZERO)
    elif STAR in labels:
        sup = grid == int(STAR)
    elif QUERY in labels:
        sup = grid == int(QUERY)
    else:
        sup = np.zeros(grid.shape, dtype=bool)
    sup = np.ascontiguousarray(sup.astype(np.uint8))
    if rows is not None:
        keep = np.zeros(grid.shape[0], dtype=bool)
        keep[np.array(rows, dtype=np.int64) - 1] = True
        sup[~keep, :] = 0
    if cols is not None:
        keep = np.zeros(grid.shape[1], dtype=bool)
        keep[np.array(cols, dtype=np.int64) - 1] = True
        sup[:, ~keep] = 0
    return sup


def max_matching(
    graph: PatternBipartiteGraph,
    rows: Iterable[int] | None = None,
    cols: Iterable[int] | None = None,
    labels: Iterable[EntryKind] = BOTH_LABELS,
) -> MatchingResult:
    """Maximum matching of the induced subgraph using allowed edge labels.

    ``rows``/``cols`` restrict the vertex sets (1-based; None keeps all).
    The cardinality is unique; the witness pair set is the deterministic
    one produced by ascending-order augmentation.
    """
    pattern = graph.pattern
    r = as_index_set(rows, pattern.n_rows, "row") if rows is not None else None
    c = as_index_set(cols, pattern.n_cols, "col") if cols is not None else None
    sup = _support(pattern.grid, r, c, frozenset(labels))
    size, row_match, _ = _kernels.hk_matching(sup)
    pairs = tuple(
        (j + 1, int(row_match[j]) + 1)
        for j in range(pattern.n_rows)
        if row_match[j] != -1
    )
    return MatchingResult(cardinality=int(size), pairs=pairs)


def generic_rank(
    pattern: PatternMatrix,
    rows: Iterable[int] | None = None,
    cols: Iterable[int] | None = None,
    treat_query_as_star: bool = False,
) -> int:
    """Generic rank of the selected subpattern.

    The selected region must be free of ? entries unless
    ``treat_query_as_star`` is set: rank statements for patterns with
    missing entries depend on which derived pattern is meant, so the
    caller has to be explicit.
    """
    r = as_index_set(rows, pattern.n_rows, "row") if rows is not None else None
    c = as_index_set(cols, pattern.n_cols, "col") if cols is not None else None
    if not treat_query_as_star:
        region = pattern.grid
        if r is not None:
            region = region[np.array(r, dtype=np.int64) - 1, :]
        if c is not None:
            region = region[:, np.array(c, dtype=np.int64) - 1]
        if (region == int(QUERY)).any():
            raise QueryEntryPresentError(
                "selected region contains ? entries; pass treat_query_as_star=True "
                "to rank the ?->* relaxation"
            )
        labels = STAR_ONLY
    else:
        labels = BOTH_LABELS
    sup = _support(pattern.grid, r, c, labels)
    size, _, _ = _kernels.hk_matching(sup)
    return int(size)


def row_deleted_granks(
    pattern: PatternMatrix,
    cols: Iterable[int],
    treat_query_as_star: bool = False,
) -> tuple[int, np.ndarray]:
    """Generic rank of pattern[:, cols] and of every single-row deletion.

    Returns (base_rank, deleted) where deleted[j-1] is the generic rank of
    the subpattern with 1-based row j removed.  The base maximum matching
    is computed once; each deletion answers with one alternating-path
    probe, so the whole profile costs one matching plus n probes.
    """
    c = as_index_set(cols, pattern.n_cols, "col")
    if not treat_query_as_star:
        region = (
            pattern.grid[:, np.array(c, dtype=np.int64) - 1]
            if c
            else pattern.grid[:, :0]
        )
        if (region == int(QUERY)).any():
            raise QueryEntryPresentError(
                "selected columns contain ? entries; pass treat_query_as_star=True"
            )
        labels = STAR_ONLY
    else:
        labels = BOTH_LABELS
    sup = _support(pattern.grid, None, c, labels)
    size, row_match, _ = _kernels.hk_matching(sup)
    n = pattern.n_rows
    deleted = np.empty(n, dtype=np.int64)
    for j in range(n):
        mc = int(row_match[j])
        if mc == -1:
            deleted[j] = size
        elif _kernels.augment_exists(sup, row_match, j, mc):
            deleted[j] = size
        else:
            deleted[j] = size - 1
    return int(size), deleted
