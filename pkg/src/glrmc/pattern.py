"""Pattern matrices over {0, *, ?} and their derived forms.

A pattern records, for every entry of an n x m matrix, whether the entry
is a fixed zero (``0``), an unknown generic value (``*``), or missing and
free to choose (``?``).  All public indices are 1-based to match the
reporting convention used throughout the package; the backing store is a
read-only ``int8`` numpy grid.

Instances are immutable after construction and all operations are pure,
so patterns may be shared freely across threads.
"""

from __future__ import annotations

from enum import IntEnum
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptyPatternError,
    IllegalCharacterError,
    IndexOutOfRangeError,
    InvalidKError,
    RaggedRowsError,
)


class EntryKind(IntEnum):
    """The three entry symbols of a pattern matrix."""

    ZERO = 0
    STAR = 1
    QUERY = 2


ZERO = EntryKind.ZERO
STAR = EntryKind.STAR
QUERY = EntryKind.QUERY

_CHAR_TO_KIND = {"0": ZERO, "*": STAR, "?": QUERY}
_KIND_TO_CHAR = {ZERO: "0", STAR: "*", QUERY: "?"}

IndexSet = tuple[int, ...]


def as_index_set(indices: Iterable[int], upper: int, what: str = "index") -> IndexSet:
    """Canonicalize a 1-based index collection: sorted, duplicate-free.

    Raises IndexOutOfRangeError when any index falls outside 1..upper.
    """
    out = tuple(sorted({int(i) for i in indices}))
    for i in out:
        if not 1 <= i <= upper:
            raise IndexOutOfRangeError(f"{what} {i} outside 1..{upper}")
    return out


class PatternMatrix:
    """Immutable n x m grid of EntryKind values."""

    __slots__ = ("_grid", "__dict__")

    def __init__(self, grid: np.ndarray):
        g = np.asarray(grid, dtype=np.int8)
        if g.ndim != 2 or g.shape[0] < 1 or g.shape[1] < 1:
            raise ValueError("pattern grid must be 2-D with positive shape")
        if not np.isin(g, (0, 1, 2)).all():
            raise ValueError("pattern grid entries must be 0 (zero), 1 (*), 2 (?)")
        g = np.ascontiguousarray(g)
        g.flags.writeable = False
        self._grid = g

    # -- basic shape -------------------------------------------------------

    @property
    def grid(self) -> np.ndarray:
        """Read-only int8 backing array (0-based; values are EntryKind)."""
        return self._grid

    @property
    def n_rows(self) -> int:
        return self._grid.shape[0]

    @property
    def n_cols(self) -> int:
        return self._grid.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._grid.shape

    def entry(self, row: int, col: int) -> EntryKind:
        """Entry at 1-based (row, col)."""
        self._check_row(row)
        self._check_col(col)
        return EntryKind(int(self._grid[row - 1, col - 1]))

    def _check_row(self, row: int) -> None:
        if not 1 <= row <= self.n_rows:
            raise IndexOutOfRangeError(f"row {row} outside 1..{self.n_rows}")

    def _check_col(self, col: int) -> None:
        if not 1 <= col <= self.n_cols:
            raise IndexOutOfRangeError(f"col {col} outside 1..{self.n_cols}")

    # -- index sets ---------------------------------------------------------

    def _omega(self, kind: EntryKind) -> frozenset[tuple[int, int]]:
        rows, cols = np.nonzero(self._grid == int(kind))
        return frozenset((int(r) + 1, int(c) + 1) for r, c in zip(rows, cols))

    @cached_property
    def omega_zero(self) -> frozenset[tuple[int, int]]:
        return self._omega(ZERO)

    @cached_property
    def omega_star(self) -> frozenset[tuple[int, int]]:
        return self._omega(STAR)

    @cached_property
    def omega_query(self) -> frozenset[tuple[int, int]]:
        return self._omega(QUERY)

    def star_rows(self, col: int) -> IndexSet:
        """1-based rows where column ``col`` holds a * entry."""
        self._check_col(col)
        return tuple(int(r) + 1 for r in np.nonzero(self._grid[:, col - 1] == int(STAR))[0])

    def query_rows(self, col: int) -> IndexSet:
        """1-based rows where column ``col`` holds a ? entry."""
        self._check_col(col)
        return tuple(int(r) + 1 for r in np.nonzero(self._grid[:, col - 1] == int(QUERY))[0])

    # -- derived patterns ----------------------------------------------------

    def submatrix(self, rows: Iterable[int] | None = None,
                  cols: Iterable[int] | None = None) -> "PatternMatrix":
        """Subpattern with the given 1-based rows/columns (None = all)."""
        r = as_index_set(rows, self.n_rows, "row") if rows is not None else None
        c = as_index_set(cols, self.n_cols, "col") if cols is not None else None
        g = self._grid
        if r is not None:
            g = g[np.array(r, dtype=np.int64) - 1, :]
        if c is not None:
            g = g[:, np.array(c, dtype=np.int64) - 1]
        return PatternMatrix(g)

    # -- dunder ----------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PatternMatrix):
            return NotImplemented
        return self.shape == other.shape and bool((self._grid == other._grid).all())

    def __hash__(self) -> int:
        return hash((self.shape, self._grid.tobytes()))

    def __repr__(self) -> str:
        return f"PatternMatrix({self.n_rows}x{self.n_cols}: {serialize(self)!r})"


def parse_pattern(text: str) -> PatternMatrix:
    """Parse pattern text: one matrix row per line, characters {0, *, ?}.

    Whitespace between characters is ignored, lines starting with '#' are
    comments, blank lines are skipped.  LF and CRLF both work.
    """
    rows: list[list[int]] = []
    for raw in text.splitlines():
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        row: list[int] = []
        pos = 0
        for ch in raw:
            if ch.isspace():
                continue
            pos += 1
            kind = _CHAR_TO_KIND.get(ch)
            if kind is None:
                raise IllegalCharacterError(ch, len(rows) + 1, pos)
            row.append(int(kind))
        rows.append(row)
    if not rows:
        raise EmptyPatternError("no data lines in pattern text")
    width = len(rows[0])
    for idx, row in enumerate(rows, start=1):
        if len(row) != width:
            raise RaggedRowsError(
                f"row {idx} has {len(row)} entries, expected {width}"
            )
    return PatternMatrix(np.array(rows, dtype=np.int8))


def serialize(pattern: PatternMatrix) -> str:
    """Canonical text form: rows of {0,*,?} characters, LF-terminated."""
    lines = []
    for j in range(pattern.n_rows):
        lines.append(
            "".join(_KIND_TO_CHAR[EntryKind(int(v))] for v in pattern.grid[j])
        )
    return "\n".join(lines) + "\n"


def bar_pattern(pattern: PatternMatrix) -> PatternMatrix:
    """Replace every ? entry by 0 (the all-missing-entries-zero pattern)."""
    g = pattern.grid.copy()
    g[g == int(QUERY)] = int(ZERO)
    return PatternMatrix(g)


def hat_pattern(pattern: PatternMatrix) -> PatternMatrix:
    """Replace every ? entry by * (the all-missing-entries-free pattern)."""
    g = pattern.grid.copy()
    g[g == int(QUERY)] = int(STAR)
    return PatternMatrix(g)


def with_basis_columns(pattern: PatternMatrix, basis: Iterable[int]) -> PatternMatrix:
    """Promote ? entries to * inside the 1-based columns ``basis``.

    The remaining columns are untouched; the result's basis columns hold no
    ? entries.  The empty basis returns the pattern unchanged and the full
    column set coincides with :func:`hat_pattern`.
    """
    cols = as_index_set(basis, pattern.n_cols, "col")
    g = pattern.grid.copy()
    for c in cols:
        col = g[:, c - 1]
        col[col == int(QUERY)] = int(STAR)
    return PatternMatrix(g)


def transpose(pattern: PatternMatrix) -> PatternMatrix:
    return PatternMatrix(pattern.grid.T)


def assumption1_holds(pattern: PatternMatrix, k: int) -> tuple[bool, str]:
    """Standing-assumption screen: m >= n and grank of the ?->0 pattern > n-k.

    Returns (holds, diagnostic).  When the check fails the associated
    completion problem is trivially feasible: filling every ? with zero
    already yields rank <= n-k for almost all realizations (and patterns
    with m < n are expected to be transposed first).
    """
    n, m = pattern.shape
    if not 1 <= k <= n:
        raise InvalidKError(f"k={k} outside 1..{n}")
    if m < n:
        return False, f"m >= n fails: pattern is {n}x{m}; transpose first"
    from .matching import generic_rank

    g = generic_rank(bar_pattern(pattern))
    if g <= n - k:
        return False, f"grank of the ?->0 pattern is {g}, not > n-k = {n - k}"
    return True, f"m >= n and grank of the ?->0 pattern is {g} > n-k = {n - k}"
