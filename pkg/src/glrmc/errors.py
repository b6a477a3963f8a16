"""Exception types shared across the package."""

from __future__ import annotations


class GlrmcError(Exception):
    """Base class for all package-specific errors."""


class PatternError(GlrmcError, ValueError):
    """Malformed pattern text."""


class RaggedRowsError(PatternError):
    """Data lines of unequal length."""


class IllegalCharacterError(PatternError):
    """Character outside {0, *, ?} in pattern text.

    ``row`` and ``col`` are 1-based positions among the data characters.
    """

    def __init__(self, char: str, row: int, col: int):
        super().__init__(f"illegal character {char!r} at row {row}, col {col}")
        self.char = char
        self.row = row
        self.col = col


class EmptyPatternError(PatternError):
    """No data lines in pattern text."""


class IndexOutOfRangeError(GlrmcError, IndexError):
    """A 1-based row/column index falls outside the pattern."""


class InvalidKError(GlrmcError, ValueError):
    """Rank-drop parameter k outside the legal range 1..n."""


class QueryEntryPresentError(GlrmcError, ValueError):
    """Generic-rank query over a region that still contains ? entries.

    Raised unless the caller explicitly opts in to counting ? as *.
    """


class WrongBasisSizeError(GlrmcError, ValueError):
    """Candidate basis has the wrong number of columns."""


class NotAPreservableBasisError(GlrmcError, ValueError):
    """Column set fails the preservable-basis rank requirement."""


class PreconditionViolatedError(GlrmcError, ValueError):
    """Input violates a documented operation precondition."""


class PrimeTooSmallError(GlrmcError, ValueError):
    """Field modulus too small for the requested pattern size."""


class BudgetExceededError(GlrmcError, RuntimeError):
    """Combinatorial search size exceeds the configured budget.

    ``n_subsets`` is the offending number of column subsets.
    """

    def __init__(self, n_subsets: int, budget: int):
        super().__init__(
            f"search over {n_subsets} column subsets exceeds budget {budget}"
        )
        self.n_subsets = n_subsets
        self.budget = budget
