"""Feasibility engine for generic low-rank completion of {0,*,?} patterns.

Given only the pattern of observed (fixed-zero / unknown-generic) and
missing entries of an n x m matrix, decide whether a completion of rank
<= n-k exists for almost all values of the observed entries, and bracket
the generic minimum completion rank.  An exact finite-field oracle
provides independent numerical verification.
"""

from ._kernels import BACKEND, NUMBA_ENABLED
from .bounds import BoundResult, RankBounds, lower_bound, rank_bounds, upper_bound
from .errors import (
    BudgetExceededError,
    EmptyPatternError,
    GlrmcError,
    IllegalCharacterError,
    IndexOutOfRangeError,
    InvalidKError,
    NotAPreservableBasisError,
    PatternError,
    PreconditionViolatedError,
    PrimeTooSmallError,
    QueryEntryPresentError,
    RaggedRowsError,
    WrongBasisSizeError,
)
from .feasibility import (
    BasisSampler,
    BasisWitness,
    ColumnEvidence,
    Counterexample,
    FeasibilityVerdict,
    Status,
    column_overlap_condition,
    glrmc_k1,
    glrmc_k_necessary,
    glrmc_k_sufficient,
    is_preservable_basis,
    k1_conditions_hold,
    k1_conditions_hold_enumerated,
)
from .matching import (
    MatchingResult,
    PatternBipartiteGraph,
    build_graph,
    generic_rank,
    max_matching,
    row_deleted_granks,
)
from .oracle import (
    Completion,
    FieldMatrix,
    OracleVerdict,
    Realization,
    field_rank,
    left_null_space,
    oracle_feasible,
    oracle_min_rank,
    sample_realization,
)
from .pattern import (
    QUERY,
    STAR,
    ZERO,
    EntryKind,
    PatternMatrix,
    assumption1_holds,
    bar_pattern,
    hat_pattern,
    parse_pattern,
    serialize,
    transpose,
    with_basis_columns,
)

__version__ = "0.1.0"
