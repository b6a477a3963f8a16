"""Feasibility tests for generic low-rank completion of a pattern.

GLRMC(M, k) asks whether, for almost all values of the * entries, the ?
entries can be filled so the completed n x m matrix has rank <= n-k.

The k = 1 case is decided exactly: a completion of rank n-1 exists iff
some preservable basis (n-1 columns whose ?->* relaxation has full
generic rank) passes a per-column condition on the remaining columns.
That condition is implemented twice on purpose: once through row-deleted
matching queries (the production path) and once by enumerating row
subsets (an independent cross-check).

For general k the module offers a proven sufficient condition (per-column
overlap test on a promoted k-order preservable basis) and a proven
necessary condition (every (n-k+1)-row subpattern must admit a rank-drop
of one).  Randomized searches are one-sided: they may certify success but
never claim infeasibility; only exhausted enumerations do.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from math import comb
from typing import Iterator

import numpy as np

from .errors import (
    InvalidKError,
    NotAPreservableBasisError,
    PreconditionViolatedError,
    WrongBasisSizeError,
)
from .matching import generic_rank, row_deleted_granks
from .pattern import (
    QUERY,
    IndexSet,
    PatternMatrix,
    as_index_set,
    assumption1_holds,
    with_basis_columns,
)


class Status(str, Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    SUFFICIENT_HOLDS = "sufficient-holds"
    NECESSARY_FAILS = "necessary-fails"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ColumnEvidence:
    """Why one non-basis column is compatible with the candidate basis.

    kind "cond1": no * entry of the column sits in a droppable row.
    kind "cond2": ``row`` is a ? entry of the column in a droppable row.
    kind "overlap": the ? rows alone realize the maximal droppable-row
    overlap ``rho``.
    """

    column: int
    kind: str
    row: int | None = None
    rho: int | None = None


@dataclass(frozen=True)
class BasisWitness:
    """A passing basis with per-column evidence.

    ``form`` is "direct" when the basis columns carried no ? entries in
    the original pattern (no promotion was needed), else "promoted".
    """

    basis: IndexSet
    columns: tuple[ColumnEvidence, ...]
    form: str = "promoted"


@dataclass(frozen=True)
class Counterexample:
    """What broke: a violating column, or a row subset with no rank drop."""

    column: int | None = None
    rows: IndexSet | None = None


@dataclass(frozen=True)
class FeasibilityVerdict:
    status: Status
    witness: BasisWitness | None = None
    counterexample: Counterexample | None = None
    trials_used: int = 0
    rng_seed: int = 0
    mode: str = "exhaustive"
    complete: bool = False  # verdict rests on a fully enumerated search
    note: str = ""


@dataclass(frozen=True)
class ColumnConditionReport:
    ok: bool
    evidence: tuple[ColumnEvidence, ...] | None
    violating_column: int | None


@dataclass(frozen=True)
class OverlapCheck:
    """Outcome of the per-column overlap test for general k.

    ``overlap`` is the generic rank the column's nonzero rows span against
    the left null space of the basis block; ``holds`` says whether the ?
    rows alone reach it (so the column can always be zeroed against that
    null space).
    """

    holds: bool
    overlap: int


@dataclass(frozen=True)
class BasisSampler:
    """Source of candidate index subsets.

    Exhaustive mode enumerates every subset once in lexicographic order.
    Randomized mode draws uniform subsets independently and yields up to
    ``limit`` of them; when the subset space is small (no more than ten
    times the budget) repeated draws are skipped without consuming budget,
    so the budget buys distinct candidates and a space smaller than the
    budget gets covered outright, in random order.  With
    ``exhaustive_fallback`` the sampler instead switches to full
    lexicographic enumeration whenever the space fits inside the budget.
    """

    mode: str = "exhaustive"
    limit: int | None = None
    seed: int = 0
    exhaustive_fallback: bool = False

    def __post_init__(self):
        if self.mode not in ("exhaustive", "randomized"):
            raise ValueError(f"unknown sampler mode {self.mode!r}")
        if self.mode == "randomized" and (self.limit is None or self.limit < 1):
            raise ValueError("randomized sampler needs limit >= 1")

    def effective_mode(self, universe: int, size: int) -> str:
        if self.mode == "exhaustive":
            return "exhaustive"
        if self.exhaustive_fallback and comb(universe, size) <= self.limit:
            return "exhaustive"
        return "randomized"

    def subsets(self, universe: int, size: int) -> Iterator[IndexSet]:
        """Yield 1-based subsets of {1..universe} of the given size."""
        if size < 0 or size > universe:
            return
        if self.effective_mode(universe, size) == "exhaustive":
            yield from itertools.combinations(range(1, universe + 1), size)
            return
        rng = np.random.default_rng(self.seed)
        total = comb(universe, size)
        if total <= 10 * self.limit:
            target = min(self.limit, total)
            seen: set[IndexSet] = set()
            attempts = 0
            while len(seen) < target and attempts < 50 * self.limit + 10 * total:
                attempts += 1
                draw = rng.choice(universe, size=size, replace=False)
                subset = tuple(sorted(int(v) + 1 for v in draw))
                if subset in seen:
                    continue
                seen.add(subset)
                yield subset
            return
        for _ in range(self.limit):
            draw = rng.choice(universe, size=size, replace=False)
            yield tuple(sorted(int(v) + 1 for v in draw))


def child_seed(seed: int, index: int) -> int:
    """Deterministic per-subtask seed derivation."""
    return int(np.random.SeedSequence((seed, index)).generate_state(1)[0])


# ---------------------------------------------------------------------------
# Bases and the k = 1 column conditions
# ---------------------------------------------------------------------------


def is_preservable_basis(pattern: PatternMatrix, basis, k: int) -> bool:
    """Whether ``basis`` (n-k columns) keeps full generic rank after ?->*."""
    n, m = pattern.shape
    if not 1 <= k <= n:
        raise InvalidKError(f"k={k} outside 1..{n}")
    cols = as_index_set(basis, m, "col")
    if len(cols) != n - k:
        raise WrongBasisSizeError(
            f"basis has {len(cols)} columns, expected n-k = {n - k}"
        )
    return generic_rank(pattern, cols=cols, treat_query_as_star=True) == n - k


def _droppable_rows_matching(promoted: PatternMatrix, basis: IndexSet) -> np.ndarray:
    """Boolean mask over rows j: basis-block rank survives deleting row j.

    One maximum matching plus one alternating-path probe per row.
    """
    base, deleted = row_deleted_granks(promoted, basis)
    return deleted == base


def _droppable_rows_enumerated(promoted: PatternMatrix, basis: IndexSet) -> set[int]:
    """Same row set, computed independently by enumerating row subsets."""
    n = promoted.n_rows
    target = len(basis)
    droppable: set[int] = set()
    for kept in itertools.combinations(range(1, n + 1), n - 1):
        if generic_rank(promoted, rows=kept, cols=basis) == target:
            (j,) = set(range(1, n + 1)) - set(kept)
            droppable.add(j)
    return droppable


def _k1_validate(pattern: PatternMatrix, basis) -> IndexSet:
    n, m = pattern.shape
    cols = as_index_set(basis, m, "col")
    if len(cols) != n - 1:
        raise WrongBasisSizeError(f"basis has {len(cols)} columns, expected {n - 1}")
    if not is_preservable_basis(pattern, cols, 1):
        raise NotAPreservableBasisError(
            f"columns {cols} do not reach generic rank {n - 1} after ?->*"
        )
    return cols


def k1_conditions_hold(pattern: PatternMatrix, basis) -> ColumnConditionReport:
    """Per-column conditions for rank n-1, via row-deleted matching queries.

    With the basis columns promoted (? -> *), a non-basis column i is
    compatible iff either no * entry of column i lies in a droppable row
    (cond1), or some ? entry of column i does (cond2, with the smallest
    such row reported as certificate).  Returns evidence for every column
    or the first violating column in ascending order.
    """
    cols = _k1_validate(pattern, basis)
    promoted = with_basis_columns(pattern, cols)
    droppable = _droppable_rows_matching(promoted, cols)
    evidence: list[ColumnEvidence] = []
    in_basis = set(cols)
    for i in range(1, pattern.n_cols + 1):
        if i in in_basis:
            continue
        stars = pattern.star_rows(i)
        if all(not droppable[j - 1] for j in stars):
            evidence.append(ColumnEvidence(column=i, kind="cond1"))
            continue
        cert = next((j for j in pattern.query_rows(i) if droppable[j - 1]), None)
        if cert is None:
            return ColumnConditionReport(False, None, i)
        evidence.append(ColumnEvidence(column=i, kind="cond2", row=cert))
    return ColumnConditionReport(True, tuple(evidence), None)


def k1_conditions_hold_enumerated(pattern: PatternMatrix, basis) -> ColumnConditionReport:
    """Independent cross-check of :func:`k1_conditions_hold`.

    Materializes the droppable row set by enumerating all (n-1)-row
    subsets with a fresh matching each, then applies the conditions as
    plain set intersections.
    """
    cols = _k1_validate(pattern, basis)
    promoted = with_basis_columns(pattern, cols)
    droppable = _droppable_rows_enumerated(promoted, cols)
    evidence: list[ColumnEvidence] = []
    in_basis = set(cols)
    for i in range(1, pattern.n_cols + 1):
        if i in in_basis:
            continue
        stars = set(pattern.star_rows(i))
        queries = set(pattern.query_rows(i))
        if not (droppable & stars):
            evidence.append(ColumnEvidence(column=i, kind="cond1"))
            continue
        hits = droppable & queries
        if not hits:
            return ColumnConditionReport(False, None, i)
        evidence.append(ColumnEvidence(column=i, kind="cond2", row=min(hits)))
    return ColumnConditionReport(True, tuple(evidence), None)


# ---------------------------------------------------------------------------
# GLRMC(M, 1)
# ---------------------------------------------------------------------------


def glrmc_k1(pattern: PatternMatrix, sampler: BasisSampler = BasisSampler()) -> FeasibilityVerdict:
    """Decide GLRMC(M, 1).

    Exhaustive mode is exact: FEASIBLE with a witness basis, else
    INFEASIBLE.  Randomized mode is one-sided: FEASIBLE witnesses are
    re-verified deterministically; an exhausted budget yields UNKNOWN,
    never INFEASIBLE.
    """
    n, m = pattern.shape
    holds, diag = assumption1_holds(pattern, 1)
    if not holds:
        return FeasibilityVerdict(
            Status.FEASIBLE,
            rng_seed=sampler.seed,
            mode=sampler.mode,
            complete=True,
            note=f"trivially feasible: {diag}",
        )
    size = n - 1
    exhausted_is_exact = sampler.effective_mode(m, size) == "exhaustive"
    trials = 0
    for basis in sampler.subsets(m, size):
        trials += 1
        if not is_preservable_basis(pattern, basis, 1):
            continue
        report = k1_conditions_hold(pattern, basis)
        if not report.ok:
            continue
        check = k1_conditions_hold_enumerated(pattern, basis)
        if not check.ok:
            raise RuntimeError(
                "internal disagreement between matching-form and enumerated-form "
                f"column conditions for basis {basis}"
            )
        form = "direct" if not _basis_has_query(pattern, basis) else "promoted"
        return FeasibilityVerdict(
            Status.FEASIBLE,
            witness=BasisWitness(basis, report.evidence, form),
            trials_used=trials,
            rng_seed=sampler.seed,
            mode=sampler.mode,
            complete=True,
        )
    if exhausted_is_exact:
        return FeasibilityVerdict(
            Status.INFEASIBLE,
            trials_used=trials,
            rng_seed=sampler.seed,
            mode=sampler.mode,
            complete=True,
            note="no preservable basis satisfies the column conditions",
        )
    return FeasibilityVerdict(
        Status.UNKNOWN,
        trials_used=trials,
        rng_seed=sampler.seed,
        mode=sampler.mode,
        note="sampling budget exhausted without a witness",
    )


def _basis_has_query(pattern: PatternMatrix, basis: IndexSet) -> bool:
    return any(pattern.query_rows(c) for c in basis)


# ---------------------------------------------------------------------------
# General k: sufficient condition
# ---------------------------------------------------------------------------


def column_overlap_condition(pattern: PatternMatrix, basis, col: int) -> OverlapCheck:
    """Overlap test for one non-basis column against a ?-free basis block.

    Requires pattern[:, basis] to be ?-free with full generic column rank.
    Let Q be the ? rows and N all nonzero rows of the column.  The test
    holds iff |Q| + grank(block without rows Q) equals |N| + grank(block
    without rows N); the reported overlap is that right-hand side minus
    the full block rank (a matroid-dual rank identity, so no row-set
    enumeration is needed).
    """
    n, m = pattern.shape
    cols = as_index_set(basis, m, "col")
    pattern._check_col(col)
    if col in cols:
        raise PreconditionViolatedError(f"column {col} belongs to the basis")
    if _basis_has_query(pattern, cols):
        raise PreconditionViolatedError("basis columns must be free of ? entries")
    g_full = generic_rank(pattern, cols=cols)
    if g_full != len(cols):
        raise PreconditionViolatedError(
            f"basis block generic rank {g_full} != |basis| = {len(cols)}"
        )
    q_rows = set(pattern.query_rows(col))
    nz_rows = q_rows | set(pattern.star_rows(col))
    all_rows = set(range(1, n + 1))
    g_wo_q = generic_rank(pattern, rows=sorted(all_rows - q_rows), cols=cols)
    g_wo_nz = generic_rank(pattern, rows=sorted(all_rows - nz_rows), cols=cols)
    lhs = len(q_rows) + g_wo_q
    rhs = len(nz_rows) + g_wo_nz
    return OverlapCheck(holds=(lhs == rhs), overlap=rhs - g_full)


def glrmc_k_sufficient(
    pattern: PatternMatrix, k: int, sampler: BasisSampler = BasisSampler()
) -> FeasibilityVerdict:
    """One-sided sufficiency test for GLRMC(M, k).

    Searches k-order preservable bases; if after promoting a basis every
    non-basis column passes the overlap test, GLRMC(M, k) is feasible
    (SUFFICIENT_HOLDS with witness).  Exhausting the search proves nothing
    about infeasibility, so the fallthrough verdict is always UNKNOWN.
    """
    n, m = pattern.shape
    if not 1 <= k <= n:
        raise InvalidKError(f"k={k} outside 1..{n}")
    holds, diag = assumption1_holds(pattern, k)
    if not holds:
        return FeasibilityVerdict(
            Status.FEASIBLE,
            rng_seed=sampler.seed,
            mode=sampler.mode,
            complete=True,
            note=f"trivially feasible: {diag}",
        )
    size = n - k
    exhausted_all = sampler.effective_mode(m, size) == "exhaustive"
    trials = 0
    for basis in sampler.subsets(m, size):
        trials += 1
        if not is_preservable_basis(pattern, basis, k):
            continue
        promoted = with_basis_columns(pattern, basis)
        evidence: list[ColumnEvidence] = []
        ok = True
        for i in range(1, m + 1):
            if i in basis:
                continue
            chk = column_overlap_condition(promoted, basis, i)
            if not chk.holds:
                ok = False
                break
            evidence.append(ColumnEvidence(column=i, kind="overlap", rho=chk.overlap))
        if ok:
            form = "direct" if not _basis_has_query(pattern, basis) else "promoted"
            return FeasibilityVerdict(
                Status.SUFFICIENT_HOLDS,
                witness=BasisWitness(basis, tuple(evidence), form),
                trials_used=trials,
                rng_seed=sampler.seed,
                mode=sampler.mode,
                complete=True,
            )
    return FeasibilityVerdict(
        Status.UNKNOWN,
        trials_used=trials,
        rng_seed=sampler.seed,
        mode=sampler.mode,
        complete=exhausted_all,
        note=(
            "sufficient condition fails for every k-order preservable basis"
            if exhausted_all
            else "sufficient condition not established within budget"
        ),
    )


# ---------------------------------------------------------------------------
# General k: necessary condition
# ---------------------------------------------------------------------------


def glrmc_k_necessary(
    pattern: PatternMatrix,
    k: int,
    row_sampler: BasisSampler = BasisSampler(),
    inner: BasisSampler = BasisSampler(),
    inner_exhaustive_budget: int = 10_000,
) -> FeasibilityVerdict:
    """Necessary-condition test: every (n-k+1)-row subpattern must allow k=1.

    Returns NECESSARY_FAILS with the violating row subset whenever some
    subpattern is exactly (exhaustively) infeasible at rank drop one; such
    a verdict proves GLRMC(M, k) infeasible.  Otherwise UNKNOWN, with
    ``complete`` set when the row subsets were enumerated exhaustively and
    every inner test was decided (the necessary condition then provably
    holds).

    Inner k=1 runs are forced exhaustive while the basis space stays
    under ``inner_exhaustive_budget`` subsets; a randomized inner UNKNOWN
    never produces NECESSARY_FAILS.
    """
    n, m = pattern.shape
    if not 1 <= k <= n:
        raise InvalidKError(f"k={k} outside 1..{n}")
    holds, diag = assumption1_holds(pattern, k)
    if not holds:
        return FeasibilityVerdict(
            Status.FEASIBLE,
            rng_seed=row_sampler.seed,
            mode=row_sampler.mode,
            complete=True,
            note=f"trivially feasible: {diag}",
        )
    size = n - k + 1
    outer_exhaustive = row_sampler.effective_mode(n, size) == "exhaustive"
    all_decided = True
    trials = 0
    for idx, rows in enumerate(row_sampler.subsets(n, size)):
        trials += 1
        sub = pattern.submatrix(rows=rows)
        if inner.mode == "exhaustive" or comb(m, size - 1) <= inner_exhaustive_budget:
            inner_sampler = BasisSampler(mode="exhaustive")
        else:
            inner_sampler = BasisSampler(
                mode="randomized",
                limit=inner.limit,
                seed=child_seed(inner.seed, idx),
                exhaustive_fallback=inner.exhaustive_fallback,
            )
        verdict = glrmc_k1(sub, inner_sampler)
        if verdict.status is Status.INFEASIBLE:
            return FeasibilityVerdict(
                Status.NECESSARY_FAILS,
                counterexample=Counterexample(rows=rows),
                trials_used=trials,
                rng_seed=row_sampler.seed,
                mode=row_sampler.mode,
                complete=True,
                note=(
                    f"rows {rows} admit no completion of rank {size - 1} "
                    "(exhaustive sub-test)"
                ),
            )
        if verdict.status is Status.UNKNOWN:
            all_decided = False
    complete = outer_exhaustive and all_decided
    return FeasibilityVerdict(
        Status.UNKNOWN,
        trials_used=trials,
        rng_seed=row_sampler.seed,
        mode=row_sampler.mode,
        complete=complete,
        note=(
            "necessary condition holds on every row subset"
            if complete
            else "necessary condition holds on all tested row subsets"
        ),
    )
