"""Upper and lower bounds on the generic minimum completion rank.

Both bounds binary-search the candidate rank r in [0, grank(?->0)]:

* upper: r is reachable when the one-sided sufficiency test certifies a
  rank <= r completion (or the rank bound is trivial), so the smallest
  certified r is a valid upper bound;
* lower: r is refuted when the necessary condition fails exhaustively on
  some row subset, so the smallest non-refuted r is a valid lower bound.

The search keeps the classic loop shape (r_high >= r_low, floor midpoint,
return r_high + 1) on purpose.  Because the sufficiency test is not known
to be monotone in r, the returned value is afterwards confirmed by
re-verifying the recorded evidence at the boundary deterministically; a
failed confirmation (which would indicate an implementation fault) widens
the bound by linear scan rather than returning an unproven value.

Randomized budgets can only loosen the bracket, never invalidate it:
refutations rest on exhaustive sub-searches and certificates are
re-verified, so lower <= upper holds whenever both complete.  The
``bracket_inverted`` flag is still computed defensively.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionViolatedError
from .feasibility import (
    BasisSampler,
    BasisWitness,
    Counterexample,
    FeasibilityVerdict,
    Status,
    child_seed,
    column_overlap_condition,
    glrmc_k1,
    glrmc_k_necessary,
    glrmc_k_sufficient,
    is_preservable_basis,
)
from .matching import generic_rank
from .pattern import PatternMatrix, assumption1_holds, bar_pattern, with_basis_columns


@dataclass(frozen=True)
class TraceStep:
    """One binary-search probe: which rank was tested and what came back."""

    r_mid: int
    k: int
    condition: str  # "sufficient" | "necessary" | "trivial"
    status: str
    passed: bool
    trials_used: int
    complete: bool
    detail: str = ""


@dataclass(frozen=True)
class BoundResult:
    value: int
    trace: tuple[TraceStep, ...]
    confirmed: bool
    repaired: bool
    mode: str
    seed: int
    budgets: tuple[tuple[str, int], ...]
    witness: BasisWitness | None = None
    counterexample: Counterexample | None = None


@dataclass(frozen=True)
class RankBounds:
    lower: BoundResult
    upper: BoundResult
    grank_bar: int
    bracket_inverted: bool


def _require_wide(pattern: PatternMatrix) -> None:
    n, m = pattern.shape
    if m < n:
        raise PreconditionViolatedError(
            f"bounds need m >= n; pattern is {n}x{m} (transpose first)"
        )


def _binary_search(g: int, probe) -> tuple[int, list[TraceStep], dict[int, FeasibilityVerdict]]:
    """The fixed loop: floor midpoints, feasible side moves r_high down."""
    r_low, r_high = 0, g
    trace: list[TraceStep] = []
    verdicts: dict[int, FeasibilityVerdict] = {}
    step = 0
    while r_high >= r_low:
        r_mid = (r_high + r_low) // 2
        passed, trace_step, verdict = probe(r_mid, step)
        trace.append(trace_step)
        if verdict is not None:
            verdicts[r_mid] = verdict
        if passed:
            r_high = r_mid - 1
        else:
            r_low = r_mid + 1
        step += 1
    return r_high + 1, trace, verdicts


def verify_sufficient_witness(pattern: PatternMatrix, k: int, witness: BasisWitness) -> bool:
    """Deterministically re-check a sufficiency certificate."""
    if not is_preservable_basis(pattern, witness.basis, k):
        return False
    promoted = with_basis_columns(pattern, witness.basis)
    in_basis = set(witness.basis)
    return all(
        column_overlap_condition(promoted, witness.basis, i).holds
        for i in range(1, pattern.n_cols + 1)
        if i not in in_basis
    )


def verify_infeasible_rows(pattern: PatternMatrix, rows) -> bool:
    """Deterministically re-check a necessary-condition counterexample."""
    sub = pattern.submatrix(rows=rows)
    return glrmc_k1(sub, BasisSampler(mode="exhaustive")).status is Status.INFEASIBLE


def upper_bound(
    pattern: PatternMatrix,
    budget: int = 50,
    seed: int = 0,
    mode: str = "randomized",
    exhaustive_fallback: bool = True,
) -> BoundResult:
    """Upper bound via the sufficiency test; always witness-backed.

    ``budget`` caps the basis draws per probe in randomized mode.
    """
    _require_wide(pattern)
    n, _ = pattern.shape
    g = generic_rank(bar_pattern(pattern))

    def probe(r_mid: int, step: int):
        k = n - r_mid
        if k <= 0:
            ts = TraceStep(r_mid, k, "trivial", "feasible", True, 0, True,
                           "rank bound >= n always satisfiable")
            return True, ts, None
        sampler = _make_sampler(mode, budget, child_seed(seed, step), exhaustive_fallback)
        v = glrmc_k_sufficient(pattern, k, sampler)
        passed = v.status in (Status.SUFFICIENT_HOLDS, Status.FEASIBLE)
        detail = f"basis {v.witness.basis}" if v.witness else ""
        ts = TraceStep(r_mid, k, "sufficient", v.status.value, passed,
                       v.trials_used, v.complete, detail)
        return passed, ts, v

    value, trace, verdicts = _binary_search(g, probe)
    value, confirmed, repaired, witness = _confirm_upper(
        pattern, n, g, value, verdicts, budget, seed, mode, exhaustive_fallback
    )
    return BoundResult(
        value=value,
        trace=tuple(trace),
        confirmed=confirmed,
        repaired=repaired,
        mode=mode,
        seed=seed,
        budgets=(("basis_draws", budget),),
        witness=witness,
    )


def _confirm_upper(pattern, n, g, value, verdicts, budget, seed, mode, fallback):
    """Re-verify the boundary certificate; widen on (unexpected) failure.

    Returns (value, confirmed, repaired, witness).
    """
    repaired = False
    while True:
        k = n - value
        witness = None
        if k <= 0:
            return value, True, repaired, None
        v = verdicts.get(value)
        if v is None:
            # No recorded probe at this rank (only possible mid-repair):
            # evaluate afresh.
            sampler = _make_sampler(mode, budget, child_seed(seed, 9000 + value), fallback)
            v = glrmc_k_sufficient(pattern, k, sampler)
        ok = False
        if v.status is Status.FEASIBLE:
            # Trivial case: the zero-fill completion already meets the bound.
            ok = not assumption1_holds(pattern, k)[0]
        elif v.status is Status.SUFFICIENT_HOLDS and v.witness is not None:
            ok = verify_sufficient_witness(pattern, k, v.witness)
            witness = v.witness if ok else None
        if ok:
            return value, True, repaired, witness
        if value >= g:
            # grank(?->0) is always a valid upper bound (fill ? with zero).
            return g, True, repaired, None
        value += 1
        repaired = True


def lower_bound(
    pattern: PatternMatrix,
    budget_rows: int = 110,
    budget_inner: int = 30,
    seed: int = 0,
    mode: str = "randomized",
    exhaustive_fallback: bool = True,
    inner_exhaustive_budget: int = 10_000,
) -> BoundResult:
    """Lower bound via the necessary condition; refutations are exact.

    ``budget_rows`` caps row-subset draws and ``budget_inner`` the basis
    draws of each inner rank-drop-one test.
    """
    _require_wide(pattern)
    n, _ = pattern.shape
    g = generic_rank(bar_pattern(pattern))

    def probe(r_mid: int, step: int):
        k = n - r_mid
        if k <= 0:
            ts = TraceStep(r_mid, k, "trivial", "feasible", True, 0, True,
                           "rank bound >= n always satisfiable")
            return True, ts, None
        row_sampler = _make_sampler(mode, budget_rows, child_seed(seed, 1000 + step),
                                    exhaustive_fallback)
        inner = _make_sampler(mode, budget_inner, child_seed(seed, 2000 + step),
                              exhaustive_fallback)
        v = glrmc_k_necessary(pattern, k, row_sampler, inner,
                              inner_exhaustive_budget=inner_exhaustive_budget)
        passed = v.status is not Status.NECESSARY_FAILS
        detail = f"rows {v.counterexample.rows}" if v.counterexample else ""
        ts = TraceStep(r_mid, k, "necessary", v.status.value, passed,
                       v.trials_used, v.complete, detail)
        return passed, ts, v

    value, trace, verdicts = _binary_search(g, probe)
    confirmed = False
    repaired = False
    counterexample = None
    while value > 0:
        v = verdicts.get(value - 1)
        if (
            v is not None
            and v.status is Status.NECESSARY_FAILS
            and v.counterexample is not None
            and verify_infeasible_rows(pattern, v.counterexample.rows)
        ):
            confirmed = True
            counterexample = v.counterexample
            break
        value -= 1
        repaired = True
    if value == 0:
        confirmed = True
    return BoundResult(
        value=value,
        trace=tuple(trace),
        confirmed=confirmed,
        repaired=repaired,
        mode=mode,
        seed=seed,
        budgets=(("row_draws", budget_rows), ("inner_basis_draws", budget_inner)),
        counterexample=counterexample,
    )


def _make_sampler(mode: str, limit: int, seed: int, fallback: bool) -> BasisSampler:
    if mode == "exhaustive":
        return BasisSampler(mode="exhaustive", seed=seed)
    return BasisSampler(mode="randomized", limit=limit, seed=seed,
                        exhaustive_fallback=fallback)


def rank_bounds(
    pattern: PatternMatrix,
    budget_upper: int = 50,
    budget_rows: int = 110,
    budget_inner: int = 30,
    seed: int = 0,
    mode: str = "randomized",
    exhaustive_fallback: bool = True,
) -> RankBounds:
    """Both bounds with independent derived seeds; flags an inverted bracket."""
    _require_wide(pattern)
    upper = upper_bound(pattern, budget_upper, child_seed(seed, 1), mode,
                        exhaustive_fallback)
    lower = lower_bound(pattern, budget_rows, budget_inner, child_seed(seed, 2),
                        mode, exhaustive_fallback)
    return RankBounds(
        lower=lower,
        upper=upper,
        grank_bar=generic_rank(bar_pattern(pattern)),
        bracket_inverted=lower.value > upper.value,
    )
