"""Command-line front end: ``glrmc check|bounds|oracle|experiment``.

Exit codes: 0 when a verdict was decided (or bounds/experiment ran),
2 when the outcome is Unknown, 1 on usage or runtime errors.

Reports are deterministic under a fixed ``--seed``: the JSON and CSV
emitted by two consecutive identical invocations compare byte-equal.
Wall-clock timings are therefore only included when ``--timing`` is
passed (the ``timing_ms`` field / ``ms`` column stay empty otherwise).
"""

from __future__ import annotations

import argparse
import csv
import json
import secrets
import sys
import time
from dataclasses import asdict

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .bounds import (
    BoundResult,
    RankBounds,
    rank_bounds,
    verify_infeasible_rows,
    verify_sufficient_witness,
)
from .errors import GlrmcError
from .feasibility import (
    BasisSampler,
    BasisWitness,
    FeasibilityVerdict,
    Status,
    child_seed,
    glrmc_k1,
    glrmc_k_necessary,
    glrmc_k_sufficient,
    k1_conditions_hold,
    k1_conditions_hold_enumerated,
)
from .matching import generic_rank
from .oracle import (
    DEFAULT_BUDGET,
    DEFAULT_PRIME,
    DEFAULT_TRIALS,
    OracleVerdict,
    oracle_feasible,
    oracle_min_rank,
)
from .pattern import PatternMatrix, bar_pattern, parse_pattern, serialize, transpose

# Default sampling budgets for the randomized algorithms.
DEFAULT_TM = 30  # basis draws per rank-drop-one test
DEFAULT_TBAR = 110  # row-subset draws for the necessary condition
DEFAULT_THAT = 50  # basis draws for the sufficient condition

CSV_HEADER = "density,pattern_id,n,m,grank_bar,lower,upper,oracle_rank,ms"


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def _parse_seed(text: str) -> int:
    if text == "random":
        return secrets.randbits(63)
    return int(text)


def _add_common(p: _Parser) -> None:
    p.add_argument("--seed", type=_parse_seed, default=0,
                   help="RNG seed (integer, or 'random'); default 0")
    p.add_argument("--mode", choices=("exhaustive", "randomized"),
                   default="randomized", help="search mode (default randomized)")
    p.add_argument("--format", choices=("text", "json"), default="text",
                   help="report format")
    p.add_argument("--transpose", action="store_true",
                   help="transpose the pattern before analysis (for m < n inputs)")
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock timing (breaks byte-determinism)")
    p.add_argument("--tm", type=int, default=DEFAULT_TM,
                   help=f"basis draws per rank-drop-one test (default {DEFAULT_TM})")
    p.add_argument("--tbar", type=int, default=DEFAULT_TBAR,
                   help=f"row-subset draws, necessary condition (default {DEFAULT_TBAR})")
    p.add_argument("--that", type=int, default=DEFAULT_THAT,
                   help=f"basis draws, sufficient condition (default {DEFAULT_THAT})")
    p.add_argument("--prime", type=int, default=DEFAULT_PRIME,
                   help=f"field modulus for oracle work (default {DEFAULT_PRIME})")
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS,
                   help=f"oracle trials requiring agreement (default {DEFAULT_TRIALS})")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help=f"max column subsets per oracle search (default {DEFAULT_BUDGET})")


def build_parser() -> _Parser:
    parser = _Parser(prog="glrmc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"glrmc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_check = sub.add_parser("check",
                             help="decide feasibility of a rank <= n-k completion")
    p_check.add_argument("pattern", nargs="?", help="pattern file ({0,*,?} rows)")
    p_check.add_argument("--k", type=int, default=1, help="rank drop (default 1)")
    p_check.add_argument("--verify-witness", metavar="REPORT",
                         help="re-verify the witness of a previous JSON report")
    _add_common(p_check)
    p_check.set_defaults(func=cmd_check)

    p_bounds = sub.add_parser("bounds",
                              help="bracket the generic minimum completion rank")
    p_bounds.add_argument("pattern", help="pattern file")
    _add_common(p_bounds)
    p_bounds.set_defaults(func=cmd_bounds)

    p_oracle = sub.add_parser("oracle",
                              help="finite-field numerical verification")
    p_oracle.add_argument("pattern", help="pattern file")
    p_oracle.add_argument("--k", type=int, default=None,
                          help="rank drop to test; omit to scan for the minimum rank")
    _add_common(p_oracle)
    p_oracle.set_defaults(func=cmd_oracle)

    p_exp = sub.add_parser("experiment",
                           help="random-pattern density sweep (CSV to stdout)")
    p_exp.add_argument("--n", type=int, required=True)
    p_exp.add_argument("--m", type=int, required=True)
    p_exp.add_argument("--densities", default="0.1,0.3,0.5,0.7,0.9",
                       help="comma-separated * densities")
    p_exp.add_argument("--per-cell", type=int, default=20,
                       help="patterns per density cell (default 20)")
    p_exp.add_argument("--zero-fraction", type=float, default=0.0,
                       help="fraction of all entries made fixed zeros (default 0)")
    _add_common(p_exp)
    p_exp.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GlrmcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


# ---------------------------------------------------------------------------
# Shared plumbing
# ---------------------------------------------------------------------------


def _load_pattern(args) -> PatternMatrix:
    with open(args.pattern, "r", encoding="utf-8") as fh:
        pat = parse_pattern(fh.read())
    if args.transpose:
        pat = transpose(pat)
    return pat


def _config_dict(args, pattern: PatternMatrix, extra: dict | None = None) -> dict:
    cfg = {
        "command": args.command,
        "pattern_path": getattr(args, "pattern", None),
        "pattern": serialize(pattern),
        "n": pattern.n_rows,
        "m": pattern.n_cols,
        "transposed": bool(args.transpose),
        "mode": args.mode,
        "seed": args.seed,
        "budgets": {"tm": args.tm, "tbar": args.tbar, "that": args.that},
        "prime": args.prime,
        "trials": args.trials,
        "budget": args.budget,
        "backend": BACKEND,
    }
    if extra:
        cfg.update(extra)
    return cfg


def _witness_dict(witness: BasisWitness | None) -> dict | None:
    if witness is None:
        return None
    return {
        "type": "basis",
        "basis": list(witness.basis),
        "form": witness.form,
        "columns": [
            {k: v for k, v in asdict(ev).items() if v is not None}
            for ev in witness.columns
        ],
    }


def _verdict_dict(v: FeasibilityVerdict) -> dict:
    return {
        "status": v.status.value,
        "trials_used": v.trials_used,
        "complete": v.complete,
        "mode": v.mode,
        "rng_seed": v.rng_seed,
        "note": v.note,
    }


def _emit(report: dict, args, text_lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(report, indent=2))
    else:
        for line in text_lines:
            print(line)


def _timing(report: dict, started: float, args) -> None:
    report["timing_ms"] = round((time.perf_counter() - started) * 1000.0, 3) \
        if args.timing else None


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    if args.verify_witness:
        return _verify_witness(args.verify_witness)
    if not args.pattern:
        print("error: a pattern file is required", file=sys.stderr)
        return 1
    started = time.perf_counter()
    pat = _load_pattern(args)
    n = pat.n_rows
    if not 1 <= args.k <= n:
        print(f"error: k={args.k} outside 1..{n}", file=sys.stderr)
        return 1

    def sampler(limit: int, salt: int) -> BasisSampler:
        if args.mode == "exhaustive":
            return BasisSampler(mode="exhaustive")
        return BasisSampler(mode="randomized", limit=limit,
                            seed=child_seed(args.seed, salt),
                            exhaustive_fallback=True)

    report: dict = {"config": _config_dict(args, pat, {"k": args.k})}
    lines = [f"pattern: {pat.n_rows}x{pat.n_cols} from {args.pattern}",
             f"question: completion of rank <= {n - args.k} (k={args.k}), "
             f"mode={args.mode}"]
    witness = None
    counterexample = None
    if args.k == 1:
        v = glrmc_k1(pat, sampler(args.tm, 1))
        status = v.status
        witness = v.witness
        report["verdict"] = _verdict_dict(v)
        lines.append(f"verdict: {status.value}" + (f" ({v.note})" if v.note else ""))
    else:
        suff = glrmc_k_sufficient(pat, args.k, sampler(args.that, 1))
        if suff.status in (Status.SUFFICIENT_HOLDS, Status.FEASIBLE):
            status = Status.FEASIBLE
            witness = suff.witness
            report["verdict"] = {"status": status.value, "decided_by": "sufficient",
                                 "sub": {"sufficient": _verdict_dict(suff)}}
            lines.append("verdict: feasible (sufficient condition holds)")
        else:
            nec = glrmc_k_necessary(pat, args.k, sampler(args.tbar, 2),
                                    sampler(args.tm, 3))
            if nec.status is Status.NECESSARY_FAILS:
                status = Status.INFEASIBLE
                counterexample = nec.counterexample
                report["verdict"] = {
                    "status": status.value, "decided_by": "necessary",
                    "sub": {"sufficient": _verdict_dict(suff),
                            "necessary": _verdict_dict(nec)},
                }
                lines.append("verdict: infeasible (necessary condition fails)")
            else:
                status = Status.UNKNOWN
                report["verdict"] = {
                    "status": status.value, "decided_by": None,
                    "sub": {"sufficient": _verdict_dict(suff),
                            "necessary": _verdict_dict(nec)},
                }
                lines.append("verdict: unknown")
                lines.append(f"  sufficient: {suff.note}")
                lines.append(f"  necessary: {nec.note}")
    report["witness"] = _witness_dict(witness)
    report["counterexample"] = (
        {"rows": list(counterexample.rows)} if counterexample else None
    )
    report["trace"] = None
    _timing(report, started, args)
    if witness:
        lines.append(f"witness basis: {list(witness.basis)} ({witness.form})")
        for ev in witness.columns:
            if ev.kind == "cond1":
                lines.append(f"  column {ev.column}: no * entry in a droppable row")
            elif ev.kind == "cond2":
                lines.append(f"  column {ev.column}: ? entry at droppable row {ev.row}")
            else:
                lines.append(f"  column {ev.column}: overlap {ev.rho} realized by ? rows")
    if counterexample:
        lines.append(f"counterexample rows: {list(counterexample.rows)}")
    _emit(report, args, lines)
    return 0 if status in (Status.FEASIBLE, Status.INFEASIBLE) else 2


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def _trace_rows(result: BoundResult) -> list[dict]:
    return [asdict(step) for step in result.trace]


def cmd_bounds(args) -> int:
    started = time.perf_counter()
    pat = _load_pattern(args)
    rb: RankBounds = rank_bounds(
        pat,
        budget_upper=args.that,
        budget_rows=args.tbar,
        budget_inner=args.tm,
        seed=args.seed,
        mode=args.mode,
    )
    report = {
        "config": _config_dict(args, pat),
        "bounds": {
            "lower": rb.lower.value,
            "upper": rb.upper.value,
            "grank_bar": rb.grank_bar,
            "bracket_inverted": rb.bracket_inverted,
            "lower_confirmed": rb.lower.confirmed,
            "upper_confirmed": rb.upper.confirmed,
            "lower_repaired": rb.lower.repaired,
            "upper_repaired": rb.upper.repaired,
        },
        "witness": _witness_dict(rb.upper.witness),
        "counterexample": (
            {"rows": list(rb.lower.counterexample.rows)}
            if rb.lower.counterexample else None
        ),
        "trace": {"upper": _trace_rows(rb.upper), "lower": _trace_rows(rb.lower)},
    }
    _timing(report, started, args)
    lines = [
        f"pattern: {pat.n_rows}x{pat.n_cols} from {args.pattern}",
        f"generic minimum completion rank in [{rb.lower.value}, {rb.upper.value}]"
        f" (grank of ?->0 pattern: {rb.grank_bar}, mode={args.mode})",
    ]
    if rb.bracket_inverted:
        lines.append("WARNING: bracket inverted (lower > upper); "
                     "randomized budgets too small")
    for name, res in (("upper", rb.upper), ("lower", rb.lower)):
        lines.append(f"{name} trace:")
        for st in res.trace:
            lines.append(
                f"  r={st.r_mid} k={st.k} {st.condition}: {st.status}"
                + (f" [{st.detail}]" if st.detail else "")
            )
    _emit(report, args, lines)
    return 0


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------


def cmd_oracle(args) -> int:
    started = time.perf_counter()
    pat = _load_pattern(args)
    n = pat.n_rows
    report = {"config": _config_dict(args, pat, {"k": args.k})}
    lines = [f"pattern: {pat.n_rows}x{pat.n_cols} from {args.pattern}"]
    if args.k is None:
        rank = oracle_min_rank(pat, args.prime, args.trials, args.seed, args.budget)
        report["verdict"] = {"min_rank": rank, "prime": args.prime,
                             "trials": args.trials, "rng_seed": args.seed}
        report["witness"] = None
        report["trace"] = None
        _timing(report, started, args)
        lines.append(f"oracle minimum completion rank: {rank} "
                     f"(GF({args.prime}), {args.trials} trials)")
        _emit(report, args, lines)
        return 0
    v: OracleVerdict = oracle_feasible(pat, args.k, args.prime, args.trials,
                                       args.seed, args.budget)
    agree = sum(1 for e in v.evidence if e.feasible == (v.status is Status.FEASIBLE))
    report["verdict"] = {
        "status": v.status.value,
        "k": v.k,
        "prime": v.prime,
        "trials": v.trials,
        "rng_seed": v.rng_seed,
        "conditional": v.conditional,
        "note": v.note,
        "per_trial": [asdict(e) for e in v.evidence],
    }
    report["witness"] = None
    if v.witness is not None:
        report["witness"] = {
            "type": "completion",
            "prime": v.prime,
            "max_rank": n - v.k,
            "matrix": v.witness.matrix.values.tolist(),
        }
    report["trace"] = None
    _timing(report, started, args)
    lines.append(
        f"oracle verdict for rank <= {n - args.k} (k={args.k}): {v.status.value}"
        + (
            f", {agree}/{v.trials} trials agree"
            if v.evidence and v.status is not Status.UNKNOWN
            else ""
        )
    )
    if v.conditional:
        lines.append("  note: " + v.note)
    if v.witness is not None:
        lines.append(f"witness completion over GF({v.prime}):")
        for row in v.witness.matrix.values:
            lines.append("  " + " ".join(str(int(x)) for x in row))
    _emit(report, args, lines)
    return 0 if v.status in (Status.FEASIBLE, Status.INFEASIBLE) else 2


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------


def random_pattern(n: int, m: int, star_density: float, zero_fraction: float,
                   seed) -> PatternMatrix:
    """Random pattern with an exact number of observed entries.

    ``star_density`` of all entries are observed; ``zero_fraction`` of all
    entries (taken out of the observed share) are fixed zeros; the rest
    are missing.
    """
    total = n * m
    n_obs = int(round(star_density * total))
    n_zero = min(int(round(zero_fraction * total)), n_obs)
    rng = np.random.default_rng(seed)
    order = rng.permutation(total)
    grid = np.full(total, 2, dtype=np.int8)  # QUERY
    grid[order[:n_zero]] = 0  # ZERO
    grid[order[n_zero:n_obs]] = 1  # STAR
    return PatternMatrix(grid.reshape(n, m))


def cmd_experiment(args) -> int:
    densities = [float(d) for d in args.densities.split(",") if d.strip() != ""]
    if args.n < 1 or args.m < 1 or args.per_cell < 1:
        print("error: n, m, per-cell must be positive", file=sys.stderr)
        return 1
    if args.n > args.m and not args.transpose:
        print("error: experiment needs n <= m (or --transpose)", file=sys.stderr)
        return 1
    n, m = (args.m, args.n) if args.transpose else (args.n, args.m)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(CSV_HEADER.split(","))
    for di, density in enumerate(densities):
        for pid in range(args.per_cell):
            cell_seed = int(np.random.SeedSequence(
                (args.seed, di, pid)).generate_state(1)[0])
            pat = random_pattern(n, m, density, args.zero_fraction, cell_seed)
            t0 = time.perf_counter()
            rb = rank_bounds(
                pat,
                budget_upper=args.that,
                budget_rows=args.tbar,
                budget_inner=args.tm,
                seed=child_seed(cell_seed, 1),
                mode=args.mode,
            )
            try:
                orank = oracle_min_rank(pat, args.prime, args.trials,
                                        child_seed(cell_seed, 2), args.budget)
            except GlrmcError:
                orank = ""
            ms = round((time.perf_counter() - t0) * 1000.0, 3) if args.timing else ""
            out.writerow([
                f"{density:g}", pid, n, m,
                generic_rank(bar_pattern(pat)),
                rb.lower.value, rb.upper.value, orank, ms,
            ])
    return 0


# ---------------------------------------------------------------------------
# witness re-verification
# ---------------------------------------------------------------------------


def _verify_witness(path: str) -> int:
    """Independently recompute the witness/counterexample of a JSON report."""
    with open(path, "r", encoding="utf-8") as fh:
        report = json.load(fh)
    cfg = report.get("config", {})
    pat = parse_pattern(cfg["pattern"])
    n = pat.n_rows
    witness = report.get("witness")
    counterexample = report.get("counterexample")
    checked = 0
    if witness and witness.get("type") == "basis":
        basis = tuple(witness["basis"])
        if cfg["command"] == "bounds":
            k = n - report["bounds"]["upper"]
        else:
            k = int(cfg.get("k", 1))
        if cfg["command"] != "bounds" and k == 1:
            ok = (
                k1_conditions_hold(pat, basis).ok
                and k1_conditions_hold_enumerated(pat, basis).ok
            )
        else:
            ok = verify_sufficient_witness(
                pat, k, BasisWitness(basis, (), witness.get("form", "promoted"))
            )
        if not ok:
            print(f"witness FAILED re-verification: basis {list(basis)}")
            return 1
        print(f"witness basis {list(basis)} re-verified (k={k})")
        checked += 1
    if witness and witness.get("type") == "completion":
        x = np.array(witness["matrix"], dtype=np.int64)
        prime = witness["prime"]
        from ._kernels import gf_rank

        ok = x.shape == pat.shape
        ok = ok and all(x[r - 1, c - 1] == 0 for (r, c) in pat.omega_zero)
        ok = ok and all(x[r - 1, c - 1] != 0 for (r, c) in pat.omega_star)
        ok = ok and int(gf_rank(x, prime)) <= witness["max_rank"]
        if not ok:
            print("witness completion FAILED re-verification")
            return 1
        print(f"witness completion re-verified (rank <= {witness['max_rank']} "
              f"over GF({prime}))")
        checked += 1
    if counterexample and counterexample.get("rows"):
        rows = tuple(counterexample["rows"])
        if not verify_infeasible_rows(pat, rows):
            print(f"counterexample FAILED re-verification: rows {list(rows)}")
            return 1
        print(f"counterexample rows {list(rows)} re-verified")
        checked += 1
    if checked == 0:
        print("report carries no witness or counterexample to verify")
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
