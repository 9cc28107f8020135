"""Command-line front end.

Subcommands: ``preprocess`` (arc consistency, singleton removal, one
elimination rule to fixpoint, trace output), ``solve`` (preprocessing
plus MAC search with restarts), ``verify`` (randomized battery checking
the incremental engines against the naive semantics), and ``compare``
(per-rule elimination counts and histograms over instance files).

Exit codes: 0 solved/reduced, 20 unsatisfiable, 2 timeout, 1 error.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from collections import Counter
from dataclasses import dataclass, field

from .consistency import eliminate_singletons, enforce_ac
from .engines import run_engine
from .model import FormatError, load_instance, save_instance
from .oracle import (SizeGuardExceeded, VERIFY_COLUMNS, battery_ac_instances,
                     naive_fixpoint, verify_one)
from .patterns import RULES, checker_accepts
from .solver import (SearchConfig, TimeBudgetExceeded, mac_solve,
                     solve_with_preprocessing)
from .trace import write_trace

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_TIMEOUT = 2
EXIT_UNSAT = 20


@dataclass
class RunReport:
    """Summary of one preprocessing run, printed as `key value` lines."""
    instance: str
    rule: str
    vars_before: int
    vars_after: int
    values_deleted: int
    eliminations: dict = field(default_factory=dict)
    times: dict = field(default_factory=dict)
    verdict: str = "reduced"

    def validate(self) -> None:
        total = sum(self.eliminations.values())
        if self.vars_after + total != self.vars_before:
            raise AssertionError("report arithmetic: %d + %d != %d"
                                 % (self.vars_after, total, self.vars_before))
        if any(t < 0 for t in self.times.values()):
            raise AssertionError("negative stage time")

    def lines(self):
        yield "instance %s" % self.instance
        yield "rule %s" % self.rule
        yield "vars-before %d" % self.vars_before
        yield "vars-after %d" % self.vars_after
        yield "values-deleted %d" % self.values_deleted
        for name in sorted(self.eliminations):
            yield "eliminations %s %d" % (name, self.eliminations[name])
        for stage in sorted(self.times):
            yield "time-%s %.6f" % (stage, self.times[stage])
        yield "verdict %s" % self.verdict


def _write_lines(path, lines) -> None:
    if path is None:
        for line in lines:
            print(line)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            for line in lines:
                fh.write(line + "\n")


# ---------------------------------------------------------------------------
# preprocess


def cmd_preprocess(args) -> int:
    inst = load_instance(args.input)
    t0 = time.perf_counter()
    cur, ac_log, ok = enforce_ac(inst)
    t_ac = time.perf_counter() - t0
    entries = []
    times = {"ac": t_ac, "singletons": 0.0, "engine": 0.0}
    if ok:
        t1 = time.perf_counter()
        cur, singleton_entries = eliminate_singletons(cur)
        entries.extend(singleton_entries)
        times["singletons"] = time.perf_counter() - t1
        if not cur.wiped:
            t2 = time.perf_counter()
            if args.ns:
                cur, rule_entries = naive_fixpoint(cur, args.rule,
                                                  ns_interleave=True)
            else:
                cur, rule_entries = run_engine(cur, args.rule)
            entries.extend(rule_entries)
            times["engine"] = time.perf_counter() - t2
    unsat = not ok or cur.wiped

    if args.out:
        save_instance(cur, args.out)
    if args.trace:
        write_trace(entries, inst, args.trace, pre_deletions=ac_log)

    counts = Counter(entry.rule for entry in entries)
    counts.setdefault(args.rule, 0)
    deleted = len(ac_log) + sum(len(e.deletions) for e in entries)
    report = RunReport(instance=args.input, rule=args.rule,
                       vars_before=inst.n, vars_after=cur.n,
                       values_deleted=deleted, eliminations=dict(counts),
                       times=times, verdict="unsat" if unsat else "reduced")
    report.validate()
    for line in report.lines():
        print(line)
    return EXIT_UNSAT if unsat else EXIT_OK


# ---------------------------------------------------------------------------
# solve


def cmd_solve(args) -> int:
    inst = load_instance(args.input)
    cfg = SearchConfig(initial_backtracks=args.backtracks,
                       restart_factor=args.factor,
                       time_limit=args.time_limit,
                       seed=args.seed)
    log = [] if args.log else None
    code = EXIT_OK
    solution = None
    try:
        if args.rule == "none":
            solution = mac_solve(inst, cfg, log)
        else:
            solution = solve_with_preprocessing(inst, args.rule, cfg, log)
        verdict = "sat" if solution is not None else "unsat"
        code = EXIT_OK if solution is not None else EXIT_UNSAT
    except TimeBudgetExceeded:
        verdict = "timeout"
        code = EXIT_TIMEOUT
    if args.log:
        _write_lines(args.log, log)
    lines = [verdict]
    if solution is not None:
        for i in sorted(solution):
            lines.append("v %d %d" % (i, inst.value_name(i, solution[i])))
    _write_lines(args.out, lines)
    return code


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    rows = []
    all_ok = True
    params = dict(n_range=(args.n_min, args.n_max),
                  d_range=(args.d_min, args.d_max),
                  p1=args.p1, p2_choices=tuple(args.p2))
    for seed, ac in battery_ac_instances(args.count, args.seed, **params):
        for rule in args.rules:
            try:
                row, ok = verify_one(ac, rule, seed)
            except SizeGuardExceeded as exc:
                print("verify: seed %d rule %s: %s" % (seed, rule, exc),
                      file=sys.stderr)
                all_ok = False
                continue
            rows.append(row)
            if not ok:
                print("verify: discrepancy at seed %d rule %s" % (seed, rule),
                      file=sys.stderr)
                all_ok = False

    target = open(args.out, "w", encoding="utf-8", newline="") if args.out \
        else sys.stdout
    try:
        writer = csv.DictWriter(target, fieldnames=VERIFY_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            target.close()
    return EXIT_OK if all_ok else EXIT_ERROR


# ---------------------------------------------------------------------------
# compare


def _histogram(values) -> str:
    counts = Counter(min(v, 100) for v in values)
    return ";".join("%d:%d" % item for item in sorted(counts.items()))


def cmd_compare(args) -> int:
    rows = []
    for path in args.instances:
        inst = load_instance(path)
        for rule in args.rules:
            if args.raw_checkers:
                eliminated = [i for i in inst.variables
                              if checker_accepts(inst, rule, i) is not None]
            else:
                cur, _, ok = enforce_ac(inst)
                entries = []
                if ok:
                    cur, singleton_entries = eliminate_singletons(cur)
                    entries.extend(singleton_entries)
                    if not cur.wiped:
                        cur, rule_entries = run_engine(cur, rule)
                        entries.extend(rule_entries)
                eliminated = [entry.var for entry in entries]
            pct = 100.0 * len(eliminated) / inst.n if inst.n else 0.0
            rows.append((path, rule, inst.n, len(eliminated), "%.1f" % pct,
                         _histogram(inst.dom_size(i) for i in eliminated),
                         _histogram(len(inst.neighbors(i)) for i in eliminated)))

    target = open(args.out, "w", encoding="utf-8", newline="") if args.out \
        else sys.stdout
    try:
        writer = csv.writer(target)
        writer.writerow(("instance", "rule", "n", "eliminated", "pct",
                         "dom_hist", "deg_hist"))
        writer.writerows(rows)
    finally:
        if args.out:
            target.close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cspelim",
        description="Satisfiability-conserving variable elimination for "
                    "binary constraint networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess",
                       help="reduce an instance with one elimination rule")
    p.add_argument("input", help="BCSP instance file")
    p.add_argument("--rule", required=True, choices=RULES)
    p.add_argument("--out", help="write the reduced instance here")
    p.add_argument("--trace", help="write the elimination trace here")
    p.add_argument("--ns", action="store_true",
                   help="interleave neighbourhood substitution after each "
                        "elimination (uses the reference fixpoint)")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("solve", help="preprocess then run MAC with restarts")
    p.add_argument("input", help="BCSP instance file")
    p.add_argument("--rule", default="none", choices=RULES + ("none",))
    p.add_argument("--backtracks", type=int, default=100,
                   help="backtrack budget of the first restart")
    p.add_argument("--factor", type=float, default=1.1,
                   help="geometric growth factor of the budget")
    p.add_argument("--time-limit", type=float, default=None,
                   help="wall-clock limit in seconds")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--log", help="write the search log here")
    p.add_argument("--out", help="write the solution file here (default stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify",
                       help="randomized engine-vs-reference battery")
    p.add_argument("--rules", nargs="+", choices=RULES, default=list(RULES))
    p.add_argument("--count", type=int, default=500,
                   help="number of arc-consistent instances")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-min", type=int, default=4)
    p.add_argument("--n-max", type=int, default=9)
    p.add_argument("--d-min", type=int, default=2)
    p.add_argument("--d-max", type=int, default=4)
    p.add_argument("--p1", type=float, default=0.5)
    p.add_argument("--p2", type=float, nargs="+", default=[0.3, 0.5, 0.7])
    p.add_argument("--out", help="write the CSV report here (default stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare",
                       help="per-rule elimination counts over instance files")
    p.add_argument("instances", nargs="+", help="BCSP instance files")
    p.add_argument("--rules", nargs="+", choices=RULES, default=list(RULES))
    p.add_argument("--raw-checkers", action="store_true",
                   help="count one-shot checker acceptance on the raw "
                        "instance instead of running the pipeline")
    p.add_argument("--out", help="write the CSV report here (default stdout)")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except (FormatError, OSError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
