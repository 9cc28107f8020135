"""Ground-truth machinery: brute-force solving and counting, naive rule
fixpoints, random instance generation, isomorphism testing, and the
verification battery comparing engines against the naive semantics.

Everything here favours obviousness over speed; size guards raise
instead of silently truncating.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Optional

from .consistency import (NotArcConsistentError, eliminate_variable,
                          enforce_ac, is_arc_consistent, ns_fixpoint)
from .model import Instance, build_instance, iter_bits
from .patterns import checker_accepts
from .trace import TraceEntry, capture_snapshot

SIZE_GUARD = 10 ** 7
ISO_GUARD = 7


class SizeGuardExceeded(RuntimeError):
    """Exhaustive search refused: the instance is too large."""


def _search_space(inst: Instance) -> int:
    total = 1
    for i in inst.variables:
        total *= inst.dom_size(i)
        if total > SIZE_GUARD:
            return total
    return total


def _guard(inst: Instance) -> None:
    if _search_space(inst) > SIZE_GUARD:
        raise SizeGuardExceeded(
            "search space exceeds %d assignments" % SIZE_GUARD)


# ---------------------------------------------------------------------------
# brute force


def brute_force_solve(inst: Instance) -> Optional[dict]:
    """Exhaustive backtracking; a solution dict (internal values) or None."""
    _guard(inst)
    order = inst.variables
    if any(not inst.dom(i) for i in order):
        return None
    assign: dict = {}

    def bt(idx: int) -> bool:
        if idx == len(order):
            return True
        i = order[idx]
        nbrs = [j for j in inst.neighbors(i) if j in assign]
        for v in inst.dom(i):
            if all((inst.row(i, j, v) >> assign[j]) & 1 for j in nbrs):
                assign[i] = v
                if bt(idx + 1):
                    return True
                del assign[i]
        return False

    return dict(assign) if bt(0) else None


def count_solutions(inst: Instance) -> int:
    _guard(inst)
    order = inst.variables
    if any(not inst.dom(i) for i in order):
        return 0
    assign: dict = {}

    def bt(idx: int) -> int:
        if idx == len(order):
            return 1
        i = order[idx]
        nbrs = [j for j in inst.neighbors(i) if j in assign]
        total = 0
        for v in inst.dom(i):
            if all((inst.row(i, j, v) >> assign[j]) & 1 for j in nbrs):
                assign[i] = v
                total += bt(idx + 1)
                del assign[i]
        return total

    return bt(0)


def is_solution(inst: Instance, assignment: dict) -> bool:
    """Does the assignment cover every live variable consistently?"""
    live = inst.variables
    if set(assignment) != set(live):
        return False
    for i in live:
        if not (inst.dom_mask(i) >> assignment[i]) & 1:
            return False
    for i, j in combinations(live, 2):
        if not inst.compatible(i, assignment[i], j, assignment[j]):
            return False
    return True


# ---------------------------------------------------------------------------
# naive fixpoint


def naive_fixpoint(inst: Instance, rule: str, ns_interleave: bool = False):
    """Repeatedly eliminate the smallest variable the rule's checker
    accepts, until none.  Returns (reduced instance, trace entries).

    The input must be arc consistent; elimination then never deletes
    values, so the engines and this fixpoint see identical instances.
    With ``ns_interleave`` a neighbourhood-substitution pass follows
    each elimination (its deletions attach to that entry).
    """
    if not is_arc_consistent(inst):
        raise NotArcConsistentError(
            "naive fixpoint requires an arc-consistent instance")
    cur = inst.copy()
    entries: list[TraceEntry] = []
    while True:
        for i in cur.variables:
            witness = checker_accepts(cur, rule, i)
            if witness is None:
                continue
            doms, rels = capture_snapshot(cur, i)
            cur, log, ok = eliminate_variable(cur, i)
            if log:
                raise AssertionError(
                    "support deletion while eliminating %d from an "
                    "arc-consistent instance" % i)
            dels: tuple = ()
            if ns_interleave:
                cur, ns_log = ns_fixpoint(cur)
                dels = tuple(ns_log)
            entries.append(TraceEntry(rule, i, witness, doms, rels, dels))
            if not ok:
                return cur, entries
            break
        else:
            return cur, entries


# ---------------------------------------------------------------------------
# random generation


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    d: int
    p1: float
    p2: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 0 or self.d < 1:
            raise ValueError("need n >= 0 and d >= 1")
        if not (0.0 <= self.p1 <= 1.0 and 0.0 <= self.p2 <= 1.0):
            raise ValueError("p1 and p2 must lie in [0, 1]")


def random_instance(config: GeneratorConfig) -> Instance:
    """Uniform binary model: each unordered pair constrained with
    probability p1; each value pair of a constrained pair forbidden
    with probability p2.  Fully determined by the seed."""
    rng = random.Random(config.seed)
    values = list(range(config.d))
    constraints = {}
    for i, j in combinations(range(config.n), 2):
        if rng.random() < config.p1:
            constraints[(i, j)] = [(a, b) for a in values for b in values
                                   if rng.random() >= config.p2]
    return build_instance([values] * config.n, constraints)


# ---------------------------------------------------------------------------
# isomorphism


def _semantic_degree(inst: Instance, i: int) -> int:
    """Number of neighbours whose relation actually forbids something."""
    deg = 0
    for j in inst.neighbors(i):
        full = inst.dom_mask(j)
        if any(inst.row(i, j, v) != full for v in inst.dom(i)):
            deg += 1
    return deg


def are_isomorphic(a: Instance, b: Instance) -> bool:
    """Variable and per-variable value bijections preserving every
    compatibility.  Exhaustive with (domain size, effective degree)
    pruning; guarded to n <= 7."""
    if a.n > ISO_GUARD or b.n > ISO_GUARD:
        raise SizeGuardExceeded("isomorphism test limited to n <= %d" % ISO_GUARD)
    va, vb = list(a.variables), list(b.variables)
    if len(va) != len(vb):
        return False
    sig_a = {i: (a.dom_size(i), _semantic_degree(a, i)) for i in va}
    sig_b = {j: (b.dom_size(j), _semantic_degree(b, j)) for j in vb}
    if sorted(sig_a.values()) != sorted(sig_b.values()):
        return False

    sigma: dict = {}
    vmaps: dict = {}
    used: set = set()

    def consistent(x: int, y: int, pi: dict) -> bool:
        for x2, y2 in sigma.items():
            pi2 = vmaps[x2]
            for v in a.dom(x):
                for v2 in a.dom(x2):
                    if (a.compatible(x, v, x2, v2)
                            != b.compatible(y, pi[v], y2, pi2[v2])):
                        return False
        return True

    def extend(idx: int) -> bool:
        if idx == len(va):
            return True
        x = va[idx]
        for y in vb:
            if y in used or sig_a[x] != sig_b[y]:
                continue
            for perm in permutations(b.dom(y)):
                pi = dict(zip(a.dom(x), perm))
                if consistent(x, y, pi):
                    sigma[x] = y
                    vmaps[x] = pi
                    used.add(y)
                    if extend(idx + 1):
                        return True
                    del sigma[x], vmaps[x]
                    used.discard(y)
        return False

    return extend(0)


# ---------------------------------------------------------------------------
# elimination-order search


def max_eliminations_by_order(inst: Instance, rule: str,
                              ns_interleave: bool = False) -> int:
    """Maximum eliminations over every order of rule-valid choices
    (not just the greedy smallest-first order).  Memoized exhaustive
    search, guarded to n <= 7."""
    if inst.n > ISO_GUARD:
        raise SizeGuardExceeded("order search limited to n <= %d" % ISO_GUARD)
    memo: dict = {}

    def go(cur: Instance) -> int:
        key = cur.canonical_key()
        hit = memo.get(key)
        if hit is not None:
            return hit
        best = 0
        for i in cur.variables:
            if checker_accepts(cur, rule, i) is None:
                continue
            nxt, _, ok = eliminate_variable(cur, i)
            if ns_interleave:
                nxt, _ = ns_fixpoint(nxt)
            score = 1 + (go(nxt) if ok else 0)
            if score > best:
                best = score
        memo[key] = best
        return best

    return go(inst.copy())


# ---------------------------------------------------------------------------
# verification battery


def battery_instance(seed: int,
                     n_range=(4, 9), d_range=(2, 4),
                     p1: float = 0.5,
                     p2_choices=(0.3, 0.5, 0.7)) -> Instance:
    """Seeded random instance with parameters drawn from the battery
    ranges (bounds inclusive)."""
    rng = random.Random("battery-%d" % seed)
    n = rng.randint(*n_range)
    d = rng.randint(*d_range)
    p2 = rng.choice(p2_choices)
    return random_instance(GeneratorConfig(n, d, p1, p2, seed=seed))


def battery_ac_instances(count: int, seed: int = 0, **params):
    """Yield (seed, arc-consistent instance) pairs; instances that wipe
    out under AC are skipped (engines require non-empty AC input)."""
    produced = 0
    offset = 0
    while produced < count:
        s = seed + offset
        offset += 1
        ac, _, ok = enforce_ac(battery_instance(s, **params))
        if not ok:
            continue
        produced += 1
        yield s, ac


VERIFY_COLUMNS = ("seed", "rule", "n_eliminated_naive", "n_eliminated_engine",
                  "sat_before", "sat_after", "reconstruction_ok")


def verify_one(ac: Instance, rule: str, seed: int) -> tuple[dict, bool]:
    """Compare engine against naive fixpoint on one AC instance; returns
    (report row, ok flag)."""
    from .engines import run_engine
    from .solver import reconstruct_solution

    naive_inst, naive_entries = naive_fixpoint(ac, rule)
    eng_inst, eng_entries = run_engine(ac, rule)
    agree = (naive_inst == eng_inst
             and [t.var for t in naive_entries] == [t.var for t in eng_entries])

    sat_before = brute_force_solve(ac) is not None
    reduced_solution = brute_force_solve(eng_inst)
    sat_after = reduced_solution is not None

    recon_ok = True
    if sat_after:
        full = reconstruct_solution(ac, eng_entries, reduced_solution)
        recon_ok = is_solution(ac, full)

    row = {
        "seed": seed,
        "rule": rule,
        "n_eliminated_naive": len(naive_entries),
        "n_eliminated_engine": len(eng_entries),
        "sat_before": int(sat_before),
        "sat_after": int(sat_after),
        "reconstruction_ok": int(recon_ok),
    }
    ok = agree and sat_before == sat_after and recon_ok
    return row, ok


def run_verification(rules, count: int, seed: int = 0, **params):
    """Battery over `count` AC instances x rules.  Returns (rows, ok)."""
    rows = []
    all_ok = True
    for s, ac in battery_ac_instances(count, seed, **params):
        for rule in rules:
            row, ok = verify_one(ac, rule, s)
            rows.append(row)
            all_ok = all_ok and ok
    return rows, all_ok
