"""Arc consistency, variable elimination, singleton removal, neighbourhood
substitution.

Unsatisfiability (a wiped-out domain) is reported through a boolean flag,
never an exception: preprocessing legitimately discovers it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .model import Instance, iter_bits

CAUSE_AC = "AC"
CAUSE_ELIM = "elimination-support"
CAUSE_NS = "NS"


class NotArcConsistentError(ValueError):
    """An operation that requires arc consistency got a non-AC instance."""


@dataclass(frozen=True)
class Deletion:
    """One value deletion: (variable, internal value, cause)."""
    var: int
    value: int
    cause: str


def is_arc_consistent(inst: Instance) -> bool:
    """Every live value has a support at every constraining variable."""
    for i in inst.variables:
        if not inst.dom(i):
            return False
        for j in inst.neighbors(i):
            for v in inst.dom(i):
                if not inst.row(i, j, v):
                    return False
    return True


def enforce_ac(inst: Instance) -> tuple[Instance, list[Deletion], bool]:
    """Establish arc consistency with support counters (AC-4 style).

    Returns (new instance, deletion log, sat flag).  The flag is False
    iff some domain wiped out; propagation stops at the first wipeout.
    """
    cur = inst.copy()
    log: list[Deletion] = []
    queue: deque[tuple[int, int]] = deque()

    counts: dict[tuple[int, int], list[int]] = {}
    for i, j in cur.pairs():
        for a, b in ((i, j), (j, i)):
            row_counts = [0] * (cur.dom_mask(a).bit_length())
            for v in cur.dom(a):
                row_counts[v] = cur.row(a, b, v).bit_count()
            counts[(a, b)] = row_counts

    def delete(i: int, v: int) -> bool:
        cur.delete_value(i, v)
        log.append(Deletion(i, v, CAUSE_AC))
        queue.append((i, v))
        return bool(cur.dom(i))

    for i in cur.variables:
        for v in list(cur.dom(i)):
            if any(counts[(i, j)][v] == 0 for j in cur.neighbors(i)):
                if not delete(i, v):
                    return cur, log, False

    while queue:
        j, w = queue.popleft()
        for i in cur.neighbors(j):
            # values of x_i that were supported by (j, w)
            for v in iter_bits(cur.row(j, i, w)):
                c = counts[(i, j)]
                c[v] -= 1
                if c[v] == 0:
                    if not delete(i, v):
                        return cur, log, False
    return cur, log, True


def eliminate_variable(inst: Instance, i: int) -> tuple[Instance, list[Deletion], bool]:
    """Remove x_i: first delete neighbour values with no support at x_i,
    then drop x_i and its constraints.  Satisfiability is unchanged when
    a rule licensed the elimination; on an arc-consistent instance the
    deletion log is always empty."""
    cur = inst.copy()
    log: list[Deletion] = []
    ok = True
    for j in cur.neighbors(i):
        for w in list(cur.dom(j)):
            if not cur.row(j, i, w):
                cur.delete_value(j, w)
                log.append(Deletion(j, w, CAUSE_ELIM))
        if not cur.dom(j):
            ok = False
    cur.remove_variable(i)
    return cur, log, ok


def eliminate_singletons(inst: Instance):
    """Remove singleton-domain variables (repeatedly) from an arc-consistent
    instance.  Returns (instance, trace entries); check ``instance.wiped``.
    """
    from .patterns import SingletonWitness
    from .trace import TraceEntry, capture_snapshot

    cur = inst.copy()
    entries: list[TraceEntry] = []
    while True:
        single = next((i for i in cur.variables if cur.dom_size(i) == 1), None)
        if single is None:
            break
        value = cur.dom(single)[0]
        doms, rels = capture_snapshot(cur, single)
        cur, log, ok = eliminate_variable(cur, single)
        entries.append(TraceEntry("singleton", single, SingletonWitness(value),
                                  doms, rels, deletions=tuple(log)))
        if not ok:
            break
    return cur, entries


def _substitutable(inst: Instance, i: int, v: int, v2: int) -> bool:
    """Every support of (i, v) is also a support of (i, v2)."""
    for j in inst.neighbors(i):
        if inst.row(i, j, v) & ~inst.row(i, j, v2):
            return False
    return True


def ns_fixpoint(inst: Instance, order=None) -> tuple[Instance, list[Deletion]]:
    """Delete neighbourhood-substitutable values until none remain.

    A value v goes when some live v2 covers all its supports and either
    the containment is strict or v2 < v (ties drop the larger index).
    ``order`` only changes the scan order; the result is unique up to
    isomorphism either way.
    """
    cur = inst.copy()
    log: list[Deletion] = []
    scan = list(order) if order is not None else None
    changed = True
    while changed:
        changed = False
        for i in (scan if scan is not None else cur.variables):
            if not cur.is_active(i):
                continue
            for v in list(cur.dom(i)):
                for v2 in cur.dom(i):
                    if v2 == v or not _substitutable(cur, i, v, v2):
                        continue
                    if v2 < v or not _substitutable(cur, i, v2, v):
                        cur.delete_value(i, v)
                        log.append(Deletion(i, v, CAUSE_NS))
                        changed = True
                        break
    return cur, log
