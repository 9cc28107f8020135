"""Shared machinery for the incremental elimination engines.

Each engine maintains bookkeeping tables that certify, at every point,
exactly which live variables its rule can eliminate.  Candidates sit in
a min-priority queue on variable index, so the engine eliminates the
same variable the naive smallest-index rescan would; with exact tables
the produced traces coincide with the naive fixpoint's.
"""

from __future__ import annotations

import heapq
from collections import Counter

from ..consistency import NotArcConsistentError, is_arc_consistent
from ..model import Instance, iter_bits
from ..patterns import MIN_LIVE, checker_accepts
from ..trace import TraceEntry, make_entry


class FlatSet:
    """Set over a fixed index universe: O(1) membership, add, discard,
    and size."""

    __slots__ = ("_table", "_count")

    def __init__(self, universe: int, members=()):
        self._table = bytearray(universe)
        self._count = 0
        for x in members:
            self.add(x)

    def __contains__(self, x: int) -> bool:
        return bool(self._table[x])

    def add(self, x: int) -> None:
        if not self._table[x]:
            self._table[x] = 1
            self._count += 1

    def discard(self, x: int) -> None:
        if self._table[x]:
            self._table[x] = 0
            self._count -= 1

    def __len__(self) -> int:
        return self._count

    def __bool__(self) -> bool:
        return self._count > 0

    def __iter__(self):
        return (i for i, bit in enumerate(self._table) if bit)

    def only_member(self) -> int:
        if self._count != 1:
            raise ValueError("set has %d members" % self._count)
        return self._table.index(1)


class EngineAudit:
    """Collects engine diagnostics: queue insertions, branch firings,
    table deltas."""

    def __init__(self) -> None:
        self.events: list[tuple] = []
        self.branch_fires: Counter = Counter()
        self.insertions: list[tuple] = []

    def record(self, event: tuple) -> None:
        self.events.append(event)
        kind = event[0]
        if kind == "branch":
            # ("branch", label, key): label names the table-update branch
            self.branch_fires[(event[1], event[2])] += 1
        elif kind == "insert":
            # ("insert", var, phase)
            self.insertions.append(event[1:])


def engine_step_audit(audit: EngineAudit, event: tuple) -> None:
    """Record one engine step event (no-op when audit is None)."""
    if audit is not None:
        audit.record(event)


class Engine:
    """Base fixpoint loop.  Subclasses set `rule`, implement
    `initialise()` and `propagate(var, neighbors)`, and push candidates
    through `push()` whenever their tables certify eliminability."""

    rule = ""

    def __init__(self, inst: Instance, audit: EngineAudit | None = None):
        self.inst = inst
        self.audit = audit
        self.universe = (max(inst.variables) + 1) if inst.n else 0
        self._heap: list[int] = []
        self._queued = FlatSet(self.universe or 1)
        self.eliminated = FlatSet(self.universe or 1)

    # -- queue -------------------------------------------------------

    def push(self, i: int, phase: str) -> None:
        if i in self.eliminated or i in self._queued:
            return
        self._queued.add(i)
        heapq.heappush(self._heap, i)
        engine_step_audit(self.audit, ("insert", i, phase))

    def _pop(self):
        while self._heap:
            i = heapq.heappop(self._heap)
            self._queued.discard(i)
            if i not in self.eliminated:
                return i
        return None

    def revalidate(self, i: int) -> bool:
        """Is a queued candidate still eliminable?  Hereditary rules
        never invalidate; the triangle engine overrides this."""
        return True

    def check_witness(self, i: int, witness) -> None:
        """Cross-check the recomputed witness against the tables.
        Optional; engines override it as a cheap exactness canary."""

    # -- main loop ---------------------------------------------------

    def run(self) -> tuple[Instance, list[TraceEntry]]:
        self.initialise()
        entries: list[TraceEntry] = []
        min_live = MIN_LIVE[self.rule]
        while self.inst.n >= min_live:
            i = self._pop()
            if i is None:
                break
            if not self.revalidate(i):
                continue
            witness = checker_accepts(self.inst, self.rule, i)
            if witness is None:
                raise AssertionError(
                    "engine tables certified %d for %s but the checker "
                    "disagrees" % (i, self.rule))
            self.check_witness(i, witness)
            entries.append(make_entry(self.inst, self.rule, i, witness))
            engine_step_audit(self.audit, ("eliminate", i))
            nbrs = self.inst.neighbors(i)
            self.eliminated.add(i)
            self.propagate(i, nbrs)
            # a rule elimination on an arc-consistent instance never
            # deletes values; verify before dropping the variable
            for j in nbrs:
                if any(not self.inst.row(j, i, w) for w in self.inst.dom(j)):
                    raise AssertionError(
                        "support deletion during engine run: input was "
                        "not arc consistent")
            self.inst.remove_variable(i)
        return self.inst, entries

    # -- subclass API ------------------------------------------------

    def initialise(self) -> None:
        raise NotImplementedError

    def propagate(self, var: int, neighbors: list[int]) -> None:
        """Update tables for the elimination of `var`.  Called while
        `var` is still present in the instance (its rows are readable);
        implementations must treat it as gone."""
        raise NotImplementedError


def build_vars_plus_minus(inst: Instance, universe: int) -> dict:
    """(j, v, v') -> FlatSet of neighbours k of x_j where v has a
    compatible value that v' lacks, i.e. where replacing v by v' would
    lose support.  Shared table of the two snake engines; it only ever
    shrinks as variables are eliminated."""
    vpm: dict = {}
    for j in inst.variables:
        dom_j = inst.dom(j)
        nbrs = inst.neighbors(j)
        rows = {v: [(k, inst.row(j, k, v)) for k in nbrs] for v in dom_j}
        for v in dom_j:
            row_v = dict(rows[v])
            for vp in dom_j:
                if vp == v:
                    continue
                s = FlatSet(universe)
                for k, r in rows[vp]:
                    if row_v[k] & ~r:
                        s.add(k)
                vpm[(j, v, vp)] = s
    return vpm


def check_engine_precondition(inst: Instance) -> None:
    if not is_arc_consistent(inst):
        raise NotArcConsistentError(
            "elimination engines require an arc-consistent instance "
            "with no empty domain")
