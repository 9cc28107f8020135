"""Complete search and solution reconstruction.

`mac_solve` is a MAC backtracker (arc consistency re-established after
every assignment) with conflict-weighted degree variable ordering and
geometric restarts.  `reconstruct_solution` replays an elimination trace
backwards, extending a solution of the reduced instance to the original.
"""

from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .consistency import eliminate_singletons, enforce_ac
from .model import Instance, iter_bits
from .patterns import (DeSnakeWitness, ExtensionWitness, SingletonWitness,
                       SnakeWitness, TriangleWitness)


@dataclass(frozen=True)
class SearchConfig:
    initial_backtracks: int = 100
    restart_factor: float = 1.1
    time_limit: Optional[float] = None
    seed: Optional[int] = None  # reserved for randomised tie-breaking

    def __post_init__(self):
        if self.initial_backtracks < 1:
            raise ValueError("initial_backtracks must be >= 1")
        if self.restart_factor < 1.0:
            raise ValueError("restart_factor must be >= 1.0")


class TimeBudgetExceeded(Exception):
    """Wall-clock limit expired during search."""


class ReconstructionError(RuntimeError):
    """Trace replay failed: the trace does not match the instance, or an
    elimination's extension guarantee did not hold."""


class _Restart(Exception):
    pass


def _log(log, line: str) -> None:
    if log is not None:
        log.append(line)


# ---------------------------------------------------------------------------
# MAC search


class _Attempt:
    """One restart: depth-first MAC limited to `budget` backtracks."""

    def __init__(self, inst: Instance, weights: dict, budget: int,
                 deadline: Optional[float]):
        self.inst = inst
        self.weights = weights
        self.budget = budget
        self.deadline = deadline
        self.backtracks = 0
        self.assigned: dict = {}

    def run(self) -> Optional[dict]:
        masks = {i: self.inst.dom_mask(i) for i in self.inst.variables}
        return self._node(masks)

    def _pick(self, masks: dict) -> Optional[int]:
        """Smallest ratio of live values to weights of constraints toward
        uninstantiated neighbours; unconstrained variables last; ties by
        variable index."""
        best = None
        best_score = None
        for i in self.inst.variables:
            if i in self.assigned:
                continue
            wsum = 0
            for j in self.inst.neighbors(i):
                if j not in self.assigned:
                    wsum += self.weights[(min(i, j), max(i, j))]
            score = masks[i].bit_count() / wsum if wsum else math.inf
            if best_score is None or score < best_score:
                best, best_score = i, score
        return best

    def _node(self, masks: dict) -> Optional[dict]:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise TimeBudgetExceeded()
        x = self._pick(masks)
        if x is None:
            return dict(self.assigned)
        for v in iter_bits(masks[x]):
            child = dict(masks)
            child[x] = 1 << v
            if self._propagate(child, x):
                self.assigned[x] = v
                found = self._node(child)
                if found is not None:
                    return found
                del self.assigned[x]
        if self.backtracks >= self.budget:
            raise _Restart()
        self.backtracks += 1
        return None

    def _propagate(self, masks: dict, start: int) -> bool:
        """Re-establish arc consistency after narrowing `start`.  On a
        wipeout, bump the culprit constraint's weight and fail."""
        inst = self.inst
        queue = deque((j, start) for j in inst.neighbors(start))
        while queue:
            j, i = queue.popleft()
            mi = masks[i]
            kept = 0
            for w in iter_bits(masks[j]):
                if inst.row(j, i, w) & mi:
                    kept |= 1 << w
            if kept == masks[j]:
                continue
            masks[j] = kept
            if not kept:
                self.weights[(min(i, j), max(i, j))] += 1
                return False
            for k in inst.neighbors(j):
                if k != i:
                    queue.append((k, j))
        return True


def mac_solve(inst: Instance, config: Optional[SearchConfig] = None,
              log: Optional[list] = None) -> Optional[dict]:
    """Solve by MAC with restarts; a solution dict (internal values) or
    None if unsatisfiable.  Raises TimeBudgetExceeded past the limit.

    Restart k allows floor(initial * factor**k) backtracks.  Constraint
    weights persist across restarts.  `log` (a list) receives one
    ``restart <k> <budget>`` line per attempt, then ``backtracks
    <total>`` and ``verdict <sat|unsat|timeout>``.
    """
    cfg = config or SearchConfig()
    deadline = None
    if cfg.time_limit is not None:
        deadline = time.monotonic() + cfg.time_limit
    root, _, ok = enforce_ac(inst)
    if not ok:
        _log(log, "backtracks 0")
        _log(log, "verdict unsat")
        return None
    weights = {pair: 1 for pair in root.pairs()}
    total = 0
    k = 0
    while True:
        budget = int(cfg.initial_backtracks * cfg.restart_factor ** k)
        _log(log, "restart %d %d" % (k, budget))
        attempt = _Attempt(root, weights, budget, deadline)
        try:
            solution = attempt.run()
        except _Restart:
            total += attempt.backtracks
            k += 1
            continue
        except TimeBudgetExceeded:
            total += attempt.backtracks
            _log(log, "backtracks %d" % total)
            _log(log, "verdict timeout")
            raise
        total += attempt.backtracks
        _log(log, "backtracks %d" % total)
        _log(log, "verdict %s" % ("unsat" if solution is None else "sat"))
        return solution


# ---------------------------------------------------------------------------
# reconstruction


def _snapshot_compatible(entry, s: dict, v: int) -> bool:
    for j, rows in entry.rel_snapshot.items():
        if not (rows[v] >> s[j]) & 1:
            return False
    return True


def reconstruct_solution(original: Instance, entries, reduced_solution: dict) -> dict:
    """Extend a solution of the reduced instance to one of the original
    by replaying the trace in reverse.  Values are internal throughout."""
    s = dict(reduced_solution)
    for entry in reversed(entries):
        w = entry.witness
        var = entry.var
        for j in entry.rel_snapshot:
            if j not in s:
                raise ReconstructionError(
                    "neighbour %d of %d unassigned during replay" % (j, var))
        if isinstance(w, SingletonWitness):
            s[var] = w.value
        elif isinstance(w, TriangleWitness):
            if w.justifier not in s:
                raise ReconstructionError(
                    "justifier %d of %d unassigned" % (w.justifier, var))
            v_j = s[w.justifier]
            if v_j not in w.v_map:
                raise ReconstructionError(
                    "no dominating value for %d=%d at %d"
                    % (w.justifier, v_j, var))
            s[var] = w.v_map[v_j]
        elif isinstance(w, ExtensionWitness):
            for v in entry.dom_snapshot:
                if _snapshot_compatible(entry, s, v):
                    s[var] = v
                    break
            else:
                raise ReconstructionError(
                    "no extension for %d: elimination guarantee violated" % var)
        elif isinstance(w, DeSnakeWitness):
            v_i = w.value
            conflicts = [j for j, rows in entry.rel_snapshot.items()
                         if not (rows[v_i] >> s[j]) & 1]
            s[var] = v_i
            for j in conflicts:
                key = (j, s[j])
                if key not in w.u_map:
                    raise ReconstructionError(
                        "no replacement for %d=%d at %d" % (j, s[j], var))
                s[j] = w.u_map[key]
        elif isinstance(w, SnakeWitness):
            v_i = w.value
            s[var] = v_i
            for j, rows in entry.rel_snapshot.items():
                if not (rows[v_i] >> s[j]) & 1:
                    repl = next(iter_bits(rows[v_i]), None)
                    if repl is None:
                        raise ReconstructionError(
                            "no replacement for %d at %d" % (j, var))
                    s[j] = repl
        else:
            raise ReconstructionError("unknown witness %r" % (w,))
    missing = [i for i in original.variables if i not in s]
    if missing:
        raise ReconstructionError("variables %r left unassigned" % (missing,))
    return s


# ---------------------------------------------------------------------------
# pipeline


def solve_with_preprocessing(inst: Instance, rule: Optional[str] = None,
                             config: Optional[SearchConfig] = None,
                             log: Optional[list] = None) -> Optional[dict]:
    """Arc consistency, singleton elimination, optional variable
    elimination under `rule`, MAC on the remainder, then reconstruction
    back to the original instance."""
    from .engines import run_engine

    root, _, ok = enforce_ac(inst)
    if not ok:
        return None
    cur, entries = eliminate_singletons(root)
    if cur.wiped:
        return None
    entries = list(entries)
    if rule is not None and rule != "none":
        cur, rule_entries = run_engine(cur, rule)
        entries.extend(rule_entries)
    reduced_solution = mac_solve(cur, config, log)
    if reduced_solution is None:
        return None
    return reconstruct_solution(inst, entries, reduced_solution)
