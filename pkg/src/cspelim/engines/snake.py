"""Incremental engine for the existential snake rule.

A variable x_i is eliminable when some value v_i sees no snake: no
neighbour pair (v_j incompatible, v'_j compatible with v_i) where v_j
keeps a support some third variable denies v'_j.  The tables count, per
(i, v_i, j), the number of such "bad" ordered value pairs at x_j; a
value is snake-free exactly when every neighbour's count is zero.
"""

from __future__ import annotations

from ..model import iter_bits
from .base import Engine, FlatSet, build_vars_plus_minus, engine_step_audit


class ExistsSnakeEngine(Engine):
    rule = "exists-snake"

    def initialise(self) -> None:
        inst = self.inst
        uni = self.universe or 1
        self.vars_plus_minus = build_vars_plus_minus(inst, uni)
        # (i, v_i, j) -> number of ordered pairs (v_j, v'_j) that are bad
        # for v_i at j; (i, v_i) -> FlatSet of j with a nonzero count
        self.count_pairs: dict = {}
        self.bad_vars: dict = {}
        for i in inst.variables:
            nbrs = inst.neighbors(i)
            for v_i in inst.dom(i):
                bad = FlatSet(uni)
                for j in nbrs:
                    row_ij = inst.row(i, j, v_i)
                    c = 0
                    for v_j in iter_bits(inst.dom_mask(j) & ~row_ij):
                        for vp_j in iter_bits(row_ij):
                            s = self.vars_plus_minus[(j, v_j, vp_j)]
                            if len(s) > 1 or (len(s) == 1 and i not in s):
                                c += 1
                    self.count_pairs[(i, v_i, j)] = c
                    if c:
                        bad.add(j)
                self.bad_vars[(i, v_i)] = bad
                if not bad:
                    self.push(i, "init")

    def _pair_cleared(self, i: int, j: int, v_j: int, vp_j: int) -> None:
        """The ordered pair (v_j, v'_j) stopped being bad outside x_i;
        decrement for every v_i it was counted against."""
        inst = self.inst
        sel = inst.row(j, i, vp_j) & ~inst.row(j, i, v_j)
        for v_i in iter_bits(sel):
            key = (i, v_i, j)
            c = self.count_pairs[key] - 1
            self.count_pairs[key] = c
            if c == 0:
                bad = self.bad_vars[(i, v_i)]
                bad.discard(j)
                if not bad:
                    self.push(i, "prop")

    def propagate(self, var: int, neighbors: list) -> None:
        inst = self.inst
        for j in neighbors:
            dom_j = inst.dom(j)
            for v_j in dom_j:
                for vp_j in dom_j:
                    if vp_j == v_j:
                        continue
                    s = self.vars_plus_minus[(j, v_j, vp_j)]
                    if var not in s:
                        continue
                    s.discard(var)
                    if len(s) == 1:
                        # the pair is now bad for nobody except the one
                        # variable left in its loss set
                        engine_step_audit(
                            self.audit, ("branch", "pair-last", (j, v_j, vp_j)))
                        i = s.only_member()
                        if i not in self.eliminated:
                            self._pair_cleared(i, j, v_j, vp_j)
                    elif not s:
                        engine_step_audit(
                            self.audit, ("branch", "pair-none", (j, v_j, vp_j)))
                        for i in inst.neighbors(j):
                            if i not in self.eliminated:
                                self._pair_cleared(i, j, v_j, vp_j)
        # the eliminated variable stops counting as a snake middle
        for i in neighbors:
            for v_i in inst.dom(i):
                bad = self.bad_vars[(i, v_i)]
                if var in bad:
                    bad.discard(var)
                    if not bad:
                        self.push(i, "prop")
