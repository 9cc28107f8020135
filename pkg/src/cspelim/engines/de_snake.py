"""Incremental engine for the directional (replacement) snake rule.

A value v_i of x_i is good when every incompatible assignment (x_j, v_j)
has a replacement v'_j compatible with v_i whose only possible support
loss is at x_i itself.  The tables track, per (i, v_i), the set of
assignments still lacking such a replacement; x_i is eliminable when
some value's set is empty.
"""

from __future__ import annotations

from ..model import iter_bits
from .base import Engine, build_vars_plus_minus, engine_step_audit


class DeSnakeEngine(Engine):
    rule = "de-snake"

    def initialise(self) -> None:
        inst = self.inst
        uni = self.universe or 1
        self.vars_plus_minus = build_vars_plus_minus(inst, uni)
        # (i, v_i) -> set of (j, v_j) with no qualifying replacement
        self.bad_assts: dict = {}
        for i in inst.variables:
            for v_i in inst.dom(i):
                bad = set()
                for j in inst.neighbors(i):
                    row_ij = inst.row(i, j, v_i)
                    for v_j in iter_bits(inst.dom_mask(j) & ~row_ij):
                        for vp_j in iter_bits(row_ij):
                            s = self.vars_plus_minus[(j, v_j, vp_j)]
                            if not s or (len(s) == 1 and i in s):
                                break
                        else:
                            bad.add((j, v_j))
                self.bad_assts[(i, v_i)] = bad
                if not bad:
                    self.push(i, "init")

    def _replacement_found(self, i: int, j: int, v_j: int, vp_j: int) -> None:
        """v'_j now loses nothing outside x_i; the assignment (j, v_j)
        stops being bad for every v_i that v'_j supports and v_j does
        not (if it still was)."""
        inst = self.inst
        sel = inst.row(j, i, vp_j) & ~inst.row(j, i, v_j)
        for v_i in iter_bits(sel):
            bad = self.bad_assts[(i, v_i)]
            if (j, v_j) in bad:
                bad.discard((j, v_j))
                if not bad:
                    self.push(i, "prop")

    def propagate(self, var: int, neighbors: list) -> None:
        inst = self.inst
        dom_var = list(inst.dom(var))
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
                        engine_step_audit(
                            self.audit, ("branch", "asst-last", (j, v_j, vp_j)))
                        i = s.only_member()
                        if i not in self.eliminated:
                            self._replacement_found(i, j, v_j, vp_j)
                    elif not s:
                        engine_step_audit(
                            self.audit, ("branch", "asst-none", (j, v_j, vp_j)))
                        for i in inst.neighbors(j):
                            if i not in self.eliminated:
                                self._replacement_found(i, j, v_j, vp_j)
        # assignments at the eliminated variable no longer need replacing
        for i in neighbors:
            for v_i in inst.dom(i):
                bad = self.bad_assts[(i, v_i)]
                if bad:
                    for v in dom_var:
                        bad.discard((var, v))
                    if not bad:
                        self.push(i, "prop")
