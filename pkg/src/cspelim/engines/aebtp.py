"""Incremental engine for the forall-exists broken-triangle rule.

x_m is eliminable when every assignment (x_j, v_j) elsewhere reaches it
through some v_m that is apex of no broken triangle containing that
assignment in its base.  Per (j, v_j, v_m) the tables hold the set of
variables still witnessing such a triangle; v_m becomes usable when its
set empties, and x_m fires once every neighbour assignment has a usable
value.  Assignments at non-neighbours always extend on arc-consistent
input, so only neighbours are tracked.
"""

from __future__ import annotations

from ..model import iter_bits
from .base import Engine, engine_step_audit


class AEBTPEngine(Engine):
    rule = "aebtp"

    def initialise(self) -> None:
        self.st: dict = {}
        for m in self.inst.variables:
            self._init_var(m)

    def _init_var(self, m: int) -> None:
        inst = self.inst
        nbrs = inst.neighbors(m)
        lbt: dict = {}        # (j, v_j, v_m) -> conflict witnesses
        sup: dict = {}        # (j, v_j) -> number of conflict-free v_m
        bad_count: dict = {}  # j -> its values with none (absent if 0)
        for j in nbrs:
            bc = 0
            for v_j in inst.dom(j):
                r_jm = inst.row(j, m, v_j)
                # per i2: values compatible with v_j whose own row to m
                # escapes v_j's row
                w = {}
                for i2 in nbrs:
                    if i2 == j:
                        continue
                    mask = 0
                    for v2 in iter_bits(inst.row(j, i2, v_j)):
                        if inst.row(i2, m, v2) & ~r_jm:
                            mask |= 1 << v2
                    if mask:
                        w[i2] = mask
                cnt = 0
                for v_m in iter_bits(r_jm):
                    s = {i2 for i2, mask in w.items()
                         if mask & ~inst.row(m, i2, v_m)}
                    if s:
                        lbt[(j, v_j, v_m)] = s
                    else:
                        cnt += 1
                sup[(j, v_j)] = cnt
                if cnt == 0:
                    bc += 1
            if bc:
                bad_count[j] = bc
        self.st[m] = {"lbt": lbt, "sup": sup, "bad_count": bad_count}
        if not bad_count:
            self.push(m, "init")

    def propagate(self, var: int, neighbors: list) -> None:
        self.st.pop(var, None)
        for m in neighbors:
            st = self.st[m]
            lbt, sup, bad_count = st["lbt"], st["sup"], st["bad_count"]
            dead = []
            freed = []
            for key, s in lbt.items():
                if key[0] == var:
                    dead.append(key)
                elif var in s:
                    s.discard(var)
                    if not s:
                        freed.append(key)
            for key in dead:
                del lbt[key]
            for key in freed:
                engine_step_audit(
                    self.audit, ("branch", "support-found", (m,) + key))
                del lbt[key]
                j, v_j, _ = key
                c = sup[(j, v_j)] + 1
                sup[(j, v_j)] = c
                if c == 1:
                    bc = bad_count[j] - 1
                    if bc:
                        bad_count[j] = bc
                    else:
                        del bad_count[j]
                        if not bad_count:
                            self.push(m, "prop")
            # assignments at the eliminated variable no longer need a value
            if bad_count.pop(var, None) is not None and not bad_count:
                self.push(m, "prop")
