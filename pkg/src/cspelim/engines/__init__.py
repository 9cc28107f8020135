"""Incremental fixpoint engines, one per elimination rule.

Engines reproduce exactly the eliminations (and traces) of the naive
smallest-index rescan, but maintain incremental tables instead of
re-running the definitional checkers after every elimination.
"""

from ..model import Instance
from ..trace import TraceEntry
from .base import (Engine, EngineAudit, FlatSet, build_vars_plus_minus,
                   check_engine_precondition, engine_step_audit)
from .snake import ExistsSnakeEngine
from .de_snake import DeSnakeEngine
from .triangle import TriangleEngine
from .bt_degree import BTDegreeEngine
from .aebtp import AEBTPEngine

ENGINES = {
    "exists-snake": ExistsSnakeEngine,
    "de-snake": DeSnakeEngine,
    "triangle": TriangleEngine,
    "bt-degree": BTDegreeEngine,
    "aebtp": AEBTPEngine,
}


def run_engine(inst: Instance, rule: str, audit: EngineAudit | None = None):
    """Run the incremental engine for `rule` on a copy of `inst` and
    return (reduced instance, trace entries).  The input must be arc
    consistent with no empty domain; engines never delete values."""
    if rule not in ENGINES:
        raise ValueError("unknown rule %r" % rule)
    check_engine_precondition(inst)
    engine = ENGINES[rule](inst.copy(), audit)
    return engine.run()
