"""Satisfiability-conserving variable elimination for binary constraint
networks: five elimination rules with definitional checkers and
incremental fixpoint engines, arc consistency, neighbourhood
substitution, solution reconstruction, a MAC solver with restarts, and
verification oracles.
"""

from .consistency import (CAUSE_AC, CAUSE_ELIM, CAUSE_NS, Deletion,
                          NotArcConsistentError, eliminate_singletons,
                          eliminate_variable, enforce_ac, is_arc_consistent,
                          ns_fixpoint)
from .engines import (ENGINES, Engine, EngineAudit, check_engine_precondition,
                      run_engine)
from .model import (FormatError, Instance, build_instance, format_instance,
                    iter_bits, load_instance, parse_instance, save_instance)
from .oracle import (GeneratorConfig, SizeGuardExceeded, are_isomorphic,
                     brute_force_solve, count_solutions, is_solution,
                     max_eliminations_by_order, naive_fixpoint,
                     random_instance, run_verification)
from .patterns import (MIN_LIVE, RULES, bt_degree, check_aebtp,
                       check_ae_broken_polyhedron, check_bt_degree_property,
                       check_de_snake, check_exists_snake, check_1fbtp,
                       check_triangle, checker_accepts,
                       enumerate_broken_triangles, is_3safe)
from .solver import (ReconstructionError, SearchConfig, TimeBudgetExceeded,
                     mac_solve, reconstruct_solution, solve_with_preprocessing)
from .trace import (TraceEntry, format_trace, make_entry, parse_trace,
                    write_trace)

__version__ = "0.1.0"

__all__ = [
    "CAUSE_AC", "CAUSE_ELIM", "CAUSE_NS", "Deletion",
    "NotArcConsistentError", "eliminate_singletons", "eliminate_variable",
    "enforce_ac", "is_arc_consistent", "ns_fixpoint",
    "ENGINES", "Engine", "EngineAudit", "check_engine_precondition",
    "run_engine",
    "FormatError", "Instance", "build_instance", "format_instance",
    "iter_bits", "load_instance", "parse_instance", "save_instance",
    "GeneratorConfig", "SizeGuardExceeded", "are_isomorphic",
    "brute_force_solve", "count_solutions", "is_solution",
    "max_eliminations_by_order", "naive_fixpoint", "random_instance",
    "run_verification",
    "MIN_LIVE", "RULES", "bt_degree", "check_aebtp",
    "check_ae_broken_polyhedron", "check_bt_degree_property",
    "check_de_snake", "check_exists_snake", "check_1fbtp", "check_triangle",
    "checker_accepts", "enumerate_broken_triangles", "is_3safe",
    "ReconstructionError", "SearchConfig", "TimeBudgetExceeded", "mac_solve",
    "reconstruct_solution", "solve_with_preprocessing",
    "TraceEntry", "format_trace", "make_entry", "parse_trace", "write_trace",
    "__version__",
]
