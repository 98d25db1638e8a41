"""
耦合模块
规范时钟引擎、共享时钟耦合对、水平穿越与限制原理检查
"""

from .canonical import (
    ENGINES,
    CanonicalEngine,
    ClockRule,
    build_engine,
    canonical_step,
    simulate_canonical,
)
from .crossings import (
    Crossing,
    RhoReport,
    estimate_rho,
    hitting_time_eta,
    rho_replica,
    rho_report,
    truncated_integrand,
    run_until_level,
    xi_crossing,
    xi_profile,
)
from .pairs import PAIR_HEADER, CoupledPair, PairSequences, run_coupled_pair, two_vertex_recursion
from .restriction_check import RestrictionCheck, compare_events, restriction_check

__all__ = [
    "ENGINES",
    "CanonicalEngine",
    "ClockRule",
    "build_engine",
    "canonical_step",
    "simulate_canonical",
    "Crossing",
    "RhoReport",
    "estimate_rho",
    "hitting_time_eta",
    "rho_replica",
    "rho_report",
    "truncated_integrand",
    "run_until_level",
    "xi_crossing",
    "xi_profile",
    "PAIR_HEADER",
    "CoupledPair",
    "PairSequences",
    "run_coupled_pair",
    "two_vertex_recursion",
    "RestrictionCheck",
    "compare_events",
    "restriction_check",
]
