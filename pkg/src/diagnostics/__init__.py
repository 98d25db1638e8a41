"""
诊断模块
两顶点过程的泛函序列、路径恒等式、鞅检验与 Z 的终值分布
"""

from .checks import (
    CheckResult,
    CheckpointSamples,
    EnvelopeResult,
    MartingaleReport,
    checkpoint_checks,
    checkpoint_samples,
    decomposition_residual,
    domination_ratio,
    envelope_checks,
    martingale_checks,
    pathwise_checks,
    ratio_series,
    stochastic_integrals,
)
from .limits import (
    AtomDiagnostics,
    ZLimitReport,
    atom_diagnostics,
    plateau_reached,
    replica_limit,
    require_strong,
    simulate_two_vertex,
    z_limit_samples,
)
from .series import (
    SERIES_HEADER,
    DiagnosticPoint,
    DiagnosticSeries,
    compute_series,
    functionals_at,
    terminal_z,
)

__all__ = [
    "CheckResult",
    "CheckpointSamples",
    "EnvelopeResult",
    "MartingaleReport",
    "checkpoint_checks",
    "checkpoint_samples",
    "decomposition_residual",
    "domination_ratio",
    "envelope_checks",
    "martingale_checks",
    "pathwise_checks",
    "ratio_series",
    "stochastic_integrals",
    "AtomDiagnostics",
    "ZLimitReport",
    "atom_diagnostics",
    "plateau_reached",
    "replica_limit",
    "require_strong",
    "simulate_two_vertex",
    "z_limit_samples",
    "SERIES_HEADER",
    "DiagnosticPoint",
    "DiagnosticSeries",
    "compute_series",
    "functionals_at",
    "terminal_z",
]
