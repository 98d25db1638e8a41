"""
实验模块
蒙特卡洛副本系综、检测器、统计检验与判定
"""

from .base_experiment import BaseExperiment, FractionExperiment, Summary
from .detectors import (
    LocalizationVerdict,
    RecurrenceVerdict,
    TransientVerdict,
    detect_localization,
    detect_recurrence,
    entry_times,
    transient_signature,
    visits,
)
from .harness import (
    EXIT_CONFIG,
    EXIT_FAIL,
    EXIT_PASS,
    Verdict,
    load_verdict,
    replica_table,
    run_experiment,
    verify_verdict,
)
from .kinds import KINDS, build_experiment
from .stats import KSResult, binomial_ci, ks_exponential, ks_two_sample, mean_stderr

__all__ = [
    "BaseExperiment",
    "FractionExperiment",
    "Summary",
    "LocalizationVerdict",
    "RecurrenceVerdict",
    "TransientVerdict",
    "detect_localization",
    "detect_recurrence",
    "entry_times",
    "transient_signature",
    "visits",
    "EXIT_CONFIG",
    "EXIT_FAIL",
    "EXIT_PASS",
    "Verdict",
    "load_verdict",
    "replica_table",
    "run_experiment",
    "verify_verdict",
    "KINDS",
    "build_experiment",
    "KSResult",
    "binomial_ci",
    "ks_exponential",
    "ks_two_sample",
    "mean_stderr",
]
