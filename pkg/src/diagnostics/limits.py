"""
Z 的终值分布
强区间内 Z_T 的样本、无原子诊断与局部时间平台检测
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from ..clocks.bank import ClockBank, substream_seed
from ..coupling.canonical import build_engine
from ..process.vertex_set import VertexSet
from ..state.state import InitialLocalTimes, Trajectory
from ..utils.console import log_debug
from ..utils.errors import ConfigurationError, UnsupportedOperationError
from ..weights.base import WeightFunction
from ..weights.regime import Regime, classify_regime
from .series import terminal_z

DEFAULT_NEAR_ZERO = (1e-1, 1e-2, 1e-3)


def simulate_two_vertex(weight: WeightFunction, horizon: float, seed: int, engine: str = "reference",
                        initial: Optional[InitialLocalTimes] = None) -> Trajectory:
    """{0,1} 上从 0 出发运行到 horizon"""
    simulator = build_engine(engine, weight, VertexSet.segment(0, 1), ClockBank(seed), initial=initial, start=0)
    return simulator.run(horizon=horizon)


def plateau_reached(early: float, late: float, tolerance: float = 1e-6) -> bool:
    """两个检查时刻的值在相对容差内相等"""
    return abs(late - early) <= tolerance * max(1.0, abs(late))


def replica_limit(weight: WeightFunction, horizon: float, seed: int, early_fraction: float = 0.1,
                  plateau_tolerance: float = 1e-6, engine: str = "reference") -> Dict[str, Any]:
    """
    单个副本：Z_T、min(L(0,T), L(1,T)) 以及它在 early_fraction·T 时是否已到平台
    """
    trajectory = simulate_two_vertex(weight, horizon, seed, engine)
    early_time = early_fraction * horizon
    late_min = min(trajectory.local_time(0), trajectory.local_time(1))
    early_min = min(trajectory.local_time(0, early_time), trajectory.local_time(1, early_time))
    return {
        "Z": terminal_z(trajectory, weight),
        "min_local_time": late_min,
        "plateau": plateau_reached(early_min, late_min, plateau_tolerance),
        "jumps": len(trajectory.events),
    }


@dataclass
class AtomDiagnostics:
    """无原子诊断"""
    n: int
    duplicates: int
    near_zero: Dict[str, float] = field(default_factory=dict)
    batch_ks_pvalue: float = math.nan

    @property
    def near_zero_decreasing(self) -> bool:
        values = list(self.near_zero.values())
        return all(b <= a for a, b in zip(values, values[1:]))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "duplicates": self.duplicates,
            "near_zero": self.near_zero,
            "near_zero_decreasing": self.near_zero_decreasing,
            "batch_ks_pvalue": self.batch_ks_pvalue,
        }


def atom_diagnostics(samples: Sequence[float], near_zero_eps: Sequence[float] = DEFAULT_NEAR_ZERO) -> AtomDiagnostics:
    """
    Args:
        samples: Z 的样本
        near_zero_eps: 按从大到小排列的 ε

    Returns:
        重复值个数、各 ε 下 |Z| < ε 的比例、前后两半的双样本 KS p 值
    """
    values = np.asarray(samples, dtype=float)
    if values.size < 2:
        raise ConfigurationError(f"无原子诊断至少需要 2 个样本，只有 {values.size} 个")
    ordered = np.sort(values)
    duplicates = int(np.count_nonzero(ordered[1:] == ordered[:-1]))
    near_zero = {f"{eps:g}": float(np.mean(np.abs(values) < eps)) for eps in near_zero_eps}
    half = values.size // 2
    pvalue = float(stats.ks_2samp(values[:half], values[half:], method="asymp").pvalue)
    return AtomDiagnostics(n=int(values.size), duplicates=duplicates, near_zero=near_zero, batch_ks_pvalue=pvalue)


@dataclass
class ZLimitReport:
    samples: np.ndarray
    atoms: AtomDiagnostics
    plateau_fraction: float
    horizon: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "horizon": self.horizon,
            "n": int(self.samples.size),
            "atoms": self.atoms.to_dict(),
            "plateau_fraction": self.plateau_fraction,
        }


def require_strong(weight: WeightFunction):
    if classify_regime(weight).regime is Regime.WEAK:
        raise UnsupportedOperationError(f"{weight.describe()} 属于弱区间，Z_∞ = 0 几乎必然，无原子诊断没有意义")


def z_limit_samples(weight: WeightFunction, horizon: float, n_replicas: int, seed: int,
                    near_zero_eps: Sequence[float] = DEFAULT_NEAR_ZERO, early_fraction: float = 0.1,
                    plateau_tolerance: float = 1e-6) -> ZLimitReport:
    """
    Z_horizon 的经验分布

    Raises:
        UnsupportedOperationError: 弱区间
    """
    require_strong(weight)
    records: List[Dict[str, Any]] = []
    for i in range(n_replicas):
        records.append(replica_limit(weight, horizon, substream_seed(seed, f"replica/{i}"),
                                     early_fraction, plateau_tolerance))
        if (i + 1) % 1000 == 0:
            log_debug("z_limit", f"已完成 {i + 1}/{n_replicas} 个副本")
    samples = np.array([r["Z"] for r in records])
    plateau = float(np.mean([r["plateau"] for r in records]))
    return ZLimitReport(samples=samples, atoms=atom_diagnostics(samples, near_zero_eps),
                        plateau_fraction=plateau, horizon=horizon)
