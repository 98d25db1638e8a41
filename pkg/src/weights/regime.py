"""
强弱区分类
判断 ∫_1^∞ du/w 是否收敛，并在强区检查 t -> w(t)^ρ I(t) 的单调性
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional

import numpy as np

from ..utils.console import log_warning
from ..utils.errors import TailCertificationError
from .base import WeightFunction
from .builtin import ExpShifted, Linear, Power

RHO_TOLERANCE = 1e-9
RHO_SEARCH_DEPTH = 10


class Regime(str, Enum):
    WEAK = "weak"
    STRONG = "strong"


@dataclass(frozen=True)
class RhoCondition:
    """ρ 单调性条件的检查结果"""
    rho: float
    verified: bool
    grid_max_violation: float

    def to_dict(self) -> Dict[str, Any]:
        return {"rho": self.rho, "verified": self.verified, "grid_max_violation": self.grid_max_violation}


@dataclass(frozen=True)
class RegimeReport:
    """权重函数的分类报告"""
    regime: Regime
    tail_integral_at_1: float
    rho_condition: Optional[RhoCondition] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "regime": self.regime.value,
            "tail_integral_at_1": self.tail_integral_at_1,
            "rho_condition": self.rho_condition.to_dict() if self.rho_condition else None,
        }

    def rows(self) -> List[tuple]:
        """用于表格打印的行"""
        rows = [("regime", self.regime.value), ("I(1)", self.tail_integral_at_1)]
        if self.rho_condition:
            rows += [
                ("rho", self.rho_condition.rho),
                ("verified", self.rho_condition.verified),
                ("grid_max_violation", self.rho_condition.grid_max_violation),
            ]
        return rows


def default_grid() -> np.ndarray:
    """默认检查网格 {1, 1.5, ..., 50}"""
    return np.linspace(1.0, 50.0, 99)


def monotonicity_violation(w: WeightFunction, rho: float, grid: Iterable[float]) -> float:
    """
    计算 f(t) = w(t)^ρ I(t) 在网格上的最大相对增量

    Returns:
        max_k (f(t_{k+1}) - f(t_k)) / f(t_k) 与 0 的较大者；非增时为 0
    """
    values = []
    for t in grid:
        t = float(t)
        values.append(w(t) ** rho * w.tail_integral(t))
    worst = 0.0
    for left, right in zip(values, values[1:]):
        if not (math.isfinite(left) and math.isfinite(right)):
            return math.inf
        if left > 0:
            worst = max(worst, (right - left) / left)
    return worst


def _rho_candidates(w: WeightFunction) -> List[float]:
    if isinstance(w, Power):
        return [(w.a - 1.0) / w.a]
    if isinstance(w, ExpShifted):
        return [1.0]
    return [2.0 ** -k for k in range(RHO_SEARCH_DEPTH + 1)]


def classify_regime(w: WeightFunction, grid: Optional[Iterable[float]] = None,
                    tolerance: float = RHO_TOLERANCE) -> RegimeReport:
    """
    分类权重函数

    Args:
        w: 权重函数
        grid: ρ 条件的检查网格
        tolerance: 网格上允许的相对增量（舍入误差）

    Returns:
        RegimeReport；仅在强区填写 rho_condition
    """
    if isinstance(w, Linear) or not w.tail_converges():
        return RegimeReport(Regime.WEAK, math.inf, None)

    try:
        tail_at_1 = w.tail_integral(1.0)
    except TailCertificationError as e:
        log_warning("Regime", f"{w.describe()} 声明收敛但尾积分无法认证: {e}")
        return RegimeReport(Regime.STRONG, math.nan, RhoCondition(math.nan, False, math.inf))

    grid = list(default_grid() if grid is None else grid)
    best: Optional[RhoCondition] = None
    for rho in _rho_candidates(w):
        try:
            violation = monotonicity_violation(w, rho, grid)
        except TailCertificationError:
            violation = math.inf
        condition = RhoCondition(rho, violation <= tolerance, violation)
        if condition.verified:
            return RegimeReport(Regime.STRONG, tail_at_1, condition)
        best = condition

    # 没有候选通过时报告最后（最小）的 ρ，结论为不确定
    return RegimeReport(Regime.STRONG, tail_at_1, best)
