"""
自定义单调权重函数
包装用户提供的求值器，积分走认证数值积分
"""

import math
from typing import Any, Callable, Dict, Iterable, Optional

import numpy as np

from ..utils.errors import ConfigurationError, EvaluatorError, TailCertificationError
from .base import WeightFunction
from .quadrature import DEFAULT_TOLERANCE, certified_tail, integrate


class CustomMonotone(WeightFunction):
    """用户提供的严格递增权重函数"""

    kind = "custom"

    def __init__(self, evaluator: Callable[[float], float], converges: bool, name: str = "custom",
                 continuous: bool = True, tolerance: float = DEFAULT_TOLERANCE,
                 check_grid: Optional[Iterable[float]] = None):
        """
        初始化自定义权重

        Args:
            evaluator: t -> w(t)，在 [1, ∞) 上严格递增且 w(1) = 1
            converges: 声明 ∫_1^∞ du/w(u) 是否收敛
            name: 报告中使用的名称
            continuous: w 是否连续；不连续时诊断模块拒绝计算 A 积分
            tolerance: 积分绝对容差
            check_grid: 单调性抽样检查的网格，默认 [1, 100] 上 397 个点
        """
        self.evaluator = evaluator
        self.converges = bool(converges)
        self.name = name
        self._continuous = bool(continuous)
        self.tolerance = tolerance

        grid = np.linspace(1.0, 100.0, 397) if check_grid is None else np.asarray(list(check_grid), dtype=float)
        if not self.is_monotone_on(grid):
            raise ConfigurationError(f"自定义权重 {name} 在抽样网格上不是严格递增的")

    def _value(self, t: float) -> float:
        try:
            value = float(self.evaluator(t))
        except OverflowError:
            raise
        except Exception as e:
            raise EvaluatorError(f"自定义权重 {self.name} 在 t={t!r} 处求值失败: {e}") from e
        if math.isnan(value) or value < 1.0:
            raise EvaluatorError(f"自定义权重 {self.name} 在 t={t!r} 处返回 {value!r}，要求 w(t) >= 1")
        return value

    def is_monotone_on(self, grid: Iterable[float]) -> bool:
        """在网格上检查严格递增（溢出到 inf 的尾段视为平台，允许）"""
        values = [self(float(t)) for t in grid]
        for left, right in zip(values, values[1:]):
            if not (right > left or (math.isinf(left) and math.isinf(right))):
                return False
        return True

    @property
    def continuous(self) -> bool:
        return self._continuous

    def head_integral(self, t: float) -> float:
        self.check_domain(t)
        return integrate(self.reciprocal, 1.0, t, self.tolerance)

    def tail_integral(self, t: float, power: float = 1.0) -> float:
        """
        ∫_t^∞ du/w(u)^power

        power = 1 时按声明的收敛标志决定是否返回 inf；power > 1 时总是尝试认证。
        """
        self.check_domain(t)
        if power == 1.0 and not self.converges:
            return math.inf
        if power == 1.0:
            return certified_tail(self.reciprocal, t, self.tolerance)
        return certified_tail(lambda u: self.reciprocal(u) ** power, t, self.tolerance)

    def tail_converges(self, power: float = 1.0) -> bool:
        if power == 1.0:
            return self.converges
        try:
            self.tail_integral(1.0, power)
        except TailCertificationError:
            return False
        return True

    def to_spec(self) -> Dict[str, Any]:
        return {"kind": "custom", "name": self.name, "converges": self.converges}

    def __eq__(self, other: object) -> bool:
        return self is other

    def __hash__(self) -> int:
        return id(self)
