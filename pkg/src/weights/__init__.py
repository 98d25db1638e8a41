"""
权重函数模块
强化函数 w、尾积分与强弱区分类
"""

from .base import WeightFunction
from .builtin import ExpShifted, Linear, Power, weight_from_spec
from .custom import CustomMonotone
from .quadrature import certified_tail, integrate
from .regime import Regime, RegimeReport, RhoCondition, classify_regime, monotonicity_violation


def eval_w(w: WeightFunction, t: float) -> float:
    """计算 w(t)，t < 1 时抛出 WeightDomainError"""
    return w(t)


def tail_integral(w: WeightFunction, t: float, power: float = 1.0) -> float:
    """计算 I(t) = ∫_t^∞ du/w(u)^power"""
    return w.tail_integral(t, power)


def head_integral(w: WeightFunction, t: float) -> float:
    """计算 ∫_1^t du/w(u)"""
    return w.head_integral(t)


__all__ = [
    "WeightFunction",
    "Linear",
    "Power",
    "ExpShifted",
    "CustomMonotone",
    "weight_from_spec",
    "certified_tail",
    "integrate",
    "Regime",
    "RegimeReport",
    "RhoCondition",
    "classify_regime",
    "monotonicity_violation",
    "eval_w",
    "tail_integral",
    "head_integral",
]
