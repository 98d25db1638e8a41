"""
内置权重函数
线性、幂函数与平移指数，全部使用闭式积分
"""

import math
from typing import Any, Dict, Union

from ..schemas import WEIGHT_SPEC_ADAPTER, ExpShiftedSpec, LinearSpec, PowerSpec
from ..utils.errors import ConfigurationError
from .base import WeightFunction


class Linear(WeightFunction):
    """w(t) = t，弱强化（∫ du/w 发散）"""

    kind = "linear"

    def _value(self, t: float) -> float:
        return float(t)

    def head_integral(self, t: float) -> float:
        self.check_domain(t)
        return math.log(t)

    def tail_integral(self, t: float, power: float = 1.0) -> float:
        self.check_domain(t)
        if power <= 1:
            return math.inf
        return math.exp((1.0 - power) * math.log(t)) / (power - 1.0)

    def tail_converges(self, power: float = 1.0) -> bool:
        return power > 1

    def to_spec(self) -> Dict[str, Any]:
        return {"kind": "linear"}


class Power(WeightFunction):
    """w(t) = t^a，a > 1 时为强强化"""

    kind = "power"

    def __init__(self, a: float):
        """
        初始化幂函数权重

        Args:
            a: 指数，必须 > 0
        """
        if not (math.isfinite(a) and a > 0):
            raise ConfigurationError("exponent must be > 0")
        self.a = float(a)

    def _value(self, t: float) -> float:
        return t ** self.a

    def head_integral(self, t: float) -> float:
        self.check_domain(t)
        if self.a == 1.0:
            return math.log(t)
        k = 1.0 - self.a
        return math.expm1(k * math.log(t)) / k

    def tail_integral(self, t: float, power: float = 1.0) -> float:
        self.check_domain(t)
        e = self.a * power
        if e <= 1:
            return math.inf
        return math.exp((1.0 - e) * math.log(t)) / (e - 1.0)

    def tail_converges(self, power: float = 1.0) -> bool:
        return self.a * power > 1

    def to_spec(self) -> Dict[str, Any]:
        return {"kind": "power", "a": self.a}


class ExpShifted(WeightFunction):
    """w(t) = exp(a(t-1))，归一化使 w(1) = 1"""

    kind = "exp_shifted"

    def __init__(self, a: float):
        """
        初始化平移指数权重

        Args:
            a: 速率，必须 > 0
        """
        if not (math.isfinite(a) and a > 0):
            raise ConfigurationError("rate must be > 0")
        self.a = float(a)

    def _value(self, t: float) -> float:
        return math.exp(self.a * (t - 1.0))

    def reciprocal(self, t: float) -> float:
        # 直接计算 exp(-a(t-1))，避免 w 溢出后丢失精度
        self.check_domain(t)
        return math.exp(-self.a * (t - 1.0))

    def head_integral(self, t: float) -> float:
        self.check_domain(t)
        return -math.expm1(-self.a * (t - 1.0)) / self.a

    def tail_integral(self, t: float, power: float = 1.0) -> float:
        self.check_domain(t)
        rate = self.a * power
        return math.exp(-rate * (t - 1.0)) / rate

    def tail_converges(self, power: float = 1.0) -> bool:
        return True

    def to_spec(self) -> Dict[str, Any]:
        return {"kind": "exp_shifted", "a": self.a}


def weight_from_spec(spec: Union[Dict[str, Any], LinearSpec, PowerSpec, ExpShiftedSpec, WeightFunction]) -> WeightFunction:
    """
    由配置记录构造权重函数

    Args:
        spec: 标签记录（dict 或已校验的模式对象），已是权重函数时原样返回

    Returns:
        权重函数实例
    """
    if isinstance(spec, WeightFunction):
        return spec
    if isinstance(spec, dict):
        spec = WEIGHT_SPEC_ADAPTER.validate_python(spec)
    if isinstance(spec, LinearSpec):
        return Linear()
    if isinstance(spec, PowerSpec):
        return Power(spec.a)
    if isinstance(spec, ExpShiftedSpec):
        return ExpShifted(spec.a)
    raise ConfigurationError(f"不支持的权重类型: {spec!r}")
