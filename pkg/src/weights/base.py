"""
权重函数基础抽象类
定义所有强化函数 w 需要遵循的接口标准
"""

import math
from abc import ABC, abstractmethod
from typing import Any, Dict

from ..utils.errors import WeightDomainError


class WeightFunction(ABC):
    """
    强化函数 w 的基类

    只在 [1, ∞) 上定义，w(1) = 1 且严格递增。实例构造后不可变，可在多个模拟进程间共享。
    """

    kind: str = ""
    domain_floor: float = 1.0

    def __call__(self, t: float) -> float:
        """
        计算 w(t)

        Args:
            t: 局部时间，必须 >= 1

        Returns:
            w(t)，溢出时返回 inf
        """
        self.check_domain(t)
        try:
            return self._value(t)
        except OverflowError:
            return math.inf

    eval = __call__

    def check_domain(self, t: float):
        if not t >= self.domain_floor:
            raise WeightDomainError(f"{self.describe()} 只在 t >= {self.domain_floor} 上定义，收到 t = {t!r}")

    def reciprocal(self, t: float) -> float:
        """计算 1/w(t)；w 溢出时为 0"""
        return 1.0 / self(t)

    @abstractmethod
    def _value(self, t: float) -> float:
        """在定义域内计算 w(t)"""
        pass

    @abstractmethod
    def head_integral(self, t: float) -> float:
        """
        计算 ∫_1^t du/w(u)

        Args:
            t: 上限，必须 >= 1

        Returns:
            有限的积分值
        """
        pass

    @abstractmethod
    def tail_integral(self, t: float, power: float = 1.0) -> float:
        """
        计算 ∫_t^∞ du/w(u)^power

        Args:
            t: 下限，必须 >= 1
            power: 幂次 q >= 1

        Returns:
            积分值，发散时为 inf
        """
        pass

    @abstractmethod
    def tail_converges(self, power: float = 1.0) -> bool:
        """∫_1^∞ du/w(u)^power 是否收敛"""
        pass

    @property
    def continuous(self) -> bool:
        """w 是否连续（内置类型都是连续的）"""
        return True

    @abstractmethod
    def to_spec(self) -> Dict[str, Any]:
        """转换为配置文件中的标签记录"""
        pass

    def describe(self) -> str:
        spec = self.to_spec()
        params = ", ".join(f"{k}={v}" for k, v in spec.items() if k != "kind")
        return f"{spec['kind']}({params})" if params else spec["kind"]

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} {self.describe()}>"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, WeightFunction) and self.to_spec() == other.to_spec()

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.to_spec().items())))
