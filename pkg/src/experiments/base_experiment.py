"""
实验基类
定义所有蒙特卡洛实验的基础接口
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from ..clocks.bank import ClockBank
from ..coupling.canonical import build_engine
from ..process.vertex_set import VertexSet
from ..schemas.schemas import ExperimentConfig
from ..state.state import Trajectory
from ..utils.console import log_debug, log_error, log_info
from ..weights.base import WeightFunction
from ..weights.builtin import weight_from_spec
from .stats import binomial_ci

Record = Dict[str, Any]


@dataclass
class Summary:
    """系综统计量与判定"""
    statistic: float
    threshold: float
    direction: str
    passed: bool
    ci: Optional[Tuple[float, float]] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "statistic": self.statistic,
            "threshold": self.threshold,
            "direction": self.direction,
            "pass": self.passed,
            "ci": list(self.ci) if self.ci is not None else None,
            "details": self.details,
        }


def ok_records(records: List[Record]) -> List[Record]:
    """去掉出错的副本记录"""
    return [r for r in records if "error" not in r]


class BaseExperiment(ABC):
    """实验基类"""

    kind = ""

    def __init__(self, config: ExperimentConfig, experiment_name: str = ""):
        """
        初始化实验

        Args:
            config: 已补齐缺省值的实验配置
            experiment_name: 实验名称
        """
        self.config = config
        self.experiment_name = experiment_name or self.__class__.__name__
        self.weight: WeightFunction = weight_from_spec(config.weight)
        self.vertex_set = VertexSet.from_dict(config.graph)

    @abstractmethod
    def run_replica(self, index: int, seed: int) -> Record:
        """
        运行单个副本

        Args:
            index: 副本序号
            seed: 副本种子 substream_seed(master, "replica/index")

        Returns:
            可写入 CSV 的副本记录
        """
        pass

    @abstractmethod
    def summarize(self, records: List[Record]) -> Summary:
        """
        由副本记录计算系综统计量

        Args:
            records: 按序号排列的副本记录

        Returns:
            Summary；只依赖 records，因此可以从 Verdict 中复算
        """
        pass

    def validate_input(self):
        """检查配置与实验类型是否相容，不相容时抛出 ConfigurationError"""
        pass

    def simulate(self, seed: int, vertex_set: Optional[VertexSet] = None, engine: Optional[str] = None,
                 start: Optional[int] = None) -> Trajectory:
        """按配置的引擎、终止时间与跳跃上限运行一条轨迹"""
        simulator = build_engine(engine or self.config.engine, self.weight, vertex_set or self.vertex_set,
                                 ClockBank(seed), start=start)
        return simulator.run(horizon=self.config.horizon, max_jumps=self.config.max_jumps)

    def compare(self, statistic: float) -> bool:
        if self.config.direction == "max":
            return statistic <= self.config.threshold
        return statistic >= self.config.threshold

    def log_info(self, message: str):
        """记录信息日志"""
        log_info(self.experiment_name, message)

    def log_debug(self, message: str):
        log_debug(self.experiment_name, message)

    def log_error(self, message: str):
        """记录错误日志"""
        log_error(self.experiment_name, message)


class FractionExperiment(BaseExperiment):
    """每个副本给出一个 success 布尔值，统计量为成功比例"""

    def extra_checks(self, records: List[Record]) -> Dict[str, bool]:
        """比例之外必须同时满足的条件"""
        return {}

    def summarize(self, records: List[Record]) -> Summary:
        n = len(records)
        successes = sum(1 for r in ok_records(records) if r.get("success"))
        fraction = successes / n if n else 0.0
        extra = self.extra_checks(records)
        passed = self.compare(fraction) and all(extra.values())
        return Summary(
            statistic=fraction,
            threshold=self.config.threshold,
            direction=self.config.direction,
            passed=passed,
            ci=binomial_ci(successes, n) if n else None,
            details={"successes": successes, "errors": n - len(ok_records(records)), **extra},
        )
