"""
规范索引时钟引擎
有向边 (i, j) 的第 γ 个时钟 χ^{(i,j)}_γ 决定从 i 到 j 的跳跃，γ = 1 + 已走过 i→j 的次数
"""

from enum import Enum
from typing import Callable, Dict, Optional, Tuple, Union

from ..clocks.bank import ClockBank
from ..process.simulator import JumpSimulator, ReferenceSimulator, StopRule
from ..process.vertex_set import VertexSet
from ..state.state import InitialLocalTimes, JumpEvent, Trajectory
from ..utils.errors import ConfigurationError, IsolatedVertexError
from ..weights.base import WeightFunction


class ClockRule(str, Enum):
    """
    未被选中方向的时钟如何延续

    LITERAL: 下一段逗留重新读取同一个 χ，不记得已经消耗的风险。
    CUMULATIVE: χ 在 i 处以 w(L(j, ·)) 的速率被消耗，剩余部分带到下一段逗留。
    """
    LITERAL = "literal"
    CUMULATIVE = "cumulative"


class CanonicalEngine(JumpSimulator):
    """
    共享 ClockBank 的规范引擎

    两个引擎注册在同一个 ClockBank 上时，在相同序号读到相同的 χ。
    """

    def __init__(self, weight: WeightFunction, vertex_set: VertexSet, bank: ClockBank,
                 initial: Optional[InitialLocalTimes] = None, start: Optional[int] = None,
                 seed: Optional[int] = None, rule: Union[ClockRule, str] = ClockRule.LITERAL):
        super().__init__(weight, vertex_set, bank, initial, start, seed)
        self.rule = ClockRule(rule)
        # CUMULATIVE 规则下每条有向边当前时钟的剩余风险
        self.residuals: Dict[Tuple[int, int], float] = {}

    @property
    def engine_name(self) -> str:
        return f"canonical_{self.rule.value}"

    def clock(self, source: int, target: int) -> float:
        """有向边当前时钟的剩余量"""
        if self.rule is ClockRule.CUMULATIVE:
            remaining = self.residuals.get((source, target))
            if remaining is not None:
                return remaining
        return self.bank.exponential((source, target), self.state.gamma(source, target))

    def propose(self) -> Tuple[float, int]:
        i = self.state.current
        neighbors = self.vertex_set.neighbors(i)
        if not neighbors:
            raise IsolatedVertexError(f"顶点 {i} 在 {self.vertex_set} 中没有邻居")
        best_wait = float("inf")
        best_target = neighbors[0]
        for j in neighbors:
            wait = self.clock(i, j) * self.weight.reciprocal(self.state.local_time(j))
            if wait < best_wait:
                best_wait, best_target = wait, j
        return best_wait, best_target

    def on_commit(self, sojourn: float, source: int, target: int):
        if self.rule is not ClockRule.CUMULATIVE:
            return
        for j in self.vertex_set.neighbors(source):
            if j == target:
                self.residuals.pop((source, j), None)
                continue
            used = sojourn * self.weight(self.state.local_time(j))
            self.residuals[(source, j)] = max(0.0, self.clock(source, j) - used)

    def gamma(self, source: int, target: int) -> int:
        return self.state.gamma(source, target)


def canonical_step(engine: CanonicalEngine) -> JumpEvent:
    """
    规范构造的一步

    逗留 = min_j χ^{(i,j)}_{γ_j} / w(L(j, τ_n))，跳到取最小值的邻居，只有走过的有向边 γ 加一。
    """
    return engine.step()


def simulate_canonical(weight: WeightFunction, vertex_set: VertexSet, bank: ClockBank,
                       rule: Union[ClockRule, str] = ClockRule.LITERAL,
                       initial: Optional[InitialLocalTimes] = None, start: Optional[int] = None,
                       horizon: Optional[float] = None, max_jumps: Optional[int] = None,
                       stop: Optional[StopRule] = None) -> Trajectory:
    engine = CanonicalEngine(weight, vertex_set, bank, initial=initial, start=start, rule=rule)
    return engine.run(horizon=horizon, max_jumps=max_jumps, stop=stop)


EngineFactory = Callable[..., JumpSimulator]

ENGINES: Dict[str, EngineFactory] = {
    "reference": ReferenceSimulator,
    "canonical_literal": lambda *args, **kwargs: CanonicalEngine(*args, rule=ClockRule.LITERAL, **kwargs),
    "canonical_cumulative": lambda *args, **kwargs: CanonicalEngine(*args, rule=ClockRule.CUMULATIVE, **kwargs),
}


def build_engine(name: str, weight: WeightFunction, vertex_set: VertexSet, bank: ClockBank,
                 initial: Optional[InitialLocalTimes] = None, start: Optional[int] = None) -> JumpSimulator:
    """
    按名称构造引擎

    Args:
        name: reference、canonical_literal 或 canonical_cumulative
    """
    factory = ENGINES.get(name)
    if factory is None:
        raise ConfigurationError(f"未知引擎: {name!r}，可选 {sorted(ENGINES)}")
    return factory(weight, vertex_set, bank, initial=initial, start=start)
