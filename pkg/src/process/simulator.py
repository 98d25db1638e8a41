"""
事件驱动模拟器
模拟器基类与无记忆参考引擎（每段逗留为每个邻居抽取新的指数时钟）
"""

import math
from abc import ABC, abstractmethod
from typing import Callable, List, Optional, Protocol, Tuple

from ..clocks.bank import BankSupplier, ClockBank
from ..state.state import InitialLocalTimes, JumpEvent, ProcessState, Trajectory
from ..utils.errors import ConfigurationError, ExplosionError, IsolatedVertexError
from ..weights.base import WeightFunction
from .vertex_set import VertexSet

DEFAULT_MAX_JUMPS = 50_000_000

StopRule = Callable[[ProcessState], bool]


class ExponentialSupplier(Protocol):
    """按有向边提供 Exp(1) 的对象"""

    def draw(self, edge: Tuple[int, int]) -> float:
        ...


def apply_jump(state: ProcessState, sojourn: float, target: int) -> JumpEvent:
    """
    把一次跳跃写入状态：当前顶点停留 sojourn，γ(i, target) 加一，然后移动

    Raises:
        ExplosionError: sojourn 不能推进时间
    """
    source = state.current
    before = state.clock_time
    if not (sojourn > 0.0 and math.isfinite(sojourn) and before + sojourn > before):
        raise ExplosionError(
            f"在 t={before!r} 的顶点 {source} 处逗留时间为 {sojourn!r}，时间无法推进")
    state.advance(sojourn)
    state.jump_counters[(source, target)] = state.gamma(source, target) + 1
    state.move(target)
    return JumpEvent(state.clock_time, source, target)


def reference_propose(state: ProcessState, weight: WeightFunction, vertex_set: VertexSet,
                      supplier: ExponentialSupplier) -> Tuple[float, int]:
    """
    竞争时钟：对每个集合内邻居 j 抽取 χ_j，等待 χ_j / w(L(j, t))，取最小者

    Returns:
        (逗留时间, 目标顶点)
    """
    i = state.current
    neighbors = vertex_set.neighbors(i)
    if not neighbors:
        raise IsolatedVertexError(f"顶点 {i} 在 {vertex_set} 中没有邻居")
    best_wait = math.inf
    best_target = neighbors[0]
    for j in neighbors:
        wait = supplier.draw((i, j)) * weight.reciprocal(state.local_time(j))
        if wait < best_wait:
            best_wait, best_target = wait, j
    return best_wait, best_target


def step(state: ProcessState, weight: WeightFunction, vertex_set: VertexSet,
         supplier: ExponentialSupplier) -> Tuple[ProcessState, JumpEvent]:
    """
    参考规则下的一步（原地更新 state）

    Returns:
        (更新后的状态, 跳跃事件)
    """
    sojourn, target = reference_propose(state, weight, vertex_set, supplier)
    event = apply_jump(state, sojourn, target)
    return state, event


class JumpSimulator(ABC):
    """
    最近邻跳跃过程模拟器基类

    子类实现 propose() 给出下一段逗留和目标；提交、截断与停止规则在这里统一处理。
    """

    engine_name = ""

    def __init__(self, weight: WeightFunction, vertex_set: VertexSet, bank: ClockBank,
                 initial: Optional[InitialLocalTimes] = None, start: Optional[int] = None,
                 seed: Optional[int] = None):
        """
        初始化模拟器

        Args:
            weight: 权重函数
            vertex_set: 顶点集（至少两个顶点）
            bank: 时钟库
            initial: 初始局部时间，默认 ℓ ≡ 1
            start: 起点，默认按三种情形规则确定
            seed: 记录在轨迹中的种子，默认取时钟库主种子
        """
        self.weight = weight
        self.vertex_set = vertex_set
        self.bank = bank
        self.initial = initial or InitialLocalTimes()
        self.start = vertex_set.start_vertex() if start is None else start
        if self.start not in vertex_set:
            raise ConfigurationError(f"起点 {self.start} 不在顶点集 {vertex_set} 中")
        self.seed = bank.master_seed if seed is None else seed
        self.state = ProcessState(current=self.start, initial=self.initial)
        self.events: List[JumpEvent] = []
        self.name = self.__class__.__name__
        self._closed = False

    @abstractmethod
    def propose(self) -> Tuple[float, int]:
        """
        给出当前顶点的逗留时间和跳跃目标

        Returns:
            (逗留时间, 目标顶点)
        """
        pass

    def on_commit(self, sojourn: float, source: int, target: int):
        """提交跳跃前的引擎钩子（状态仍是跳跃前的）"""
        pass

    def commit(self, sojourn: float, target: int) -> JumpEvent:
        self.on_commit(sojourn, self.state.current, target)
        event = apply_jump(self.state, sojourn, target)
        self.events.append(event)
        return event

    def step(self) -> JumpEvent:
        """推进一次跳跃"""
        if self._closed:
            raise ConfigurationError(f"{self.name} 已在终止时间截断，不能继续推进")
        sojourn, target = self.propose()
        return self.commit(sojourn, target)

    def local_time(self, x: int) -> float:
        return self.state.local_time(x)

    def run(self, horizon: Optional[float] = None, max_jumps: Optional[int] = None,
            stop: Optional[StopRule] = None) -> Trajectory:
        """
        运行到终止时间、跳跃数上限或停止规则满足为止

        Args:
            horizon: 终止时间 T；最后一段逗留在 T 处截断
            max_jumps: 跳跃数上限；与 horizon 同时给出时作为防爆保护
            stop: 每次跳跃后检查的停止规则

        Returns:
            轨迹；若在 T 之前触及 max_jumps 则 truncated = True
        """
        if horizon is None and max_jumps is None and stop is None:
            raise ConfigurationError("必须给出 horizon、max_jumps 或停止规则之一")
        if horizon is not None and not horizon > 0:
            raise ConfigurationError(f"horizon 必须 > 0，收到 {horizon!r}")
        if max_jumps is not None and max_jumps < 1:
            raise ConfigurationError(f"max_jumps 必须 >= 1，收到 {max_jumps!r}")
        limit = max_jumps if max_jumps is not None else DEFAULT_MAX_JUMPS

        truncated = False
        reached_horizon = False
        while True:
            if len(self.events) >= limit:
                truncated = horizon is not None
                break
            sojourn, target = self.propose()
            if horizon is not None and self.state.clock_time + sojourn > horizon:
                self.state.advance(horizon - self.state.clock_time)
                self.state.clock_time = horizon
                reached_horizon = True
                self._closed = True
                break
            self.commit(sojourn, target)
            if stop is not None and stop(self.state):
                break

        end = horizon if reached_horizon else self.state.clock_time
        return self.trajectory(end, truncated)

    def trajectory(self, horizon: Optional[float] = None, truncated: bool = False) -> Trajectory:
        """当前事件列表对应的轨迹"""
        return Trajectory(
            events=list(self.events),
            horizon=self.state.clock_time if horizon is None else horizon,
            start=self.start,
            initial=self.initial,
            vertex_set=self.vertex_set.to_dict(),
            weight=self.weight.to_spec(),
            engine=self.engine_name,
            seed=self.seed,
            truncated=truncated,
        )


class ReferenceSimulator(JumpSimulator):
    """无记忆参考引擎：每段逗留为每个邻居读取下一个未用的 χ"""

    engine_name = "reference"

    def __init__(self, weight: WeightFunction, vertex_set: VertexSet, bank: ClockBank,
                 initial: Optional[InitialLocalTimes] = None, start: Optional[int] = None,
                 seed: Optional[int] = None, supplier: Optional[ExponentialSupplier] = None):
        super().__init__(weight, vertex_set, bank, initial, start, seed)
        self.supplier = supplier or BankSupplier(bank)

    def propose(self) -> Tuple[float, int]:
        return reference_propose(self.state, self.weight, self.vertex_set, self.supplier)


def simulate(weight: WeightFunction, vertex_set: VertexSet, bank: ClockBank,
             initial: Optional[InitialLocalTimes] = None, start: Optional[int] = None,
             horizon: Optional[float] = None, max_jumps: Optional[int] = None,
             stop: Optional[StopRule] = None) -> Trajectory:
    """
    用参考引擎模拟 VRJP(ℓ, w)

    Args:
        weight: 权重函数
        vertex_set: 顶点集
        bank: 时钟库
        initial: 初始局部时间
        start: 起点，默认按三种情形规则
        horizon: 终止时间
        max_jumps: 跳跃数上限
        stop: 停止规则

    Returns:
        轨迹
    """
    simulator = ReferenceSimulator(weight, vertex_set, bank, initial=initial, start=start)
    return simulator.run(horizon=horizon, max_jumps=max_jumps, stop=stop)


def local_time(trajectory: Trajectory, x: int, t: float) -> float:
    """L(x, t)，t 超出 [0, horizon] 时抛出 TimeRangeError"""
    return trajectory.local_time(x, t)
