"""
限制原理检查
同一 ClockBank 上，完整过程在 B 内的限制与 B 上的延拓逐事件一致（直到 T_B）
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union

from ..clocks.bank import ClockBank
from ..process.restriction import restrict
from ..process.vertex_set import VertexSet
from ..state.state import InitialLocalTimes, JumpEvent
from ..weights.base import WeightFunction
from .canonical import CanonicalEngine, ClockRule

TIME_TOLERANCE = 1e-9


@dataclass
class RestrictionCheck:
    """一次限制原理比较的结果"""
    seed: int
    subset: Dict[str, Any]
    matched: bool
    n_events: int
    time_in_set: float
    max_time_rel_error: float = 0.0
    first_mismatch: Optional[int] = None
    details: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "subset": self.subset,
            "matched": self.matched,
            "n_events": self.n_events,
            "T_B": self.time_in_set,
            "max_time_rel_error": self.max_time_rel_error,
            "first_mismatch": self.first_mismatch,
        }


def relative_error(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


def compare_events(restricted: List[JumpEvent], extension: List[JumpEvent],
                   tolerance: float = TIME_TOLERANCE):
    """
    逐事件比较

    Returns:
        (首个不一致的序号或 None, 最大相对时间误差)
    """
    worst = 0.0
    for k, (a, b) in enumerate(zip(restricted, extension)):
        if (a.source, a.target) != (b.source, b.target):
            return k, worst
        err = relative_error(a.tau, b.tau)
        worst = max(worst, err)
        if err > tolerance:
            return k, worst
    if len(extension) < len(restricted):
        return len(extension), worst
    return None, worst


def restriction_check(seed: int, weight: WeightFunction, subset: VertexSet, horizon: float,
                      full_set: Optional[VertexSet] = None,
                      rule: Union[ClockRule, str] = ClockRule.CUMULATIVE,
                      initial: Optional[InitialLocalTimes] = None,
                      tolerance: float = TIME_TOLERANCE) -> RestrictionCheck:
    """
    在共享 ClockBank 上运行完整过程和 B 上的延拓，比较限制后的路径

    Args:
        seed: 主种子
        weight: 权重函数
        subset: B，必须是 full_set 的子集
        horizon: 完整过程的终止时间
        full_set: 完整过程的顶点集，默认 ℤ⁺
        rule: 规范引擎的时钟规则
        initial: 初始局部时间
        tolerance: 事件时间的相对容差

    Returns:
        RestrictionCheck
    """
    full_set = full_set or VertexSet.half_line_plus()
    bank = ClockBank(seed)
    full = CanonicalEngine(weight, full_set, bank, initial=initial, rule=rule).run(horizon=horizon)
    restricted = restrict(full, subset, full_set)
    target = restricted.trajectory.events

    extension = CanonicalEngine(weight, subset, bank, initial=initial,
                                start=restricted.trajectory.start, rule=rule)
    produced: List[JumpEvent] = [extension.step() for _ in range(len(target))]
    mismatch, worst = compare_events(target, produced, tolerance)

    details = []
    if mismatch is None:
        # 延拓在 T_B 之前不能再多出事件
        following = extension.step()
        if following.tau < restricted.time_in_set * (1.0 - tolerance):
            mismatch = len(target)
            details.append(f"延拓在 T_B={restricted.time_in_set!r} 之前多出事件 τ={following.tau!r}")
    else:
        details.append(f"第 {mismatch} 个事件不一致")

    return RestrictionCheck(
        seed=seed,
        subset=subset.to_dict(),
        matched=mismatch is None,
        n_events=len(target),
        time_in_set=restricted.time_in_set,
        max_time_rel_error=worst,
        first_mismatch=mismatch,
        details=details,
    )
