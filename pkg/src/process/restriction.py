"""
限制算子
只在 B 内观察过程：删去 B 外的逗留并重新计时
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional

from ..state.state import JumpEvent, Trajectory
from .vertex_set import VertexSet


@dataclass
class RestrictionResult:
    """限制后的轨迹与 B 内总时间"""
    trajectory: Trajectory
    time_in_set: float
    censored: bool

    @property
    def T_B(self) -> float:
        return self.time_in_set

    def to_dict(self) -> Dict[str, Any]:
        return {
            "T_B": self.time_in_set,
            "censored": self.censored,
            "n_events": len(self.trajectory.events),
        }


def restrict(trajectory: Trajectory, subset: VertexSet,
             full_set: Optional[VertexSet] = None) -> RestrictionResult:
    """
    时间变换 δ^B(u) = inf{t : ∫₀^t 1{X_s ∈ B} ds = u}

    B 内部的跳跃保留为事件，时间改为 B 内时钟；离开 B 再回来不产生事件，
    因为在连通集上回来的顶点就是离开时的边界顶点。

    Args:
        trajectory: 完整轨迹
        subset: 观察集合 B
        full_set: 完整轨迹的顶点集，默认读取轨迹元数据

    Returns:
        RestrictionResult；有限终止时间下 T_B 只是下界，censored 标记这一点
    """
    index = trajectory.index
    full_set = full_set or VertexSet.from_dict(trajectory.vertex_set)
    elapsed = 0.0
    start: Optional[int] = None
    events: List[JumpEvent] = []

    for k, x in enumerate(index.vertices):
        if k > 0:
            previous = index.vertices[k - 1]
            if previous in subset and x in subset:
                events.append(JumpEvent(elapsed, previous, x))
        if x in subset:
            if start is None:
                start = x
            elapsed += index.end(k) - index.starts[k]

    restricted = Trajectory(
        events=events,
        horizon=elapsed,
        start=subset.start_vertex() if start is None else start,
        initial=trajectory.initial,
        vertex_set=subset.to_dict(),
        weight=trajectory.weight,
        engine=trajectory.engine,
        seed=trajectory.seed,
        config_digest=trajectory.config_digest,
        truncated=trajectory.truncated,
    )
    return RestrictionResult(
        trajectory=restricted,
        time_in_set=elapsed,
        censored=not full_set.is_subset_of(subset),
    )
