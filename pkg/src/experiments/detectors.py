"""
轨迹检测器
局部化、常返与瞬移特征
"""

import bisect
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from ..state.state import Trajectory


@dataclass
class LocalizationVerdict:
    localized: bool
    center: Optional[int]
    side_plateau: bool
    degenerate: bool = False
    window_vertices: List[int] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "localized": self.localized,
            "center": self.center,
            "side_plateau": self.side_plateau,
            "degenerate": self.degenerate,
        }


def detect_localization(trajectory: Trajectory, window_fraction: float = 0.5,
                        side_tolerance: float = 0.05, center_growth: float = 0.5) -> LocalizationVerdict:
    """
    最后 window_fraction 的时间窗内是否恰好只碰到三个相邻顶点

    Args:
        trajectory: ℤ 上的轨迹
        window_fraction: 时间窗占终止时间的比例
        side_tolerance: 两侧顶点在窗内的局部时间增量上限（相对窗口起点的值）
        center_growth: 中心顶点在窗内的局部时间增量下限（相对窗口长度）

    Returns:
        LocalizationVerdict；窗内没有跳跃时记为退化并判为未局部化
    """
    T = trajectory.horizon
    window_start = (1.0 - window_fraction) * T
    first = bisect.bisect_right(trajectory.jump_times(), window_start)
    window_events = trajectory.events[first:]
    if not window_events:
        return LocalizationVerdict(False, trajectory.position(T), False, degenerate=True,
                                   window_vertices=[trajectory.position(T)])

    touched = sorted({e.source for e in window_events} | {e.target for e in window_events})
    growth = {x: trajectory.local_time(x, T) - trajectory.local_time(x, window_start) for x in touched}
    center = max(touched, key=lambda x: (growth[x], -abs(x)))
    localized = len(touched) == 3 and touched[2] - touched[0] == 2

    side_plateau = False
    if localized:
        sides = (center - 1, center + 1)
        sides_flat = all(growth.get(x, 0.0) < side_tolerance * trajectory.local_time(x, window_start)
                         for x in sides)
        side_plateau = sides_flat and growth[center] > center_growth * (T - window_start)
    return LocalizationVerdict(localized, center, side_plateau, window_vertices=touched)


def entry_times(trajectory: Trajectory) -> Dict[int, List[float]]:
    """每个顶点被进入的时刻（升序）"""
    entries: Dict[int, List[float]] = {}
    for event in trajectory.events:
        entries.setdefault(event.target, []).append(event.tau)
    return entries


def visits(trajectory: Trajectory, x: int, t: float, entries: Optional[Dict[int, List[float]]] = None) -> int:
    """[0, t] 内访问 x 的次数（起点算一次）"""
    entries = entries if entries is not None else entry_times(trajectory)
    return bisect.bisect_right(entries.get(x, []), t) + (1 if trajectory.start == x else 0)


@dataclass
class RecurrenceVerdict:
    recurrent: bool
    visits: Dict[int, List[int]] = field(default_factory=dict)
    min_local_times: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"recurrent": self.recurrent, "visits": self.visits, "min_local_times": self.min_local_times}


def _increasing(values: Sequence[float]) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


def detect_recurrence(trajectory: Trajectory, probes: Sequence[int] = tuple(range(-3, 4)),
                      checkpoint_fractions: Sequence[float] = (0.25, 0.5, 1.0)) -> RecurrenceVerdict:
    """
    探测集合上访问次数与最小局部时间是否在各检查时刻严格递增
    """
    T = trajectory.horizon
    checkpoints = [f * T for f in checkpoint_fractions]
    entries = entry_times(trajectory)
    table = {x: [visits(trajectory, x, t, entries) for t in checkpoints] for x in probes}
    minima = [min(trajectory.local_time(x, t) for x in probes) for t in checkpoints]
    recurrent = all(_increasing(counts) for counts in table.values()) and _increasing(minima)
    return RecurrenceVerdict(recurrent, table, minima)


@dataclass
class TransientVerdict:
    signature: bool
    last_visit_to_start: float
    displacement_growing: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "signature": self.signature,
            "last_visit_to_start": self.last_visit_to_start,
            "displacement_growing": self.displacement_growing,
        }


def transient_signature(trajectory: Trajectory, early_fraction: float = 0.1,
                        window_fraction: float = 0.5) -> TransientVerdict:
    """
    瞬移特征：最后一次在起点出现于前 early_fraction 的时间内，且最大位移在最后时间窗内仍在增长
    """
    T = trajectory.horizon
    start = trajectory.start
    if trajectory.position(T) == start:
        last_visit = T
    else:
        leaving = [e.tau for e in trajectory.events if e.source == start]
        last_visit = leaving[-1] if leaving else 0.0

    window_start = (1.0 - window_fraction) * T
    before = after = 0
    for event in trajectory.events:
        distance = abs(event.target - start)
        if event.tau <= window_start:
            before = max(before, distance)
        after = max(after, distance)
    growing = after > before
    return TransientVerdict(last_visit <= early_fraction * T and growing, last_visit, growing)
