"""测试公共设置：--runslow 选项与常用轨迹夹具"""

from typing import List, Sequence, Tuple

import pytest

from src.state import InitialLocalTimes, JumpEvent, Trajectory


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="运行完整规模的验收测试")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="需要 --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def make_trajectory(jumps: Sequence[Tuple[float, int, int]], horizon: float, start: int = 0,
                    initial: InitialLocalTimes = None, vertex_set: dict = None) -> Trajectory:
    events: List[JumpEvent] = [JumpEvent(tau, source, target) for tau, source, target in jumps]
    return Trajectory(
        events=events,
        horizon=horizon,
        start=start,
        initial=initial or InitialLocalTimes(),
        vertex_set=vertex_set or {"kind": "full_line"},
    )


def unit_path(path: Sequence[int], sojourn: float = 1.0) -> List[Tuple[float, int, int]]:
    """按顶点序列构造等长逗留的跳跃表"""
    return [((k + 1) * sojourn, a, b) for k, (a, b) in enumerate(zip(path, path[1:]))]


@pytest.fixture
def canary_trajectory() -> Trajectory:
    """{0,1} 上两次跳跃的小轨迹"""
    return make_trajectory([(0.5, 0, 1), (1.2, 1, 0)], horizon=2.0,
                           vertex_set={"kind": "segment", "lo": 0, "hi": 1})
