"""
两顶点轨迹上的泛函序列
W、H、Z、M、A、⟨M⟩、α、β 在每个跳跃时刻（以及可选的均匀网格）上逐段精确计算
"""

import bisect
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..process.vertex_set import VertexSet
from ..state.state import Trajectory
from ..utils.errors import ConfigurationError, TimeRangeError
from ..utils.serialization import write_csv
from ..weights.base import WeightFunction

SERIES_HEADER = ["t", "W0", "W1", "H", "Z", "M", "A", "angleM", "alpha", "beta", "grid"]
FIELDS = ("t", "X", "L0", "L1", "W0", "W1", "H", "Z", "M", "A", "angleM", "alpha", "beta")


@dataclass(frozen=True)
class DiagnosticPoint:
    """某一时刻的全部泛函值"""
    t: float
    X: int
    L0: float
    L1: float
    W0: float
    W1: float
    H: float
    Z: float
    M: float
    A: float
    angleM: float
    alpha: float
    beta: float

    @property
    def Lambda(self) -> float:
        """Λ_t = 1{X=0}W1 + 1{X=1}W0"""
        return self.W1 if self.X == 0 else self.W0

    @property
    def Pi(self) -> float:
        """Π_t = 1{X=0}W1 - 1{X=1}W0"""
        return self.W1 if self.X == 0 else -self.W0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def check_two_vertex(trajectory: Trajectory):
    """轨迹必须在 {0,1} 上"""
    vertex_set = VertexSet.from_dict(trajectory.vertex_set)
    if (vertex_set.lo, vertex_set.hi) != (0, 1):
        raise ConfigurationError(f"诊断需要顶点集 {{0,1}}，收到 {vertex_set}")


def make_point(weight: WeightFunction, t: float, X: int, L0: float, L1: float,
               drift: float, bracket: float, with_alpha: bool) -> DiagnosticPoint:
    """
    由局部时间和两个累积积分构造泛函值

    drift = ∫_0^t Π_u du，bracket = ∫_0^t Λ_u du
    """
    beta = weight.reciprocal(L0) * weight.reciprocal(L1)
    H = weight.head_integral(L0) - weight.head_integral(L1)
    alpha = weight.tail_integral(L0, 3.0) + weight.tail_integral(L1, 3.0) if with_alpha else math.nan
    return DiagnosticPoint(
        t=t, X=X, L0=L0, L1=L1, W0=weight(L0), W1=weight(L1),
        H=H, Z=H - X * beta, M=X - drift, A=-beta,
        angleM=bracket, alpha=alpha, beta=beta,
    )


def _walk(trajectory: Trajectory, weight: WeightFunction, grid: Sequence[float],
          with_alpha: bool) -> Iterator[Tuple[DiagnosticPoint, bool]]:
    index = trajectory.index
    vertices = index.vertices
    local = [trajectory.initial.get(0), trajectory.initial.get(1)]
    drift = bracket = 0.0
    g = 0
    yield make_point(weight, 0.0, vertices[0], local[0], local[1], drift, bracket, with_alpha), False

    n = len(vertices)
    for k in range(n):
        x = vertices[k]
        start, end = index.starts[k], index.end(k)
        # 逗留期间另一个顶点的局部时间冻结
        rate = weight(local[1 - x])
        sign = 1.0 if x == 0 else -1.0
        base_local, base_drift, base_bracket = local[x], drift, bracket

        while g < len(grid) and grid[g] <= start:
            g += 1
        while g < len(grid) and grid[g] < end:
            dt = grid[g] - start
            local[x] = base_local + dt
            yield make_point(weight, grid[g], x, local[0], local[1],
                             base_drift + sign * rate * dt, base_bracket + rate * dt, with_alpha), True
            g += 1

        dt = end - start
        local[x] = base_local + dt
        drift = base_drift + sign * rate * dt
        bracket = base_bracket + rate * dt
        if k + 1 < n:
            yield make_point(weight, end, vertices[k + 1], local[0], local[1], drift, bracket, with_alpha), False
        elif end > start:
            yield make_point(weight, end, x, local[0], local[1], drift, bracket, with_alpha), False


@dataclass
class DiagnosticSeries:
    """
    泛函序列

    每一列是 numpy 数组；跳跃时刻的样本取跳跃之后的值（右连续），grid 标记网格样本。
    """
    t: np.ndarray
    X: np.ndarray
    L0: np.ndarray
    L1: np.ndarray
    W0: np.ndarray
    W1: np.ndarray
    H: np.ndarray
    Z: np.ndarray
    M: np.ndarray
    A: np.ndarray
    angleM: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    grid: np.ndarray
    weight: WeightFunction
    horizon: float
    with_alpha: bool = True

    def __len__(self) -> int:
        return len(self.t)

    def point(self, k: int) -> DiagnosticPoint:
        return DiagnosticPoint(*(getattr(self, name)[k].item() for name in FIELDS))

    def at(self, t: float) -> DiagnosticPoint:
        """
        任意时刻的精确值（从前一个样本沿线性段外推）

        Raises:
            TimeRangeError: t 不在 [0, horizon]
        """
        if not 0.0 <= t <= self.horizon:
            raise TimeRangeError(f"查询时间 t={t!r} 超出 [0, {self.horizon!r}]")
        k = bisect.bisect_right(self.t, t) - 1
        x = int(self.X[k])
        dt = t - float(self.t[k])
        rate = float(self.W1[k] if x == 0 else self.W0[k])
        sign = 1.0 if x == 0 else -1.0
        local = [float(self.L0[k]), float(self.L1[k])]
        local[x] += dt
        drift = (x - float(self.M[k])) + sign * rate * dt
        bracket = float(self.angleM[k]) + rate * dt
        return make_point(self.weight, t, x, local[0], local[1], drift, bracket, self.with_alpha)

    def jump_indices(self) -> np.ndarray:
        """跳跃时刻样本的位置"""
        changed = np.flatnonzero(self.X[1:] != self.X[:-1]) + 1
        return changed[~self.grid[changed]]

    def ratio(self) -> np.ndarray:
        return np.minimum(self.W0, self.W1) / np.maximum(self.W0, self.W1)

    def rows(self) -> List[tuple]:
        return [
            (self.t[k], self.W0[k], self.W1[k], self.H[k], self.Z[k], self.M[k], self.A[k],
             self.angleM[k], self.alpha[k], self.beta[k], bool(self.grid[k]))
            for k in range(len(self))
        ]

    def to_csv(self, filepath: str):
        """导出 t,W0,W1,H,Z,M,A,angleM,alpha,beta,grid"""
        write_csv(filepath, SERIES_HEADER, self.rows())


def compute_series(trajectory: Trajectory, weight: WeightFunction,
                   grid_step: Optional[float] = None) -> DiagnosticSeries:
    """
    计算两顶点轨迹的泛函序列

    Args:
        trajectory: {0,1} 上的轨迹
        weight: 权重函数
        grid_step: 额外均匀网格的步长

    Returns:
        DiagnosticSeries；∫1/w³ 发散时 alpha 列为 NaN
    """
    check_two_vertex(trajectory)
    if grid_step is not None and not grid_step > 0:
        raise ConfigurationError(f"grid_step 必须 > 0，收到 {grid_step!r}")
    grid = np.arange(grid_step, trajectory.horizon, grid_step).tolist() if grid_step else []
    with_alpha = weight.tail_converges(3.0)

    points: List[DiagnosticPoint] = []
    flags: List[bool] = []
    for point, is_grid in _walk(trajectory, weight, grid, with_alpha):
        points.append(point)
        flags.append(is_grid)

    columns = {name: np.array([getattr(p, name) for p in points]) for name in FIELDS}
    columns["X"] = columns["X"].astype(int)
    return DiagnosticSeries(
        **columns,
        grid=np.array(flags, dtype=bool),
        weight=weight,
        horizon=trajectory.horizon,
        with_alpha=with_alpha,
    )


def functionals_at(trajectory: Trajectory, weight: WeightFunction, t: float) -> DiagnosticPoint:
    """单个时刻的泛函值"""
    trajectory.check_time(t)
    return compute_series(trajectory, weight).at(t)


def terminal_z(trajectory: Trajectory, weight: WeightFunction) -> float:
    """Z 在终止时间的值，只依赖 L(0, T)、L(1, T) 和 X_T"""
    T = trajectory.horizon
    L0, L1 = trajectory.local_time(0, T), trajectory.local_time(1, T)
    X = trajectory.position(T)
    H = weight.head_integral(L0) - weight.head_integral(L1)
    return H - X * weight.reciprocal(L0) * weight.reciprocal(L1)
