"""
局部时间的水平穿越
η、ξ 的精确求解，以及 ρ(a, b) 的蒙特卡洛估计
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from ..clocks.bank import ClockBank, substream_seed
from ..process.vertex_set import VertexSet
from ..state.state import InitialLocalTimes, Trajectory
from ..utils.config import resolve_seed
from ..utils.console import log_debug
from ..utils.errors import ConfigurationError
from ..weights.base import WeightFunction
from .canonical import CanonicalEngine

# L(0, ξ(a)) 的截断水平 M
DEFAULT_RHO_CAP = 100.0


@dataclass(frozen=True)
class Crossing:
    """水平穿越时间；未在终止时间前到达时 censored = True，time 为 None"""
    time: Optional[float]
    censored: bool
    other_local_time: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"time": self.time, "censored": self.censored, "other_local_time": self.other_local_time}


def hitting_time_eta(trajectory: Trajectory, vertex: int, threshold: float) -> Crossing:
    """
    inf{t : L(vertex, t) = threshold}

    逗留期间局部时间斜率为 1，在穿越所在的逗留内直接求解。

    Args:
        trajectory: 轨迹
        vertex: 顶点
        threshold: 水平，>= 1

    Returns:
        Crossing
    """
    if not threshold >= 1.0:
        raise ConfigurationError(f"水平必须 >= 1，收到 {threshold!r}")
    if trajectory.initial.get(vertex) >= threshold:
        return Crossing(0.0, False)
    index = trajectory.index
    for k in index.jumps_into(vertex):
        entry = index.entry[k]
        start = index.starts[k]
        if entry + (index.end(k) - start) >= threshold:
            return Crossing(start + (threshold - entry), False)
    return Crossing(None, True)


def xi_crossing(trajectory: Trajectory, level: float) -> Crossing:
    """
    ξ(level) = L(1, ·) 首次到达 level 的时间，同时给出 L(0, ξ(level))

    Args:
        trajectory: {0,1} 上从 0 出发的轨迹
        level: 水平，>= ℓ₁
    """
    if level < trajectory.initial.get(1):
        raise ConfigurationError(f"水平 {level!r} 低于初始局部时间 {trajectory.initial.get(1)!r}")
    hit = hitting_time_eta(trajectory, 1, level)
    if hit.censored:
        return hit
    return Crossing(hit.time, False, trajectory.local_time(0, hit.time))


def xi_profile(trajectory: Trajectory, levels: Sequence[float]) -> np.ndarray:
    """在水平网格上的 L(0, ξ(u))，未到达的水平为 NaN"""
    out = np.full(len(levels), np.nan)
    for n, u in enumerate(levels):
        crossing = xi_crossing(trajectory, float(u))
        if not crossing.censored:
            out[n] = crossing.other_local_time
    return out


def run_until_level(weight: WeightFunction, a: float, b: float, seed: int, cap: Optional[float] = None,
                    max_jumps: Optional[int] = None) -> Trajectory:
    """
    {0,1} 上 ℓ = (a, b)、从 0 出发，运行到 L(1) >= a

    强区里 L(0) 可能先爆炸而 L(1) 永远到不了 a，给出 cap 时 L(0) >= cap 也停止。
    """
    initial = InitialLocalTimes(overrides={0: a, 1: b})
    engine = CanonicalEngine(weight, VertexSet.segment(0, 1), ClockBank(seed), initial=initial, start=0)
    # 轨迹索引由 τ 的差重新累加局部时间，留出舍入余量
    target = a * (1.0 + 1e-12)
    ceiling = math.inf if cap is None else cap

    def reached(state) -> bool:
        return state.local_time(1) >= target or state.local_time(0) >= ceiling

    return engine.run(max_jumps=max_jumps, stop=reached)


@dataclass
class RhoReport:
    """ρ(a, b) 估计报告；cap 有限时估计的是截断量 ρ_M(a, b)"""
    a: float
    b: float
    n_replicas: int
    rho_hat: float
    stderr: float
    grid: List[float] = field(default_factory=list)
    lhs: float = math.nan
    rhs: float = math.nan
    combined_se: float = math.nan
    cap: float = math.inf
    censored: int = 0

    @property
    def positive(self) -> bool:
        """3σ 置信区间不含 0"""
        return self.rho_hat - 3.0 * self.stderr > 0.0

    @property
    def eq_mean_consistent(self) -> bool:
        return abs(self.lhs - self.rhs) <= 3.0 * self.combined_se

    def to_dict(self) -> Dict[str, Any]:
        return {
            "a": self.a,
            "b": self.b,
            "n_replicas": self.n_replicas,
            "rho_hat": self.rho_hat,
            "stderr": self.stderr,
            "cap": self.cap,
            "censored": self.censored,
            "eq_mean_check": {
                "grid": self.grid,
                "lhs": self.lhs,
                "rhs": self.rhs,
                "combined_se": self.combined_se,
            },
        }


def truncated_integrand(weight: WeightFunction, level: float, value: float, cap: float) -> float:
    """
    E[L(0, ξ(u)) ∧ M] 对 u 的导数在单条路径上的被积项

    w(L)·(1 - exp(-w(u)(M - L)))/w(u)，L >= M（或未到达，记为 NaN）时为 0；M = ∞ 时即 w(L)/w(u)。
    """
    if math.isnan(value) or value >= cap:
        return 0.0
    rate = weight(level)
    kept = 1.0 if math.isinf(cap) else -math.expm1(-rate * (cap - value))
    return weight(value) * kept * weight.reciprocal(level)


def rho_replica(weight: WeightFunction, a: float, b: float, seed: int,
                levels: np.ndarray, cap: float = DEFAULT_RHO_CAP) -> Dict[str, float]:
    """
    单个副本：L(0, ξ(a)) ∧ M 以及对应截断被积项在 u 网格上的梯形积分

    Args:
        weight: 权重函数
        a, b: 初始局部时间 ℓ = (a, b)
        seed: 副本种子
        levels: 从 b 到 a 的 u 网格
        cap: 截断水平 M > a

    Returns:
        {"L0_at_xi", "integral", "censored", "jumps"}
    """
    if not cap > a:
        raise ConfigurationError(f"截断水平必须大于 a，收到 cap={cap!r}, a={a!r}")
    trajectory = run_until_level(weight, a, b, seed, cap=cap)
    profile = xi_profile(trajectory, levels)
    censored = bool(np.isnan(profile[-1]))
    integrand = np.array([truncated_integrand(weight, float(u), float(x), cap) for x, u in zip(profile, levels)])
    return {
        "L0_at_xi": cap if censored else float(min(profile[-1], cap)),
        "integral": float(trapezoid(integrand, levels)),
        "censored": censored,
        "jumps": float(len(trajectory.events)),
    }


def estimate_rho(weight: WeightFunction, a: float = 3.0, b: float = 2.0, n_replicas: int = 100_000,
                 seed: Optional[int] = None, grid_points: int = 32, cap: float = DEFAULT_RHO_CAP) -> RhoReport:
    """
    估计 ρ_M(a, b) = E[L(0, ξ(a)) ∧ M] - a - (a - b)，并用积分恒等式交叉检验

    Args:
        weight: 权重函数
        a, b: 初始局部时间 ℓ = (a, b)，a > b >= 1
        n_replicas: 副本数，>= 2
        seed: 主种子，为空时使用运行时配置的 default_seed；第 i 个副本使用 substream_seed(seed, "replica/i")
        grid_points: u 网格点数
        cap: 截断水平 M > a；M 增大时 ρ_M 单调增到 ρ

    Returns:
        RhoReport
    """
    if not a > b >= 1.0:
        raise ConfigurationError(f"需要 a > b >= 1，收到 a={a!r}, b={b!r}")
    if n_replicas < 2:
        raise ConfigurationError(f"副本数必须 >= 2，收到 {n_replicas!r}")
    seed = resolve_seed(seed)
    levels = np.linspace(b, a, grid_points)
    hits = np.empty(n_replicas)
    integrals = np.empty(n_replicas)
    censored = 0
    for i in range(n_replicas):
        result = rho_replica(weight, a, b, substream_seed(seed, f"replica/{i}"), levels, cap)
        hits[i] = result["L0_at_xi"]
        integrals[i] = result["integral"]
        censored += int(result["censored"])
        if (i + 1) % 10_000 == 0:
            log_debug("estimate_rho", f"已完成 {i + 1}/{n_replicas} 个副本")

    return rho_report(a, b, hits, integrals, levels, cap=cap, censored=censored)


def rho_report(a: float, b: float, hits: Sequence[float], integrals: Sequence[float],
               levels: Sequence[float], cap: float = math.inf, censored: int = 0) -> RhoReport:
    """由各副本的 L(0, ξ(a)) ∧ M 与梯形积分汇总；少于两个副本时标准误为 NaN"""
    hits = np.asarray(hits, dtype=float)
    integrals = np.asarray(integrals, dtype=float)
    n = hits.size
    root_n = math.sqrt(n)
    se_lhs = float(np.std(hits, ddof=1)) / root_n if n > 1 else math.nan
    se_rhs = float(np.std(integrals, ddof=1)) / root_n if n > 1 else math.nan
    lhs = float(np.mean(hits))
    return RhoReport(
        a=a,
        b=b,
        n_replicas=n,
        rho_hat=lhs - a - (a - b),
        stderr=se_lhs,
        grid=[float(u) for u in levels],
        lhs=lhs,
        rhs=a + float(np.mean(integrals)),
        combined_se=math.hypot(se_lhs, se_rhs),
        cap=cap,
        censored=censored,
    )
