"""
路径恒等式与鞅性质检查
分解残差、逐路径界、包络不等式、系综鞅检验与 o(·) 支配比
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..utils.errors import InsufficientEnsembleError, TimeRangeError, UnsupportedOperationError
from ..weights.regime import Regime
from .series import DiagnosticSeries

MIN_ENSEMBLE = 1000
BOUND_SLACK = 1e-12
SANDWICH_K = 4.0
EPS = float(np.finfo(float).eps)


@dataclass
class CheckResult:
    """单项检查 {name, statistic, threshold, pass}"""
    name: str
    statistic: float
    threshold: float
    passed: bool
    note: str = ""

    def to_dict(self) -> Dict[str, Any]:
        data = {"name": self.name, "statistic": self.statistic, "threshold": self.threshold, "pass": self.passed}
        if self.note:
            data["note"] = self.note
        return data


def _require_continuous(series: DiagnosticSeries):
    if not series.weight.continuous:
        raise UnsupportedOperationError(f"权重 {series.weight.describe()} 不连续，拒绝计算对 dA 的积分")


def stochastic_integrals(series: DiagnosticSeries) -> Tuple[np.ndarray, np.ndarray]:
    """
    两个 Stieltjes 积分在样本时刻的累积值

    Returns:
        (∫β_{u-} dM_u, ∫1{X_{u-}=1} dA_u)；相邻样本之间没有跳跃，区间内的顶点取左端样本的 X
    """
    _require_continuous(series)
    weight = series.weight
    n = len(series)
    gm = np.zeros(n)
    aint = np.zeros(n)
    for k in range(1, n):
        x = int(series.X[k - 1])
        dt = series.t[k] - series.t[k - 1]
        if x == 0:
            drift = -series.W1[k - 1] * dt
            continuous = -(weight.head_integral(series.L0[k]) - weight.head_integral(series.L0[k - 1]))
            da = 0.0
        else:
            drift = series.W0[k - 1] * dt
            continuous = weight.head_integral(series.L1[k]) - weight.head_integral(series.L1[k - 1])
            da = series.A[k] - series.A[k - 1]
        jump = (series.M[k] - series.M[k - 1]) - drift
        gm[k] = gm[k - 1] + continuous + series.beta[k] * jump
        aint[k] = aint[k - 1] + da
    return gm, aint


def decomposition_residual(series: DiagnosticSeries, relative: bool = False) -> float:
    """
    max_t |H_t - [Z_0 + 1{X_t=1}β_t + ∫1{X_{u-}=1}dA_u - ∫β_{u-}dM_u]|

    Args:
        series: 覆盖全部跳跃时刻的序列
        relative: 除以 max(1, max|H|)

    Returns:
        残差
    """
    gm, aint = stochastic_integrals(series)
    z0 = series.H[0] - series.X[0] * series.beta[0]
    rhs = z0 + series.X * series.beta + aint - gm
    residual = float(np.max(np.abs(series.H - rhs))) if len(series) else 0.0
    if relative:
        residual /= max(1.0, float(np.max(np.abs(series.H))))
    return residual


def pathwise_checks(series: DiagnosticSeries) -> List[CheckResult]:
    """
    逐路径检查：跳跃幅度界、A 增量界、k=4 二次变差夹逼、A 与 ⟨M⟩ 单调、⟨M⟩_t >= t、A 总变差
    """
    results: List[CheckResult] = []
    limit = 1.0 + BOUND_SLACK

    jumps = series.jump_indices()
    if len(jumps):
        # 跳跃时 H、β 连续，ΔZ = -ΔX·β
        z_before = series.H[jumps] - series.X[jumps - 1] * series.beta[jumps]
        size = np.abs(series.Z[jumps] - z_before)
        jump_ratio = float(np.max(size / series.beta[jumps]))
        # Z = H - Xβ 的舍入误差与 |H| 同量级
        allowance = series.beta[jumps] * limit + 8.0 * EPS * np.abs(series.H[jumps])
        jump_ok = bool(np.all(size <= allowance))
    else:
        jump_ratio, jump_ok = 0.0, True
    results.append(CheckResult("jump_size", jump_ratio, limit, jump_ok))

    _require_continuous(series)
    da = np.where(series.X[:-1] == 1, np.diff(series.A), 0.0)
    # 从后往前累加，保持与 β_t 同量级的精度
    tail = np.append(np.cumsum(da[::-1])[::-1], 0.0) / series.beta
    a_ratio = float(np.max(tail))
    results.append(CheckResult("a_increment", a_ratio, limit, a_ratio <= limit))

    ratio = series.ratio()
    inside = (ratio >= 1.0 / SANDWICH_K) & (ratio <= SANDWICH_K)
    occupied = np.where(series.X == 0, series.W0, series.W1)
    other = np.where(series.X == 0, series.W1, series.W0)
    quadvar = series.beta ** 2 * other
    alpha_tilde = occupied ** -3.0
    low = quadvar < alpha_tilde / SANDWICH_K * (1.0 - BOUND_SLACK)
    high = quadvar > alpha_tilde * SANDWICH_K * (1.0 + BOUND_SLACK)
    sandwich_violations = int(np.count_nonzero(inside & (low | high)))
    results.append(CheckResult("quadvar_sandwich_k4", float(sandwich_violations), 0.0, sandwich_violations == 0))

    scale = float(np.max(np.abs(series.A)))
    a_drop = float(np.max(np.maximum(0.0, -np.diff(series.A)))) / scale if len(series) > 1 else 0.0
    results.append(CheckResult("a_monotone", a_drop, BOUND_SLACK, a_drop <= BOUND_SLACK))

    m_drop = float(np.max(np.maximum(0.0, -np.diff(series.angleM)))) if len(series) > 1 else 0.0
    results.append(CheckResult("angle_bracket_monotone", m_drop, 0.0, m_drop == 0.0))

    shortfall = float(np.max(series.t - series.angleM))
    results.append(CheckResult("angle_bracket_ge_t", shortfall, BOUND_SLACK * max(1.0, series.horizon),
                               shortfall <= BOUND_SLACK * max(1.0, series.horizon)))

    total = float(series.A[-1] - series.A[0])
    results.append(CheckResult("a_total_variation", total, float(series.beta[0]) * limit,
                               total <= series.beta[0] * limit))
    return results


def _integral_at(series: DiagnosticSeries, gm: np.ndarray, t: float) -> float:
    """∫_0^t β_{u-} dM_u 在任意时刻的值"""
    point = series.at(t)
    k = int(np.searchsorted(series.t, t, side="right")) - 1
    weight = series.weight
    if point.X == 0:
        return gm[k] - (weight.head_integral(point.L0) - weight.head_integral(series.L0[k]))
    return gm[k] + (weight.head_integral(point.L1) - weight.head_integral(series.L1[k]))


@dataclass
class EnvelopeResult:
    t: float
    s: float
    lower: CheckResult
    upper: CheckResult

    @property
    def passed(self) -> bool:
        return self.lower.passed and self.upper.passed

    def to_dict(self) -> Dict[str, Any]:
        return {"t": self.t, "s": self.s, "lower": self.lower.to_dict(), "upper": self.upper.to_dict()}


def envelope_checks(series: DiagnosticSeries, t: float, s: float,
                    regime: Optional[Regime] = None) -> EnvelopeResult:
    """
    ∫_t^s G_{u-} dM_u 的上下包络

    下界: (∫G dM)² >= ½(H_s - H_t)² - 4β_t²
    上界: |∫G dM| <= 2∫_{L(0,t)∧L(1,t)}^∞ du/w + 2β_t，弱区间右端无穷，记为平凡成立

    Returns:
        EnvelopeResult，statistic 为松弛量（>= 0 表示成立）
    """
    if not 0.0 <= t <= s <= series.horizon:
        raise TimeRangeError(f"需要 0 <= t <= s <= horizon，收到 t={t!r}, s={s!r}")
    gm, _ = stochastic_integrals(series)
    start, end = series.at(t), series.at(s)
    g_integral = -(_integral_at(series, gm, s) - _integral_at(series, gm, t))
    dH = end.H - start.H

    lower_slack = g_integral ** 2 - (0.5 * dH ** 2 - 4.0 * start.beta ** 2)
    scale = max(1.0, g_integral ** 2)
    lower = CheckResult("envelope_lower", lower_slack, 0.0, lower_slack >= -BOUND_SLACK * scale)

    tail = series.weight.tail_integral(min(start.L0, start.L1), 1.0)
    weak = regime is Regime.WEAK or math.isinf(tail)
    if weak:
        upper = CheckResult("envelope_upper", math.inf, math.inf, True, note="弱区间右端无穷，平凡成立")
    else:
        bound = 2.0 * tail + 2.0 * start.beta
        upper_slack = bound - abs(g_integral)
        upper = CheckResult("envelope_upper", upper_slack, 0.0, upper_slack >= -BOUND_SLACK * max(1.0, bound))
    return EnvelopeResult(t=t, s=s, lower=lower, upper=upper)


def ratio_series(series: DiagnosticSeries) -> Tuple[np.ndarray, np.ndarray]:
    """
    (W0∧W1)/(W0∨W1) 及其滚动最小值

    Returns:
        (ratio, running_min)
    """
    ratio = series.ratio()
    return ratio, np.minimum.accumulate(ratio)


def domination_ratio(series: DiagnosticSeries, p: float, q: float) -> np.ndarray:
    """
    (W0W1)^{-p/2} / ∫_{L0∧L1}^∞ du/w^q，强区间内应趋于 0

    Raises:
        UnsupportedOperationError: ∫ du/w^q 发散
    """
    weight = series.weight
    if not weight.tail_converges(q):
        raise UnsupportedOperationError(f"{weight.describe()} 的 ∫du/w^{q:g} 发散")
    low = np.minimum(series.L0, series.L1)
    tails = np.array([weight.tail_integral(float(x), q) for x in low])
    return series.beta ** (p / 2.0) / tails


@dataclass
class MartingaleReport:
    """各检查时刻的系综检验结果"""
    n_runs: int
    checks: List[CheckResult] = field(default_factory=list)
    drift_ratios: Dict[str, List[float]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_runs": self.n_runs,
            "pass": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "drift_ratios": self.drift_ratios,
        }


def _mean_se(values: np.ndarray) -> Tuple[float, float]:
    return float(np.mean(values)), float(np.std(values, ddof=1) / math.sqrt(len(values)))


@dataclass
class CheckpointSamples:
    """某一检查时刻在各条轨迹上的取值"""
    t: float
    M: np.ndarray
    bracket: np.ndarray
    X: np.ndarray
    Pi: np.ndarray
    Lam: np.ndarray
    ahead: Dict[float, np.ndarray] = field(default_factory=dict)


def checkpoint_samples(runs: Sequence[DiagnosticSeries], t: float,
                       steps: Sequence[float] = (0.01, 0.005)) -> CheckpointSamples:
    points = [series.at(t) for series in runs]
    return CheckpointSamples(
        t=t,
        M=np.array([p.M for p in points]),
        bracket=np.array([p.angleM for p in points]),
        X=np.array([p.X for p in points], dtype=float),
        Pi=np.array([p.Pi for p in points]),
        Lam=np.array([p.Lambda for p in points]),
        ahead={h: np.array([float(series.at(t + h).X) for series in runs]) for h in steps},
    )


def checkpoint_checks(samples: CheckpointSamples, sigmas: float = 3.0) -> Tuple[List[CheckResult], List[float]]:
    """
    单个检查时刻的三项检验

    Returns:
        (检查结果, 各步长的 |mean D_h|/h)
    """
    t = samples.t
    checks: List[CheckResult] = []
    mean, se = _mean_se(samples.M)
    checks.append(CheckResult(f"mean_M@{t:g}", abs(mean), sigmas * se, abs(mean) <= sigmas * se))

    mean, se = _mean_se(samples.M ** 2 - samples.bracket)
    checks.append(CheckResult(f"isometry@{t:g}", abs(mean), sigmas * se, abs(mean) <= sigmas * se))

    ratios = []
    for h, ahead in samples.ahead.items():
        D = ahead - samples.X - samples.Pi * h
        mean, se = _mean_se(D)
        threshold = sigmas * se + h ** 2 * float(np.mean(samples.Lam ** 2))
        checks.append(CheckResult(f"drift@{t:g}/h={h:g}", abs(mean), threshold, abs(mean) <= threshold))
        ratios.append(abs(mean) / h)
    return checks, ratios


def martingale_checks(runs: Sequence[DiagnosticSeries], checkpoints: Sequence[float],
                      steps: Sequence[float] = (0.01, 0.005), min_runs: int = MIN_ENSEMBLE,
                      sigmas: float = 3.0) -> MartingaleReport:
    """
    系综鞅检验

    每个检查时刻 t：(i) mean M_t 在 3 倍标准误内为 0；(ii) mean(M_t² - ⟨M⟩_t) 在 3 倍标准误内为 0；
    (iii) D_h = 1{X_{t+h}=1} - 1{X_t=1} - Π_t·h 的均值不超过 3 倍标准误加 h²·mean(Λ_t²)。

    Args:
        runs: 独立轨迹的序列
        checkpoints: 检查时刻，t + max(steps) 不能超过各轨迹的终止时间
        steps: 漂移检验的步长 h
        min_runs: 最少轨迹数

    Raises:
        InsufficientEnsembleError: 轨迹数少于 min_runs
    """
    n = len(runs)
    if n < min_runs:
        raise InsufficientEnsembleError(f"鞅检验至少需要 {min_runs} 条轨迹，只有 {n} 条")
    report = MartingaleReport(n_runs=n)
    for t in checkpoints:
        checks, ratios = checkpoint_checks(checkpoint_samples(runs, t, steps), sigmas)
        report.checks.extend(checks)
        report.drift_ratios[f"{t:g}"] = ratios
    return report
