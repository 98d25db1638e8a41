"""
统计检验
双样本 KS、Exp(1) 单样本 KS、Wilson 二项置信区间与均值标准误
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple

import numpy as np
from scipy import stats

from ..utils.errors import EmptySampleError


@dataclass(frozen=True)
class KSResult:
    """KS 检验结果 {D, p, reject}"""
    D: float
    p: float
    reject: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"D": self.D, "p": self.p, "reject": self.reject}


def _sample(values: Sequence[float], name: str) -> np.ndarray:
    array = np.asarray(values, dtype=float)
    if array.size == 0:
        raise EmptySampleError(f"样本 {name} 为空")
    return array


def ks_two_sample(xs: Sequence[float], ys: Sequence[float], alpha: float = 0.01) -> KSResult:
    """
    双样本 Kolmogorov–Smirnov 检验（渐近 p 值）

    Args:
        xs: 第一个样本
        ys: 第二个样本
        alpha: 显著性水平

    Returns:
        KSResult，p < alpha 时拒绝

    Raises:
        EmptySampleError: 任一样本为空
    """
    x = _sample(xs, "xs")
    y = _sample(ys, "ys")
    result = stats.ks_2samp(x, y, method="asymp")
    p = float(result.pvalue)
    return KSResult(D=float(result.statistic), p=p, reject=p < alpha)


def ks_exponential(xs: Sequence[float], alpha: float = 0.01) -> KSResult:
    """与 Exp(1) 比较的单样本 KS 检验"""
    x = _sample(xs, "xs")
    result = stats.kstest(x, "expon")
    p = float(result.pvalue)
    return KSResult(D=float(result.statistic), p=p, reject=p < alpha)


def binomial_ci(successes: int, n: int, confidence: float = 0.95) -> Tuple[float, float]:
    """Wilson 置信区间"""
    if n < 1:
        raise EmptySampleError("二项置信区间需要至少一次试验")
    interval = stats.binomtest(successes, n).proportion_ci(confidence_level=confidence, method="wilson")
    return float(interval.low), float(interval.high)


def mean_stderr(values: Sequence[float]) -> Tuple[float, float]:
    """均值与标准误；单个样本时标准误为 NaN"""
    x = _sample(values, "values")
    if x.size < 2:
        return float(x[0]), math.nan
    return float(np.mean(x)), float(np.std(x, ddof=1) / math.sqrt(x.size))
