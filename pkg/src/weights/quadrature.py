"""
认证数值积分
有限区间用 scipy.integrate.quad，无穷尾部按倍增分段并给出单调尾部界
"""

import math
from typing import Callable

from scipy.integrate import quad

from ..utils.errors import TailCertificationError

DEFAULT_TOLERANCE = 1e-10
MAX_DOUBLINGS = 1000
QUAD_LIMIT = 200


def integrate(f: Callable[[float], float], lo: float, hi: float, tolerance: float = DEFAULT_TOLERANCE) -> float:
    """
    计算 ∫_lo^hi f(u) du

    Args:
        f: 被积函数
        lo: 下限
        hi: 上限
        tolerance: 绝对误差目标

    Returns:
        积分值
    """
    if hi == lo:
        return 0.0
    if hi < lo:
        return -integrate(f, hi, lo, tolerance)
    value, _ = quad(f, lo, hi, epsabs=tolerance, epsrel=1e-12, limit=QUAD_LIMIT)
    return float(value)


def certified_tail(f: Callable[[float], float], t: float, tolerance: float = DEFAULT_TOLERANCE,
                   max_doublings: int = MAX_DOUBLINGS) -> float:
    """
    计算非增函数 f 的尾积分 ∫_t^∞ f(u) du

    区间按 [T, 2T] 倍增。单调性给出下一段的界 b = T·f(T)，相邻两段界的比值 r
    给出剩余部分的几何估计 b/(1-r)。当该估计同时低于绝对容差和 1e-11 倍的已累计值时停止。

    Args:
        f: 在 [t, ∞) 上非增的非负函数
        t: 下限，> 0
        tolerance: 绝对容差
        max_doublings: 最大倍增次数

    Returns:
        尾积分值

    Raises:
        TailCertificationError: 倍增次数耗尽或上限溢出时仍无法证明尾部界
    """
    lo = float(t)
    width = max(lo, 1.0)
    total = 0.0
    previous_bound = math.inf

    for _ in range(max_doublings):
        hi = lo + width
        if not math.isfinite(hi):
            break
        piece, _ = quad(f, lo, hi, epsabs=0.0, epsrel=1e-12, limit=QUAD_LIMIT)
        total += float(piece)

        lo, width = hi, 2.0 * width
        bound = width * f(lo)
        if bound == 0.0:
            return total
        ratio = bound / previous_bound if math.isfinite(previous_bound) and previous_bound > 0 else math.inf
        previous_bound = bound
        if ratio < 1.0:
            remainder = bound / (1.0 - ratio)
            if remainder <= min(tolerance, 1e-11 * abs(total)):
                return total

    raise TailCertificationError(
        f"尾积分在 t={t!r} 处无法在容差 {tolerance} 内认证（已积分到 {lo:.3e}）")
