"""
共享时钟的耦合对
{0,1} 上 ℓ̃ = (1, 1) 与 ℓ* = (1, 1 + A) 两个过程读同一组 χ^{(0,1)}_n、χ^{(1,0)}_n
"""

from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np

from ..clocks.bank import ClockBank, substream_exponential
from ..process.vertex_set import VertexSet
from ..state.state import InitialLocalTimes
from ..utils.errors import ConfigurationError
from ..utils.serialization import write_csv
from ..weights.base import WeightFunction
from .canonical import CanonicalEngine, ClockRule

PAIR_HEADER = ["k", "tilde_L0", "tilde_L1", "star_L0", "star_L1"]


@dataclass
class CoupledPair:
    """两个共享 ClockBank 的规范引擎"""
    tilde: CanonicalEngine
    star: CanonicalEngine
    A: float
    seed: int

    @classmethod
    def create(cls, weight: WeightFunction, seed: int, A: Optional[float] = None,
               rule: Union[ClockRule, str] = ClockRule.LITERAL) -> "CoupledPair":
        """
        构造耦合对

        Args:
            weight: 权重函数
            seed: 主种子；A 取自子流 "A"，与边时钟独立
            A: 强制指定 A（A = 0 时两个过程完全相同）
            rule: 时钟规则，在两个顶点上两种规则一致
        """
        if A is None:
            A = substream_exponential(seed, "A")
        if not A >= 0.0:
            raise ConfigurationError(f"A 必须 >= 0，收到 {A!r}")
        bank = ClockBank(seed)
        segment = VertexSet.segment(0, 1)
        tilde = CanonicalEngine(weight, segment, bank, initial=InitialLocalTimes(), start=0, rule=rule)
        star = CanonicalEngine(weight, segment, bank,
                               initial=InitialLocalTimes(overrides={1: 1.0 + A}), start=0, rule=rule)
        return cls(tilde=tilde, star=star, A=A, seed=seed)


@dataclass
class PairSequences:
    """第 k 次跳跃后两个过程的局部时间，k = 1..n"""
    tilde_L0: np.ndarray
    tilde_L1: np.ndarray
    star_L0: np.ndarray
    star_L1: np.ndarray
    A: float

    def __len__(self) -> int:
        return len(self.tilde_L0)

    def domination_violations(self) -> List[int]:
        """L̃(0) > L*(0) 或 L̃(1) < L*(1) 不成立的 k"""
        bad = ~((self.tilde_L0 > self.star_L0) & (self.tilde_L1 < self.star_L1))
        return [int(k) + 1 for k in np.flatnonzero(bad)]

    def holds_domination(self) -> bool:
        return not self.domination_violations()

    def rows(self):
        for k in range(len(self)):
            yield (k + 1, float(self.tilde_L0[k]), float(self.tilde_L1[k]),
                   float(self.star_L0[k]), float(self.star_L1[k]))

    def to_csv(self, filepath: str):
        write_csv(filepath, PAIR_HEADER, list(self.rows()))


def run_coupled_pair(pair: CoupledPair, n_jumps: int) -> PairSequences:
    """
    两个引擎各推进 n_jumps 次跳跃

    Returns:
        PairSequences；A > 0 时逐 k 严格满足 L̃(0, τ̃_k) > L*(0, τ*_k)、L̃(1, τ̃_k) < L*(1, τ*_k)
    """
    if n_jumps < 1:
        raise ConfigurationError(f"n_jumps 必须 >= 1，收到 {n_jumps!r}")
    columns = np.empty((4, n_jumps))
    for k in range(n_jumps):
        pair.tilde.step()
        pair.star.step()
        columns[:, k] = (pair.tilde.local_time(0), pair.tilde.local_time(1),
                         pair.star.local_time(0), pair.star.local_time(1))
    return PairSequences(*columns, A=pair.A)


def two_vertex_recursion(weight: WeightFunction, bank: ClockBank, l0: float, l1: float,
                         n_jumps: int) -> np.ndarray:
    """
    从 0 出发的 {0,1} 过程的直接递推

    第 2m-1 次跳跃在 0 处停留 χ^{(0,1)}_m / w(L(1))，第 2m 次在 1 处停留 χ^{(1,0)}_m / w(L(0))。

    Returns:
        形状 (n_jumps, 2) 的数组，第 k 行为第 k+1 次跳跃后的 (L(0), L(1))
    """
    out = np.empty((n_jumps, 2))
    local = [l0, l1]
    for k in range(n_jumps):
        m = k // 2 + 1
        if k % 2 == 0:
            local[0] += bank.exponential((0, 1), m) / weight(local[1])
        else:
            local[1] += bank.exponential((1, 0), m) / weight(local[0])
        out[k] = local
    return out
