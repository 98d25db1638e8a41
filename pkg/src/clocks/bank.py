"""
指数时钟库
每条有向边一条由主种子派生的 Philox 流，按需生成 Exp(1) 并缓存
"""

import hashlib
import math
from typing import Dict, List, NamedTuple, Tuple

import numpy as np

from ..utils.errors import ConfigurationError

BLOCK_SIZE = 256
U64_MAX = 2 ** 64
# r = 0 时的替代值，小于任何非零 -log1p(-r)
_ZERO_GUARD = 2.0 ** -54


class DirectedEdge(NamedTuple):
    """有向边 (source, target)，|source - target| = 1"""
    source: int
    target: int


def directed_edge(source: int, target: int) -> DirectedEdge:
    """构造并校验有向边"""
    if abs(source - target) != 1:
        raise ConfigurationError(f"有向边的两个端点必须相邻: ({source}, {target})")
    return DirectedEdge(source, target)


def check_seed(master_seed: int) -> int:
    if not isinstance(master_seed, (int, np.integer)) or not 0 <= int(master_seed) < U64_MAX:
        raise ConfigurationError(f"种子必须是 64 位无符号整数，收到 {master_seed!r}")
    return int(master_seed)


def substream_seed(master_seed: int, tag: str) -> int:
    """
    由主种子和标签派生子种子

    Args:
        master_seed: 64 位无符号主种子
        tag: 标签，例如 "replica/3"、"A"、"edge/0/1"

    Returns:
        64 位无符号子种子（blake2b 8 字节摘要）
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(check_seed(master_seed).to_bytes(8, "little"))
    h.update(tag.encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


class ExponentialStream:
    """一条 Exp(1) 序列，第 n 个值只取决于种子和 n"""

    def __init__(self, seed: int):
        self.seed = seed
        self._generator = np.random.Generator(np.random.Philox(key=seed))
        self._values: List[float] = []

    def _extend(self):
        r = self._generator.random(BLOCK_SIZE)
        # 逆 CDF：U = 1 - r ∈ (0, 1]，χ = -log U
        chi = np.where(r == 0.0, _ZERO_GUARD, -np.log1p(-r))
        self._values.extend(chi.tolist())

    def get(self, n: int) -> float:
        """返回第 n 个值（n >= 1）"""
        if n < 1:
            raise ConfigurationError(f"时钟序号必须 >= 1，收到 {n}")
        while n > len(self._values):
            self._extend()
        return self._values[n - 1]

    def __len__(self) -> int:
        return len(self._values)


class ClockBank:
    """
    有向边指数时钟族 χ^{(i,j)}_n

    同一个 ClockBank 可被多个耦合过程共享；查询顺序不影响取值。
    内部缓存会被修改，因此一个实例只能在一个工作进程中使用。
    """

    def __init__(self, master_seed: int):
        self.master_seed = check_seed(master_seed)
        self._streams: Dict[Tuple[int, int], ExponentialStream] = {}

    def stream(self, edge: Tuple[int, int]) -> ExponentialStream:
        key = (edge[0], edge[1])
        stream = self._streams.get(key)
        if stream is None:
            directed_edge(*key)
            stream = ExponentialStream(substream_seed(self.master_seed, f"edge/{key[0]}/{key[1]}"))
            self._streams[key] = stream
        return stream

    def exponential(self, edge: Tuple[int, int], n: int) -> float:
        """
        返回 χ^{(edge)}_n

        Args:
            edge: 有向边 (i, j)
            n: 序号，>= 1

        Returns:
            严格正的有限值
        """
        return self.stream(edge).get(n)

    def edges(self) -> List[DirectedEdge]:
        """已经被查询过的有向边"""
        return [DirectedEdge(*key) for key in sorted(self._streams)]


def substream_exponential(master_seed: int, tag: str, n: int = 1) -> float:
    """从子种子 substream_seed(master_seed, tag) 对应的流中取第 n 个 Exp(1)"""
    return ExponentialStream(substream_seed(master_seed, tag)).get(n)


class BankSupplier:
    """
    逐次逗留的新鲜指数供给

    每条有向边维护自己的读取计数，每次 draw 读取下一个未使用的 χ。
    """

    def __init__(self, bank: ClockBank):
        self.bank = bank
        self._counters: Dict[Tuple[int, int], int] = {}

    def draw(self, edge: Tuple[int, int]) -> float:
        n = self._counters.get(edge, 0) + 1
        self._counters[edge] = n
        return self.bank.exponential(edge, n)

    def consumed(self, edge: Tuple[int, int]) -> int:
        return self._counters.get(edge, 0)
