"""
时钟模块
有向边上可共享的 Exp(1) 流
"""

from .bank import (
    BankSupplier,
    ClockBank,
    DirectedEdge,
    ExponentialStream,
    directed_edge,
    substream_exponential,
    substream_seed,
)


def exponential(bank: ClockBank, edge, n: int) -> float:
    """返回 χ^{(edge)}_n"""
    return bank.exponential(edge, n)


__all__ = [
    "BankSupplier",
    "ClockBank",
    "DirectedEdge",
    "ExponentialStream",
    "directed_edge",
    "exponential",
    "substream_exponential",
    "substream_seed",
]
