"""
副本并行执行
有界进程池，按副本序号合并结果
"""

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from .config import THREADS_ENV
from .errors import ConfigurationError

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(threads: Optional[int] = None) -> int:
    """
    确定工作进程数

    环境变量 VRJP_LAB_THREADS 优先，其次是传入值，默认 1。
    """
    value = os.environ.get(THREADS_ENV)
    if value:
        try:
            threads = int(value)
        except ValueError as e:
            raise ConfigurationError(f"{THREADS_ENV} 必须是整数: {value!r}") from e
    if threads is None:
        return 1
    if threads < 1:
        raise ConfigurationError(f"工作进程数必须 >= 1，当前为 {threads}")
    return threads


def map_replicas(fn: Callable[[T], R], tasks: Sequence[T], workers: int = 1) -> List[R]:
    """
    对每个任务执行 fn，结果顺序与任务顺序一致

    fn 和任务都必须可 pickle（模块级函数 + 纯数据）。结果与 workers 无关。
    """
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]

    max_workers = min(workers, len(tasks))
    chunksize = max(1, len(tasks) // (4 * max_workers))
    with ProcessPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(fn, tasks, chunksize=chunksize))
