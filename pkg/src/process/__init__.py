"""
过程模块
顶点集、参考模拟器与限制算子
"""

from .restriction import RestrictionResult, restrict
from .simulator import (
    DEFAULT_MAX_JUMPS,
    JumpSimulator,
    ReferenceSimulator,
    apply_jump,
    local_time,
    reference_propose,
    simulate,
    step,
)
from .vertex_set import VertexSet

__all__ = [
    "DEFAULT_MAX_JUMPS",
    "JumpSimulator",
    "ReferenceSimulator",
    "RestrictionResult",
    "VertexSet",
    "apply_jump",
    "local_time",
    "reference_propose",
    "restrict",
    "simulate",
    "step",
]
