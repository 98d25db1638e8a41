"""
状态管理模块
定义 VRJP 的过程状态与轨迹数据结构
"""

from .state import InitialLocalTimes, JumpEvent, LocalTimeIndex, ProcessState, Trajectory, meta_path_for

__all__ = ["InitialLocalTimes", "JumpEvent", "LocalTimeIndex", "ProcessState", "Trajectory", "meta_path_for"]
