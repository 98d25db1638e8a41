"""
VRJP Lab
非线性顶点强化跳跃过程的可复现模拟、耦合与鞅诊断
"""

__version__ = "1.0.0"
__author__ = "VRJP Lab Team"

from .lab import VrjpLab, create_lab
from .utils.config import Config, load_config

__all__ = ["VrjpLab", "create_lab", "Config", "load_config"]
