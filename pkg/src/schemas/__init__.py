"""
配置模式模块
定义所有子命令与实验的 JSON 配置结构
"""

from .schemas import (
    WeightSpec,
    LinearSpec,
    PowerSpec,
    ExpShiftedSpec,
    WEIGHT_SPEC_ADAPTER,
    GraphSpec,
    FullLineSpec,
    HalfLineSpec,
    HalfLineMinusSpec,
    SegmentSpec,
    MaskSpec,
    SimulationConfig,
    CouplingConfig,
    DiagnoseConfig,
    ExperimentConfig,
    KIND_DEFAULTS,
    format_validation_error,
)

__all__ = [
    "WeightSpec",
    "LinearSpec",
    "PowerSpec",
    "ExpShiftedSpec",
    "WEIGHT_SPEC_ADAPTER",
    "GraphSpec",
    "FullLineSpec",
    "HalfLineSpec",
    "HalfLineMinusSpec",
    "SegmentSpec",
    "MaskSpec",
    "SimulationConfig",
    "CouplingConfig",
    "DiagnoseConfig",
    "ExperimentConfig",
    "KIND_DEFAULTS",
    "format_validation_error",
]
