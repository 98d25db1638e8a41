"""
工具函数模块
提供配置、日志、异常、序列化与并行等辅助功能
"""

from .config import DEFAULT_SEED, Config, load_config, print_config, resolve_seed
from .console import log_debug, log_error, log_info, log_warning, print_table, set_verbosity
from .errors import (
    ConfigurationError,
    EmptySampleError,
    EvaluatorError,
    ExplosionError,
    InsufficientEnsembleError,
    IsolatedVertexError,
    TailCertificationError,
    TimeRangeError,
    UnsupportedOperationError,
    VrjpLabError,
    WeightDomainError,
)
from .parallel import map_replicas, resolve_workers
from .serialization import (
    atomic_write_text,
    canonical_json,
    digest,
    format_float,
    read_csv,
    read_json,
    to_jsonable,
    write_csv,
    write_json,
)

__all__ = [
    "DEFAULT_SEED",
    "Config",
    "load_config",
    "print_config",
    "resolve_seed",
    "log_debug",
    "log_error",
    "log_info",
    "log_warning",
    "print_table",
    "set_verbosity",
    "ConfigurationError",
    "EmptySampleError",
    "EvaluatorError",
    "ExplosionError",
    "InsufficientEnsembleError",
    "IsolatedVertexError",
    "TailCertificationError",
    "TimeRangeError",
    "UnsupportedOperationError",
    "VrjpLabError",
    "WeightDomainError",
    "map_replicas",
    "resolve_workers",
    "atomic_write_text",
    "canonical_json",
    "digest",
    "format_float",
    "read_csv",
    "read_json",
    "to_jsonable",
    "write_csv",
    "write_json",
]
