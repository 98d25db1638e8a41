"""
配置管理模块
处理运行时配置文件与环境变量
"""

import os
from dataclasses import dataclass
from typing import Optional

from .console import log_error, log_info, print_table
from .errors import ConfigurationError

THREADS_ENV = "VRJP_LAB_THREADS"
DEFAULT_SEED = 20240101


@dataclass
class Config:
    """运行时配置类"""
    # 并行配置
    threads: int = 1

    # 模拟配置
    default_seed: int = DEFAULT_SEED
    max_jumps: int = 50_000_000
    quadrature_tolerance: float = 1e-10

    # 输出配置
    output_dir: str = "runs"
    verbose: bool = False

    def validate(self) -> bool:
        """验证配置"""
        if self.threads < 1:
            log_error("Config", f"线程数必须 >= 1，当前为 {self.threads}")
            return False

        if not 0 <= self.default_seed < 2 ** 64:
            log_error("Config", f"默认种子必须是 64 位无符号整数，当前为 {self.default_seed}")
            return False

        if self.max_jumps < 1:
            log_error("Config", f"最大跳跃数必须 >= 1，当前为 {self.max_jumps}")
            return False

        if not 0 < self.quadrature_tolerance < 1:
            log_error("Config", f"积分容差必须在 (0, 1) 内，当前为 {self.quadrature_tolerance}")
            return False

        return True

    def with_env_overrides(self) -> "Config":
        """应用环境变量覆盖（目前只有线程数）"""
        value = os.environ.get(THREADS_ENV)
        if value:
            try:
                self.threads = int(value)
            except ValueError as e:
                raise ConfigurationError(f"{THREADS_ENV} 必须是整数: {value!r}") from e
        return self

    @classmethod
    def from_file(cls, config_file: str) -> "Config":
        """从配置文件创建配置"""
        if config_file.endswith('.py'):
            # Python配置文件
            import importlib.util

            spec = importlib.util.spec_from_file_location("vrjp_lab_config", config_file)
            config_module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(config_module)

            return cls(
                threads=int(getattr(config_module, "THREADS", 1)),
                default_seed=int(getattr(config_module, "DEFAULT_SEED", DEFAULT_SEED)),
                max_jumps=int(getattr(config_module, "MAX_JUMPS", 50_000_000)),
                quadrature_tolerance=float(getattr(config_module, "QUADRATURE_TOLERANCE", 1e-10)),
                output_dir=getattr(config_module, "OUTPUT_DIR", "runs"),
                verbose=bool(getattr(config_module, "VERBOSE", False)),
            )

        # .env格式配置文件
        config_dict = {}
        with open(config_file, 'r', encoding='utf-8') as f:
            for line in f:
                line = line.strip()
                if line and not line.startswith('#') and '=' in line:
                    key, value = line.split('=', 1)
                    config_dict[key.strip()] = value.strip()

        try:
            return cls(
                threads=int(config_dict.get("THREADS", "1")),
                default_seed=int(config_dict.get("DEFAULT_SEED", DEFAULT_SEED)),
                max_jumps=int(config_dict.get("MAX_JUMPS", "50000000")),
                quadrature_tolerance=float(config_dict.get("QUADRATURE_TOLERANCE", "1e-10")),
                output_dir=config_dict.get("OUTPUT_DIR", "runs"),
                verbose=config_dict.get("VERBOSE", "false").lower() == "true",
            )
        except ValueError as e:
            raise ConfigurationError(f"配置文件格式错误 {config_file}: {e}") from e


def load_config(config_file: Optional[str] = None) -> Config:
    """
    加载配置

    Args:
        config_file: 配置文件路径，如果不指定则依次查找 config.py、config.env、.env

    Returns:
        配置对象（未找到配置文件时使用默认值）
    """
    file_to_load = None
    if config_file:
        if not os.path.exists(config_file):
            raise ConfigurationError(f"配置文件不存在: {config_file}")
        file_to_load = config_file
    else:
        for config_path in ["config.py", "config.env", ".env"]:
            if os.path.exists(config_path):
                file_to_load = config_path
                log_info("Config", f"已找到配置文件: {config_path}")
                break

    config = Config.from_file(file_to_load) if file_to_load else Config()
    config.with_env_overrides()

    if not config.validate():
        raise ConfigurationError("配置验证失败，请检查配置文件")

    return config


def resolve_seed(seed: Optional[int], config: Optional[Config] = None) -> int:
    """未给出种子时使用运行时配置的 default_seed（config 为空时按 load_config 查找）"""
    if seed is not None:
        return seed
    return (config or load_config()).default_seed


def print_config(config: Config):
    """打印配置信息"""
    print_table("当前配置", [
        ("工作进程数", config.threads),
        ("默认种子", config.default_seed),
        ("最大跳跃数", config.max_jumps),
        ("积分容差", config.quadrature_tolerance),
        ("输出目录", config.output_dir),
        ("详细输出", config.verbose),
    ])
