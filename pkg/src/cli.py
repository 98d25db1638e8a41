"""
命令行入口
python -m src.cli {simulate,couple,diagnose,experiment,regime} --config CONFIG [选项]

所有校验在任何计算和目录创建之前完成，校验错误一次性全部报告，退出码 2。
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, ValidationError

from .lab import VrjpLab
from .schemas import (
    WEIGHT_SPEC_ADAPTER,
    CouplingConfig,
    DiagnoseConfig,
    ExperimentConfig,
    SimulationConfig,
    format_validation_error,
)
from .utils import Config, canonical_json, load_config, log_error, print_table, set_verbosity
from .utils.console import NORMAL, QUIET, VERBOSE
from .utils.errors import ConfigurationError, VrjpLabError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

SCHEMAS = {
    "simulate": SimulationConfig,
    "couple": CouplingConfig,
    "diagnose": DiagnoseConfig,
    "experiment": ExperimentConfig,
}

# 覆盖参数 -> 适用的子命令
OVERRIDES = {
    "seed": ("simulate", "couple", "experiment"),
    "replicas": ("experiment",),
    "horizon": ("simulate", "experiment"),
    "trajectory": ("diagnose",),
}


class UsageError(ConfigurationError):
    """命令行用法或配置校验错误，带字段级消息"""

    def __init__(self, messages: Sequence[str]):
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError([message])


@dataclass
class CliInvocation:
    """校验完成的一次调用"""
    subcommand: str
    config: Any
    out_dir: Optional[str] = None
    verbosity: int = NORMAL
    runtime: Config = field(default_factory=Config)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vrjp-lab", description="非线性顶点强化跳跃过程的可复现模拟与检验")
    subparsers = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    helps = {
        "simulate": "模拟一条轨迹",
        "couple": "运行共享时钟耦合对",
        "diagnose": "两顶点轨迹的泛函与路径检查",
        "experiment": "运行蒙特卡洛实验并给出判定",
        "regime": "权重函数的强弱区分类",
    }
    for name, text in helps.items():
        sub = subparsers.add_parser(name, help=text)
        sub.add_argument("--config", required=True, help="JSON 配置文件路径或内联 JSON")
        sub.add_argument("--settings", default=None, help="运行时配置文件（config.py 或 .env）")
        if name != "regime":
            sub.add_argument("--out", default=None, help="输出目录")
        if name in OVERRIDES["seed"]:
            sub.add_argument("--seed", type=int, default=None, help="64 位无符号主种子")
        if name in OVERRIDES["replicas"]:
            sub.add_argument("--replicas", type=int, default=None, help="副本数")
        if name in OVERRIDES["horizon"]:
            sub.add_argument("--horizon", type=float, default=None, help="终止时间")
        if name in OVERRIDES["trajectory"]:
            sub.add_argument("--trajectory", default=None, help="simulate 导出的轨迹（.csv 或 .json）")
        verbosity = sub.add_mutually_exclusive_group()
        verbosity.add_argument("--quiet", action="store_true", help="只输出错误")
        verbosity.add_argument("--verbose", action="store_true", help="输出逐副本进度")
    return parser


def read_config(value: str) -> Any:
    """--config 的值：以 { 或 " 开头按内联 JSON 解析，否则按文件路径读取"""
    text = value.strip()
    if not text.startswith(("{", '"')):
        if not os.path.exists(value):
            raise UsageError([f"--config: 配置文件不存在: {value}"])
        with open(value, "r", encoding="utf-8") as f:
            text = f.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError([f"--config: JSON 解析失败: {e}"]) from e


def apply_overrides(subcommand: str, data: Any, args: argparse.Namespace) -> Dict[str, Any]:
    """把命令行覆盖参数并入配置字典，交给模式统一校验"""
    if not isinstance(data, dict):
        raise UsageError([f"--config: {subcommand} 的配置必须是 JSON 对象"])
    merged = dict(data)
    for name, subcommands in OVERRIDES.items():
        value = getattr(args, name, None)
        if value is not None and subcommand in subcommands:
            merged[name] = value
    return merged


def _validate(schema: Any, data: Any) -> BaseModel:
    try:
        if schema is WEIGHT_SPEC_ADAPTER:
            return schema.validate_python({"kind": data} if isinstance(data, str) else data)
        return schema.model_validate(data)
    except ValidationError as e:
        raise UsageError(format_validation_error(e)) from e


def parse_and_validate(argv: Optional[Sequence[str]] = None) -> CliInvocation:
    """
    解析并校验命令行

    Args:
        argv: 参数列表，默认 sys.argv[1:]

    Returns:
        CliInvocation

    Raises:
        UsageError: 用法错误或配置校验失败，messages 包含全部字段级错误
    """
    args = build_parser().parse_args(argv)
    data = read_config(args.config)

    if args.subcommand == "regime":
        config = _validate(WEIGHT_SPEC_ADAPTER, data)
    else:
        config = _validate(SCHEMAS[args.subcommand], apply_overrides(args.subcommand, data, args))

    if args.subcommand == "diagnose":
        if not config.trajectory:
            raise UsageError(["trajectory: diagnose 需要 --trajectory 或配置中的 trajectory"])
        if not os.path.exists(config.trajectory):
            raise UsageError([f"trajectory: 轨迹文件不存在: {config.trajectory}"])

    try:
        runtime = load_config(args.settings)
    except ConfigurationError as e:
        raise UsageError([f"--settings: {e}"]) from e

    if args.quiet:
        verbosity = QUIET
    elif args.verbose or runtime.verbose:
        verbosity = VERBOSE
    else:
        verbosity = NORMAL
    return CliInvocation(
        subcommand=args.subcommand,
        config=config,
        out_dir=getattr(args, "out", None),
        verbosity=verbosity,
        runtime=runtime,
    )


def dispatch(invocation: CliInvocation, lab: Optional[VrjpLab] = None) -> int:
    """
    执行子命令

    Returns:
        退出码：0 成功/通过，1 失败/未通过，2 配置错误
    """
    lab = lab or VrjpLab(invocation.runtime)
    set_verbosity(invocation.verbosity)
    name = invocation.subcommand
    try:
        if name == "simulate":
            lab.simulate(invocation.config, invocation.out_dir)
            return EXIT_OK
        if name == "couple":
            lab.couple(invocation.config, invocation.out_dir)
            return EXIT_OK
        if name == "diagnose":
            report = lab.diagnose(invocation.config, out_dir=invocation.out_dir)
            return EXIT_OK if report["pass"] else EXIT_FAIL
        if name == "experiment":
            verdict = lab.experiment(invocation.config, invocation.out_dir)
            print(verdict.digest)
            return verdict.exit_code
        report = lab.regime(invocation.config)
        print_table("权重分类", report.rows())
        print(canonical_json(report.to_dict()))
        return EXIT_OK
    except ConfigurationError as e:
        log_error(name, str(e))
        return EXIT_USAGE
    except VrjpLabError as e:
        log_error(name, f"{type(e).__name__}: {e}")
        return EXIT_FAIL


def main(argv: Optional[List[str]] = None) -> int:
    try:
        invocation = parse_and_validate(argv)
    except UsageError as e:
        for message in e.messages:
            log_error("cli", message)
        return EXIT_USAGE
    return dispatch(invocation)


if __name__ == "__main__":
    sys.exit(main())
