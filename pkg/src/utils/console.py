"""
控制台日志
基于 rich 的 [名称] 消息 格式输出，统一写到 stderr
"""

from typing import Any, Iterable, Sequence

from rich.console import Console
from rich.markup import escape
from rich.table import Table

console = Console(stderr=True, highlight=False)

QUIET = 0
NORMAL = 1
VERBOSE = 2

_verbosity = NORMAL


def set_verbosity(level: int):
    """设置输出级别（0 安静，1 普通，2 详细）"""
    global _verbosity
    _verbosity = level


def get_verbosity() -> int:
    return _verbosity


def _line(name: str, message: str, style: str) -> str:
    return f"[{style}]{escape('[' + name + ']')}[/{style}] {escape(message)}"


def log_info(name: str, message: str):
    """记录信息日志"""
    if _verbosity >= NORMAL:
        console.print(_line(name, message, "cyan"))


def log_debug(name: str, message: str):
    """记录详细日志，仅在 --verbose 下输出"""
    if _verbosity >= VERBOSE:
        console.print(_line(name, message, "dim"))


def log_warning(name: str, message: str):
    """记录警告日志"""
    console.print(_line(name, "警告: " + message, "yellow"))


def log_error(name: str, message: str):
    """记录错误日志"""
    console.print(_line(name, "错误: " + message, "bold red"))


def print_table(title: str, rows: Iterable[Sequence[Any]], headers: Sequence[str] = ("项目", "值")):
    """以表格形式打印键值信息"""
    table = Table(title=title, show_header=True, header_style="bold")
    for header in headers:
        table.add_column(header)
    for row in rows:
        table.add_row(*(escape(str(cell)) for cell in row))
    console.print(table)
