"""
序列化工具函数
浮点数最短往返格式、原子写文件、规范 JSON 与摘要
"""

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from typing import Any, Dict, Iterable, List, Sequence, Tuple


def format_float(value: float) -> str:
    """
    以最短往返十进制形式格式化浮点数

    Args:
        value: 浮点数

    Returns:
        可被 float() 精确还原的字符串
    """
    return repr(float(value))


def to_jsonable(obj: Any) -> Any:
    """
    转换为严格 JSON 可表示的对象

    非有限浮点数写成字符串 "inf" / "-inf" / "nan"，元组转为列表。
    """
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if math.isfinite(obj):
            return obj
        return format_float(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    # numpy 标量
    if hasattr(obj, "item"):
        return to_jsonable(obj.item())
    raise TypeError(f"无法序列化的对象类型: {type(obj).__name__}")


def from_json_float(value: Any) -> float:
    """还原由 to_jsonable 写出的浮点数"""
    return float(value)


def canonical_json(obj: Any) -> str:
    """规范 JSON：键排序、无空白"""
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(obj: Dict[str, Any], exclude: Sequence[str] = ("timestamp",)) -> str:
    """
    计算字典的 sha256 摘要

    Args:
        obj: 待摘要的字典
        exclude: 不参与摘要的顶层字段

    Returns:
        十六进制摘要字符串
    """
    payload = {k: v for k, v in obj.items() if k not in exclude}
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def atomic_write_text(path: str, text: str):
    """先写临时文件再改名，避免留下半写的输出"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def write_json(path: str, obj: Any):
    """原子写入 JSON 文件"""
    atomic_write_text(path, json.dumps(to_jsonable(obj), indent=2, ensure_ascii=False) + "\n")


def read_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def _cell(value: Any) -> str:
    if hasattr(value, "item") and not isinstance(value, float):
        value = value.item()
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format_float(value)
    if value is None:
        return ""
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]):
    """
    原子写入 CSV 文件

    Args:
        path: 输出路径
        header: 表头
        rows: 行数据，浮点数按最短往返格式写出
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    atomic_write_text(path, buffer.getvalue())


def read_csv(path: str) -> Tuple[List[str], List[List[str]]]:
    """读取 CSV，返回表头和字符串行"""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        rows = list(reader)
    if not rows:
        return [], []
    return rows[0], rows[1:]
