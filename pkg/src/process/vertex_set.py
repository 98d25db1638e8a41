"""
顶点集
ℤ 的连通子集：全直线、半直线、线段或掩码
"""

from dataclasses import dataclass
from typing import Any, Dict, Iterable, Optional, Tuple, Union

from ..utils.errors import ConfigurationError


@dataclass(frozen=True)
class VertexSet:
    """
    ℤ 的连通子集 [lo, hi]，None 表示无界

    至少包含两个顶点；区间外的邻居直接不存在，即 a/0 = ∞ 约定的结构化形式。
    """
    kind: str
    lo: Optional[int] = None
    hi: Optional[int] = None

    def __post_init__(self):
        if self.lo is not None and self.hi is not None and self.hi - self.lo < 1:
            raise ConfigurationError(f"顶点集至少需要两个顶点: [{self.lo}, {self.hi}]")

    @classmethod
    def full_line(cls) -> "VertexSet":
        return cls("full_line")

    @classmethod
    def half_line_plus(cls) -> "VertexSet":
        return cls("half_line", lo=0)

    @classmethod
    def half_line_minus(cls) -> "VertexSet":
        return cls("half_line_minus", hi=0)

    @classmethod
    def segment(cls, lo: int, hi: int) -> "VertexSet":
        if hi <= lo:
            raise ConfigurationError(f"线段需要 lo < hi: [{lo}, {hi}]")
        return cls("segment", lo=lo, hi=hi)

    @classmethod
    def mask(cls, vertices: Iterable[int]) -> "VertexSet":
        ordered = sorted(set(vertices))
        if not ordered:
            raise ConfigurationError("掩码顶点集不能为空")
        if ordered[-1] - ordered[0] != len(ordered) - 1:
            raise ConfigurationError(f"掩码顶点集必须连通: {ordered}")
        return cls("mask", lo=ordered[0], hi=ordered[-1])

    def __contains__(self, x: int) -> bool:
        return (self.lo is None or x >= self.lo) and (self.hi is None or x <= self.hi)

    def neighbors(self, x: int) -> Tuple[int, ...]:
        """集合内的邻居，左邻居在前"""
        return tuple(y for y in (x - 1, x + 1) if y in self)

    @property
    def size(self) -> Optional[int]:
        if self.lo is None or self.hi is None:
            return None
        return self.hi - self.lo + 1

    def is_finite(self) -> bool:
        return self.size is not None

    def is_subset_of(self, other: "VertexSet") -> bool:
        lo_ok = other.lo is None or (self.lo is not None and self.lo >= other.lo)
        hi_ok = other.hi is None or (self.hi is not None and self.hi <= other.hi)
        return lo_ok and hi_ok

    def start_vertex(self) -> int:
        """
        延拓的起点规则

        0 ∈ B 时从 0 出发；B ⊆ ℕ 时从 b₋ 出发；B ⊆ -ℕ 时从 b₊ 出发。
        """
        if 0 in self:
            return 0
        if self.lo is not None and self.lo > 0:
            return self.lo
        return self.hi

    def vertices(self) -> Tuple[int, ...]:
        if not self.is_finite():
            raise ConfigurationError(f"无界顶点集 {self.kind} 不能枚举")
        return tuple(range(self.lo, self.hi + 1))

    def to_dict(self) -> Dict[str, Any]:
        if self.kind == "segment":
            return {"kind": "segment", "lo": self.lo, "hi": self.hi}
        if self.kind == "mask":
            return {"kind": "mask", "vertices": list(self.vertices())}
        return {"kind": self.kind}

    @classmethod
    def from_dict(cls, data: Union[Dict[str, Any], Any]) -> "VertexSet":
        """由配置记录（dict 或模式对象）构造"""
        if isinstance(data, VertexSet):
            return data
        if hasattr(data, "model_dump"):
            data = data.model_dump()
        kind = data.get("kind")
        if kind == "full_line":
            return cls.full_line()
        if kind == "half_line":
            return cls.half_line_plus()
        if kind == "half_line_minus":
            return cls.half_line_minus()
        if kind == "segment":
            return cls.segment(int(data["lo"]), int(data["hi"]))
        if kind == "mask":
            return cls.mask(int(v) for v in data["vertices"])
        raise ConfigurationError(f"不支持的顶点集类型: {kind!r}")

    def __str__(self) -> str:
        lo = "-∞" if self.lo is None else str(self.lo)
        hi = "∞" if self.hi is None else str(self.hi)
        return f"{self.kind}[{lo}, {hi}]"
