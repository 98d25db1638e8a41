"""
VRJP 状态管理
定义过程状态、跳跃事件、轨迹及局部时间索引
"""

import bisect
import json
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from ..utils.errors import ConfigurationError, TimeRangeError
from ..utils.serialization import atomic_write_text, read_csv, to_jsonable, write_csv

TRAJECTORY_HEADER = ["n", "tau", "from", "to"]


@dataclass
class InitialLocalTimes:
    """初始局部时间 ℓ：默认值加稀疏覆盖"""
    default: float = 1.0
    overrides: Dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        values = [self.default] + list(self.overrides.values())
        if any(not v >= 1.0 for v in values):
            raise ConfigurationError(f"初始局部时间必须 >= 1: {self.default}, {self.overrides}")

    def get(self, x: int) -> float:
        return self.overrides.get(x, self.default)

    __call__ = get

    def to_dict(self) -> Dict[str, Any]:
        return {"default": self.default, "overrides": {str(k): v for k, v in sorted(self.overrides.items())}}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "InitialLocalTimes":
        return cls(
            default=float(data.get("default", 1.0)),
            overrides={int(k): float(v) for k, v in data.get("overrides", {}).items()},
        )


@dataclass
class JumpEvent:
    """一次跳跃 (τ_n, from, to)"""
    tau: float
    source: int
    target: int

    def to_dict(self) -> Dict[str, Any]:
        return {"tau": self.tau, "from": self.source, "to": self.target}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "JumpEvent":
        return cls(tau=float(data["tau"]), source=int(data["from"]), target=int(data["to"]))


@dataclass
class ProcessState:
    """
    过程的即时状态

    local_times 为稀疏表，未访问顶点取 ℓ_x；jump_counters 为 γ 计数，默认 1。
    """
    current: int
    initial: InitialLocalTimes = field(default_factory=InitialLocalTimes)
    clock_time: float = 0.0
    local_times: Dict[int, float] = field(default_factory=dict)
    jump_counters: Dict[Tuple[int, int], int] = field(default_factory=dict)

    def local_time(self, x: int) -> float:
        value = self.local_times.get(x)
        return self.initial.get(x) if value is None else value

    def gamma(self, source: int, target: int) -> int:
        return self.jump_counters.get((source, target), 1)

    def advance(self, sojourn: float):
        """当前顶点停留 sojourn 时间"""
        x = self.current
        self.local_times[x] = self.local_time(x) + sojourn
        self.clock_time += sojourn

    def move(self, target: int):
        self.current = target

    def visited(self) -> List[int]:
        return sorted(self.local_times)

    def copy(self) -> "ProcessState":
        return ProcessState(
            current=self.current,
            initial=self.initial,
            clock_time=self.clock_time,
            local_times=dict(self.local_times),
            jump_counters=dict(self.jump_counters),
        )


class LocalTimeIndex:
    """
    由事件列表构造的逗留索引

    第 k 段逗留从 starts[k] 开始、停在 vertices[k]，entry[k] 是该顶点在逗留开始时的局部时间。
    """

    def __init__(self, trajectory: "Trajectory"):
        self.horizon = trajectory.horizon
        self.initial = trajectory.initial
        self.starts: List[float] = [0.0]
        self.vertices: List[int] = [trajectory.start]
        self.entry: List[float] = []
        self._by_vertex: Dict[int, List[int]] = {}

        for event in trajectory.events:
            self.starts.append(event.tau)
            self.vertices.append(event.target)

        running: Dict[int, float] = {}
        for k, x in enumerate(self.vertices):
            value = running.get(x, self.initial.get(x))
            self.entry.append(value)
            running[x] = value + (self.end(k) - self.starts[k])
            self._by_vertex.setdefault(x, []).append(k)

    def end(self, k: int) -> float:
        return self.starts[k + 1] if k + 1 < len(self.starts) else self.horizon

    def sojourn_at(self, t: float) -> int:
        """包含时间 t 的逗留序号（右连续：τ_k 时刻属于第 k 段）"""
        return bisect.bisect_right(self.starts, t) - 1

    def local_time(self, x: int, t: float) -> float:
        k = self.sojourn_at(t)
        visits = self._by_vertex.get(x)
        if not visits:
            return self.initial.get(x)
        j = bisect.bisect_right(visits, k) - 1
        if j < 0:
            return self.initial.get(x)
        last = visits[j]
        return self.entry[last] + (min(t, self.end(last)) - self.starts[last])

    def jumps_into(self, vertex: int) -> List[int]:
        """停在 vertex 的逗留序号（升序，起点所在的第 0 段也算）"""
        return list(self._by_vertex.get(vertex, ()))

    def position(self, t: float) -> int:
        return self.vertices[self.sojourn_at(t)]

    def visited(self) -> List[int]:
        return sorted(self._by_vertex)


@dataclass
class Trajectory:
    """一次 VRJP 运行的完整样本路径"""
    events: List[JumpEvent] = field(default_factory=list)
    horizon: float = 0.0
    start: int = 0
    initial: InitialLocalTimes = field(default_factory=InitialLocalTimes)
    vertex_set: Dict[str, Any] = field(default_factory=lambda: {"kind": "full_line"})
    weight: Dict[str, Any] = field(default_factory=dict)
    engine: str = "reference"
    seed: Optional[int] = None
    config_digest: str = ""
    truncated: bool = False
    _index: Optional[LocalTimeIndex] = field(default=None, repr=False, compare=False)

    @property
    def index(self) -> LocalTimeIndex:
        if self._index is None:
            self._index = LocalTimeIndex(self)
        return self._index

    def check_time(self, t: float):
        if not 0.0 <= t <= self.horizon:
            raise TimeRangeError(f"查询时间 t={t!r} 超出 [0, {self.horizon!r}]")

    def local_time(self, x: int, t: Optional[float] = None) -> float:
        """
        L(x, t) = ℓ_x + [0, t] 内停留在 x 的时间

        Args:
            x: 顶点
            t: 时间，默认取 horizon
        """
        t = self.horizon if t is None else t
        self.check_time(t)
        return self.index.local_time(x, t)

    def position(self, t: float) -> int:
        """X_t（右连续）"""
        self.check_time(t)
        return self.index.position(t)

    def visited(self) -> List[int]:
        return self.index.visited()

    def path(self) -> List[int]:
        """骨架上的顶点序列"""
        return [self.start] + [e.target for e in self.events]

    def jump_times(self) -> List[float]:
        return [e.tau for e in self.events]

    def validate(self) -> bool:
        """检查骨架合法性：最近邻跳跃、τ 严格递增、首尾相接"""
        previous_tau = 0.0
        current = self.start
        for event in self.events:
            if event.source != current or abs(event.source - event.target) != 1:
                return False
            if not event.tau > previous_tau:
                return False
            previous_tau, current = event.tau, event.target
        return previous_tau <= self.horizon

    def to_dict(self) -> Dict[str, Any]:
        """转换为字典格式"""
        return {
            "events": [e.to_dict() for e in self.events],
            **self.meta_dict(),
        }

    def meta_dict(self) -> Dict[str, Any]:
        return {
            "horizon": self.horizon,
            "start": self.start,
            "initial": self.initial.to_dict(),
            "vertex_set": self.vertex_set,
            "weight": self.weight,
            "engine": self.engine,
            "seed": self.seed,
            "config_digest": self.config_digest,
            "truncated": self.truncated,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Trajectory":
        """从字典创建Trajectory对象"""
        return cls(
            events=[JumpEvent.from_dict(e) for e in data.get("events", [])],
            horizon=float(data.get("horizon", 0.0)),
            start=int(data.get("start", 0)),
            initial=InitialLocalTimes.from_dict(data.get("initial", {})),
            vertex_set=data.get("vertex_set", {"kind": "full_line"}),
            weight=data.get("weight", {}),
            engine=data.get("engine", "reference"),
            seed=data.get("seed"),
            config_digest=data.get("config_digest", ""),
            truncated=bool(data.get("truncated", False)),
        )

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(to_jsonable(self.to_dict()), ensure_ascii=False, indent=indent)

    @classmethod
    def from_json(cls, json_str: str) -> "Trajectory":
        return cls.from_dict(json.loads(json_str))

    def save_to_file(self, filepath: str):
        """保存为 JSON 状态文件"""
        atomic_write_text(filepath, self.to_json())

    @classmethod
    def load_from_file(cls, filepath: str) -> "Trajectory":
        with open(filepath, 'r', encoding='utf-8') as f:
            return cls.from_json(f.read())

    def to_csv(self, filepath: str) -> str:
        """
        导出为 CSV（n,tau,from,to）并写出元数据旁车文件

        Returns:
            元数据文件路径
        """
        rows = [(n, e.tau, e.source, e.target) for n, e in enumerate(self.events, 1)]
        write_csv(filepath, TRAJECTORY_HEADER, rows)
        meta_path = meta_path_for(filepath)
        atomic_write_text(meta_path, json.dumps(to_jsonable(self.meta_dict()), ensure_ascii=False, indent=2))
        return meta_path

    @classmethod
    def from_csv(cls, filepath: str, meta: Optional[Dict[str, Any]] = None) -> "Trajectory":
        """从 CSV 与元数据旁车文件还原轨迹"""
        header, rows = read_csv(filepath)
        if header != TRAJECTORY_HEADER:
            raise ConfigurationError(f"轨迹 CSV 表头应为 {','.join(TRAJECTORY_HEADER)}，实际为 {','.join(header)}")
        if meta is None:
            meta_path = meta_path_for(filepath)
            if not os.path.exists(meta_path):
                raise ConfigurationError(f"缺少轨迹元数据文件: {meta_path}")
            with open(meta_path, 'r', encoding='utf-8') as f:
                meta = json.load(f)
        data = dict(meta)
        data["events"] = [{"tau": row[1], "from": row[2], "to": row[3]} for row in rows]
        return cls.from_dict(data)

    def local_time_rows(self, t: Optional[float] = None) -> List[Tuple[int, float]]:
        """局部时间快照 (vertex, L)"""
        t = self.horizon if t is None else t
        return [(x, self.local_time(x, t)) for x in self.visited()]

    def write_local_times(self, filepath: str, t: Optional[float] = None):
        write_csv(filepath, ["vertex", "L"], self.local_time_rows(t))


def meta_path_for(csv_path: str) -> str:
    root, _ = os.path.splitext(csv_path)
    return root + ".meta.json"


__all__ = [
    "InitialLocalTimes",
    "JumpEvent",
    "ProcessState",
    "LocalTimeIndex",
    "Trajectory",
    "TRAJECTORY_HEADER",
    "meta_path_for",
]
