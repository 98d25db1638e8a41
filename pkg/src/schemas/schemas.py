"""
配置模式定义
所有 JSON 配置都先经过这里的 pydantic 模型校验，错误一次性全部报告
"""

import math
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, field_validator, model_validator

U64_MAX = 2 ** 64

ExperimentKind = Literal[
    "localization",
    "recurrence",
    "nontransience",
    "two_vertex_weak",
    "two_vertex_strong",
    "coupling_domination",
    "coupling_distribution",
    "rho_surplus",
    "engine_comparison",
    "diagnostics_suite",
    "restriction",
]

EngineName = Literal["reference", "canonical_literal", "canonical_cumulative"]
ClockRuleName = Literal["literal", "cumulative"]
Direction = Literal["min", "max"]


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# ---------------------------------------------------------------------------
# 权重函数

class LinearSpec(_Spec):
    """w(t) = t"""
    kind: Literal["linear"] = "linear"


class PowerSpec(_Spec):
    """w(t) = t^a"""
    kind: Literal["power"] = "power"
    a: float

    @field_validator("a")
    @classmethod
    def _positive_exponent(cls, value: float) -> float:
        if not (math.isfinite(value) and value > 0):
            raise ValueError("exponent must be > 0")
        return value


class ExpShiftedSpec(_Spec):
    """w(t) = exp(a(t-1))"""
    kind: Literal["exp_shifted"] = "exp_shifted"
    a: float

    @field_validator("a")
    @classmethod
    def _positive_rate(cls, value: float) -> float:
        if not (math.isfinite(value) and value > 0):
            raise ValueError("rate must be > 0")
        return value


WeightSpec = Annotated[Union[LinearSpec, PowerSpec, ExpShiftedSpec], Field(discriminator="kind")]
WEIGHT_SPEC_ADAPTER = TypeAdapter(WeightSpec)


# ---------------------------------------------------------------------------
# 顶点集

class FullLineSpec(_Spec):
    kind: Literal["full_line"] = "full_line"


class HalfLineSpec(_Spec):
    kind: Literal["half_line"] = "half_line"


class HalfLineMinusSpec(_Spec):
    kind: Literal["half_line_minus"] = "half_line_minus"


class SegmentSpec(_Spec):
    kind: Literal["segment"] = "segment"
    lo: int
    hi: int

    @model_validator(mode="after")
    def _ordered(self) -> "SegmentSpec":
        if self.hi <= self.lo:
            raise ValueError("segment needs lo < hi (at least two vertices)")
        return self


class MaskSpec(_Spec):
    kind: Literal["mask"] = "mask"
    vertices: Tuple[int, ...]

    @field_validator("vertices")
    @classmethod
    def _connected(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        ordered = sorted(set(value))
        if len(ordered) < 2:
            raise ValueError("mask needs at least two vertices")
        if ordered[-1] - ordered[0] != len(ordered) - 1:
            raise ValueError("mask vertices must form a connected integer interval")
        return tuple(ordered)


GraphSpec = Annotated[
    Union[FullLineSpec, HalfLineSpec, HalfLineMinusSpec, SegmentSpec, MaskSpec],
    Field(discriminator="kind"),
]


def _tagged(value: Any) -> Any:
    """允许用字符串简写无参数的标签，如 "full_line" 或 "linear" """
    if isinstance(value, str):
        return {"kind": value}
    return value


class _Config(BaseModel):
    model_config = ConfigDict(extra="forbid")

    @field_validator("weight", "graph", mode="before", check_fields=False)
    @classmethod
    def _coerce_tags(cls, value: Any) -> Any:
        return _tagged(value)


# ---------------------------------------------------------------------------
# 子命令配置

class SimulationConfig(_Config):
    """simulate 子命令配置"""
    weight: WeightSpec = LinearSpec()
    graph: GraphSpec = FullLineSpec()
    horizon: Optional[float] = Field(None, gt=0)
    max_jumps: Optional[int] = Field(None, ge=1)
    initial_local_time: float = Field(1.0, ge=1)
    initial_overrides: Dict[int, float] = Field(default_factory=dict)
    start: Optional[int] = None
    engine: EngineName = "reference"
    seed: Optional[int] = Field(None, ge=0, lt=U64_MAX)

    @field_validator("initial_overrides")
    @classmethod
    def _overrides_at_least_one(cls, value: Dict[int, float]) -> Dict[int, float]:
        bad = sorted(x for x, v in value.items() if not (math.isfinite(v) and v >= 1))
        if bad:
            raise ValueError(f"initial local times must be finite and >= 1 (vertices {bad})")
        return value

    @model_validator(mode="after")
    def _stopping_rule(self) -> "SimulationConfig":
        if self.horizon is None and self.max_jumps is None:
            raise ValueError("either horizon or max_jumps must be given")
        return self


class CouplingConfig(_Config):
    """couple 子命令配置"""
    weight: WeightSpec = PowerSpec(a=2.0)
    n_jumps: int = Field(200, ge=1)
    A: Optional[float] = Field(None, ge=0)
    clock_rule: ClockRuleName = "literal"
    seed: Optional[int] = Field(None, ge=0, lt=U64_MAX)


class DiagnoseConfig(_Config):
    """diagnose 子命令配置；weight 为空时使用轨迹记录的权重"""
    weight: Optional[WeightSpec] = None
    trajectory: Optional[str] = None
    grid_step: Optional[float] = Field(None, gt=0)
    envelope_pairs: List[Tuple[float, float]] = Field(default_factory=list)
    residual_tolerance: float = Field(1e-8, gt=0)

    @field_validator("envelope_pairs")
    @classmethod
    def _ordered_pairs(cls, value: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        for t, s in value:
            if not 0 <= t <= s:
                raise ValueError(f"envelope pair needs 0 <= t <= s, got ({t}, {s})")
        return value


# ---------------------------------------------------------------------------
# 实验配置

KIND_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "localization": dict(weight=PowerSpec(a=2.0), graph=FullLineSpec(), horizon=1e4,
                         replicas=500, threshold=0.95, direction="min"),
    "recurrence": dict(weight=LinearSpec(), graph=FullLineSpec(), horizon=1e4,
                       replicas=500, threshold=0.99, direction="min"),
    "nontransience": dict(weight=LinearSpec(), graph=FullLineSpec(), horizon=1e4,
                          replicas=500, threshold=0.01, direction="max"),
    "two_vertex_weak": dict(weight=LinearSpec(), graph=SegmentSpec(lo=0, hi=1), horizon=1e4,
                            replicas=500, threshold=0.99, direction="min"),
    "two_vertex_strong": dict(weight=PowerSpec(a=2.0), graph=SegmentSpec(lo=0, hi=1), horizon=1e4,
                              replicas=10000, threshold=0.99, direction="min"),
    "coupling_domination": dict(weight=PowerSpec(a=2.0), graph=SegmentSpec(lo=0, hi=1),
                                replicas=1000, threshold=0.0, direction="max"),
    "coupling_distribution": dict(weight=PowerSpec(a=2.0), graph=SegmentSpec(lo=0, hi=1),
                                  replicas=10000, threshold=None, direction="min"),
    "rho_surplus": dict(weight=PowerSpec(a=2.0), graph=SegmentSpec(lo=0, hi=1),
                        replicas=100000, threshold=3.0, direction="min"),
    "engine_comparison": dict(weight=LinearSpec(), graph=FullLineSpec(),
                              replicas=10000, threshold=None, direction="min"),
    "diagnostics_suite": dict(weight=PowerSpec(a=2.0), graph=SegmentSpec(lo=0, hi=1), horizon=20.0,
                              replicas=1000, threshold=0.0, direction="max"),
    "restriction": dict(weight=PowerSpec(a=2.0), graph=HalfLineSpec(), horizon=50.0,
                        replicas=200, threshold=0.0, direction="max", clock_rule="cumulative"),
}

_HORIZON_KINDS = {
    "localization", "recurrence", "nontransience", "two_vertex_weak",
    "two_vertex_strong", "diagnostics_suite", "restriction",
}


class ExperimentConfig(_Config):
    """experiment 子命令配置，缺省字段按实验类型补齐"""
    kind: ExperimentKind
    weight: Optional[WeightSpec] = None
    graph: Optional[GraphSpec] = None
    horizon: Optional[float] = Field(None, gt=0)
    max_jumps: Optional[int] = Field(None, ge=1)
    replicas: Optional[int] = Field(None, ge=1)
    seed: Optional[int] = Field(None, ge=0, lt=U64_MAX)
    alpha: float = Field(0.01, gt=0, lt=1)
    threshold: Optional[float] = None
    direction: Optional[Direction] = None
    engine: EngineName = "reference"
    clock_rule: Optional[ClockRuleName] = None

    # 局部化 / 常返探测参数
    window_fraction: float = Field(0.5, gt=0, lt=1)
    side_tolerance: float = Field(0.05, gt=0)
    center_growth: float = Field(0.5, gt=0)
    early_fraction: float = Field(0.1, gt=0, lt=1)
    probes: List[int] = Field(default_factory=lambda: list(range(-3, 4)))
    checkpoint_fractions: List[float] = Field(default_factory=lambda: [0.25, 0.5, 1.0])

    # 两点图参数
    plateau_tolerance: float = Field(1e-6, ge=0)
    min_local_time_floor: float = Field(100.0, ge=1)
    near_zero_eps: List[float] = Field(default_factory=lambda: [1e-1, 1e-2, 1e-3])
    near_zero_threshold: float = Field(0.01, gt=0, lt=1)

    # 耦合参数
    n_jumps: int = Field(200, ge=1)
    n_values: List[int] = Field(default_factory=lambda: [2, 5, 10])
    rho_a: float = Field(3.0, ge=1)
    rho_b: float = Field(2.0, ge=1)
    rho_grid_points: int = Field(32, ge=2)
    rho_cap: float = Field(100.0, gt=1)

    # 诊断参数
    residual_tolerance: float = Field(1e-8, gt=0)
    checkpoints: List[float] = Field(default_factory=lambda: [1.0, 5.0, 10.0])
    drift_steps: List[float] = Field(default_factory=lambda: [0.01, 0.005])
    min_ensemble: int = Field(1000, ge=1)
    restriction_sets: List[List[int]] = Field(
        default_factory=lambda: [[0, 1], [0, 1, 2], [0, 1, 2, 3, 4, 5]])

    @field_validator("checkpoint_fractions")
    @classmethod
    def _fractions(cls, value: List[float]) -> List[float]:
        if not value or any(not 0 < f <= 1 for f in value) or sorted(value) != value:
            raise ValueError("checkpoint fractions must be increasing values in (0, 1]")
        return value

    @field_validator("n_values")
    @classmethod
    def _positive_indices(cls, value: List[int]) -> List[int]:
        if not value or any(n < 1 for n in value):
            raise ValueError("n_values must be positive jump indices")
        return value

    @field_validator("restriction_sets")
    @classmethod
    def _connected_sets(cls, value: List[List[int]]) -> List[List[int]]:
        for vertices in value:
            MaskSpec(vertices=tuple(vertices))
        return value

    @field_validator("probes", "near_zero_eps", "checkpoints", "drift_steps")
    @classmethod
    def _non_empty(cls, value: List[Any]) -> List[Any]:
        if not value:
            raise ValueError("list must not be empty")
        return value

    @model_validator(mode="after")
    def _fill_kind_defaults(self) -> "ExperimentConfig":
        defaults = KIND_DEFAULTS[self.kind]
        for name in ("weight", "graph", "horizon", "replicas", "direction", "clock_rule"):
            if getattr(self, name) is None and defaults.get(name) is not None:
                setattr(self, name, defaults[name])
        if self.clock_rule is None:
            self.clock_rule = "literal"
        if self.threshold is None:
            self.threshold = defaults["threshold"] if defaults["threshold"] is not None else self.alpha
        if self.kind in _HORIZON_KINDS and self.horizon is None:
            raise ValueError(f"experiment kind {self.kind} needs a horizon")
        if self.kind == "rho_surplus" and not self.rho_a > self.rho_b:
            raise ValueError("rho_surplus needs rho_a > rho_b")
        if self.kind == "rho_surplus" and not self.rho_cap > self.rho_a:
            raise ValueError("rho_surplus needs rho_cap > rho_a")
        return self


def format_validation_error(error: ValidationError) -> List[str]:
    """把 pydantic 的聚合错误展开为字段级消息列表"""
    messages = []
    for item in error.errors():
        location = ".".join(str(part) for part in item.get("loc", ())) or "<root>"
        messages.append(f"{location}: {item.get('msg', '')}")
    return messages
