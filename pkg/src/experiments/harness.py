"""
实验执行框架
派生副本种子、并行执行副本、汇总为可自我验证的 Verdict 并写出产物
"""

import math
import os
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional, Tuple

from ..clocks.bank import substream_seed
from ..schemas.schemas import ExperimentConfig
from ..utils.config import resolve_seed
from ..utils.console import log_error, log_info
from ..utils.parallel import map_replicas, resolve_workers
from ..utils.serialization import canonical_json, digest, read_json, write_csv, write_json
from .base_experiment import Record, Summary
from .kinds import build_experiment

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2

VERDICT_FILE = "verdict.json"
REPLICAS_FILE = "replicas.csv"


@dataclass
class Verdict:
    """实验判定；pass 只由 replicas 中的记录决定"""
    experiment: str
    config: Dict[str, Any]
    seed: int
    n_replicas: int
    statistic: float
    threshold: float
    passed: bool
    ci: Optional[Tuple[float, float]] = None
    details: Dict[str, Any] = field(default_factory=dict)
    replicas: List[Record] = field(default_factory=list)
    provenance: Dict[str, Any] = field(default_factory=dict)
    timestamp: str = field(default_factory=lambda: datetime.now().isoformat())

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "experiment": self.experiment,
            "config": self.config,
            "seed": self.seed,
            "n_replicas": self.n_replicas,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "pass": self.passed,
            "ci": list(self.ci) if self.ci is not None else None,
            "details": self.details,
            "replicas": self.replicas,
            "provenance": self.provenance,
            "timestamp": self.timestamp,
        }
        data["digest"] = digest(data, exclude=("timestamp", "digest"))
        return data

    @property
    def digest(self) -> str:
        return self.to_dict()["digest"]

    @property
    def exit_code(self) -> int:
        return EXIT_PASS if self.passed else EXIT_FAIL

    def save(self, out_dir: str) -> str:
        """
        写出 verdict.json 与 replicas.csv

        Returns:
            verdict.json 的路径
        """
        path = os.path.join(out_dir, VERDICT_FILE)
        write_json(path, self.to_dict())
        header, rows = replica_table(self.replicas)
        write_csv(os.path.join(out_dir, REPLICAS_FILE), header, rows)
        return path


def replica_table(records: List[Record]) -> Tuple[List[str], List[List[Any]]]:
    """副本记录转为表格，列按首次出现的顺序；嵌套值写成规范 JSON"""
    header: List[str] = []
    for record in records:
        for key in record:
            if key not in header:
                header.append(key)
    rows = []
    for record in records:
        row = []
        for key in header:
            value = record.get(key)
            row.append(canonical_json(value) if isinstance(value, (dict, list, tuple)) else value)
        rows.append(row)
    return header, rows


def _code_version() -> str:
    from .. import __version__

    return __version__


def _run_one(task: Tuple[Dict[str, Any], int]) -> Record:
    """进程池任务：重建实验并运行第 index 个副本，异常记入记录而不中断系综"""
    config_data, index = task
    config = ExperimentConfig.model_validate(config_data)
    experiment = build_experiment(config)
    seed = substream_seed(config.seed, f"replica/{index}")
    try:
        data = experiment.run_replica(index, seed)
    except Exception as e:
        experiment.log_error(f"副本 {index} 失败: {type(e).__name__}: {e}")
        data = {"error": f"{type(e).__name__}: {e}"}
    return {"index": index, "seed": seed, **data}


def make_verdict(config: ExperimentConfig, records: List[Record], summary: Summary) -> Verdict:
    config_data = config.model_dump(mode="json")
    return Verdict(
        experiment=config.kind,
        config=config_data,
        seed=config.seed,
        n_replicas=len(records),
        statistic=summary.statistic,
        threshold=summary.threshold,
        passed=summary.passed,
        ci=summary.ci,
        details={"direction": summary.direction, **summary.details},
        replicas=records,
        provenance={"code_version": _code_version(), "config_digest": digest(config_data, exclude=())},
    )


def run_experiment(config: ExperimentConfig, out_dir: Optional[str] = None,
                   workers: Optional[int] = None) -> Verdict:
    """
    运行一个实验

    Args:
        config: 已校验的实验配置；seed 为空时使用运行时配置的 default_seed
        out_dir: 输出目录，None 时不写文件
        workers: 工作进程数，None 时读取 VRJP_LAB_THREADS；结果与它无关

    Returns:
        Verdict

    Raises:
        ConfigurationError: 配置与实验类型不相容（在任何副本运行之前）
    """
    if config.seed is None:
        config = config.model_copy(update={"seed": resolve_seed(None)})
    experiment = build_experiment(config)
    experiment.validate_input()

    workers = resolve_workers(workers)
    n = config.replicas
    log_info(config.kind, f"开始运行 {n} 个副本（{workers} 个工作进程），主种子 {config.seed}")

    config_data = config.model_dump(mode="json")
    records = map_replicas(_run_one, [(config_data, i) for i in range(n)], workers)
    errors = sum(1 for r in records if "error" in r)
    if errors:
        log_error(config.kind, f"{errors}/{n} 个副本出错，已记入结果")

    summary = experiment.summarize(records)
    verdict = make_verdict(config, records, summary)
    status = "通过" if verdict.passed else "未通过"
    log_info(config.kind, f"统计量 {verdict.statistic!r}，阈值 {verdict.threshold!r}：{status}")

    if out_dir is not None:
        path = verdict.save(out_dir)
        log_info(config.kind, f"结果已保存到: {path}")
    return verdict


def _restore(value: Any) -> Any:
    """还原 JSON 中以字符串写出的非有限浮点数"""
    if value in ("nan", "inf", "-inf"):
        return float(value)
    return value


def verify_verdict(data: Dict[str, Any]) -> bool:
    """
    由 Verdict 中保存的副本记录复算统计量与判定

    Args:
        data: verdict.json 的内容

    Returns:
        复算结果与记录的 statistic、pass 一致时为 True
    """
    config = ExperimentConfig.model_validate(data["config"])
    experiment = build_experiment(config)
    records = [{k: _restore(v) for k, v in r.items()} for r in data["replicas"]]
    summary = experiment.summarize(records)
    stored = float(_restore(data["statistic"]))
    same_statistic = (math.isnan(stored) and math.isnan(summary.statistic)) or stored == summary.statistic
    return same_statistic and summary.passed == data["pass"]


def load_verdict(path: str) -> Dict[str, Any]:
    return read_json(path)
