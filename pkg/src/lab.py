"""
VRJP Lab 主类
整合权重、引擎、耦合、诊断与实验模块，每个子命令对应一个方法
"""

import os
from typing import Any, Callable, Dict, Optional, Union

from .clocks import ClockBank
from .coupling import CoupledPair, PairSequences, build_engine, run_coupled_pair
from .diagnostics import (
    DiagnosticSeries,
    compute_series,
    decomposition_residual,
    envelope_checks,
    pathwise_checks,
)
from .experiments import Verdict, run_experiment
from .process import VertexSet
from .schemas import CouplingConfig, DiagnoseConfig, ExperimentConfig, SimulationConfig
from .state import InitialLocalTimes, Trajectory
from .utils import (
    Config,
    digest,
    load_config,
    log_info,
    log_warning,
    resolve_seed,
    set_verbosity,
    write_json,
)
from .utils.console import NORMAL, VERBOSE
from .utils.errors import ConfigurationError
from .weights import CustomMonotone, RegimeReport, WeightFunction, classify_regime, weight_from_spec


def load_trajectory(path: str) -> Trajectory:
    """读取 simulate 导出的轨迹：.json 状态文件，或 CSV 加 .meta.json 旁车文件"""
    if not os.path.exists(path):
        raise ConfigurationError(f"轨迹文件不存在: {path}")
    if path.endswith(".json"):
        return Trajectory.load_from_file(path)
    return Trajectory.from_csv(path)


class VrjpLab:
    """VRJP Lab 主类"""

    def __init__(self, config: Optional[Config] = None):
        """
        初始化 VRJP Lab

        Args:
            config: 运行时配置，如果不提供则自动加载
        """
        self.config = config or load_config()
        set_verbosity(VERBOSE if self.config.verbose else NORMAL)

    def _seed(self, seed: Optional[int]) -> int:
        return resolve_seed(seed, self.config)

    def _out_dir(self, out_dir: Optional[str], name: str) -> str:
        return out_dir or os.path.join(self.config.output_dir, name)

    def simulate(self, sim_config: SimulationConfig, out_dir: Optional[str] = None) -> Trajectory:
        """
        模拟一条轨迹，写出 trajectory.csv（带元数据）、trajectory.json 与 local_times.csv

        Args:
            sim_config: simulate 配置
            out_dir: 输出目录，默认 <output_dir>/simulate

        Returns:
            轨迹
        """
        seed = self._seed(sim_config.seed)
        weight = weight_from_spec(sim_config.weight)
        vertex_set = VertexSet.from_dict(sim_config.graph)
        initial = InitialLocalTimes(sim_config.initial_local_time, dict(sim_config.initial_overrides))
        log_info("Simulate", f"{weight.describe()} 在 {vertex_set} 上，引擎 {sim_config.engine}，种子 {seed}")

        engine = build_engine(sim_config.engine, weight, vertex_set, ClockBank(seed),
                              initial=initial, start=sim_config.start)
        max_jumps = sim_config.max_jumps
        if max_jumps is None and sim_config.horizon is not None:
            max_jumps = self.config.max_jumps
        trajectory = engine.run(horizon=sim_config.horizon, max_jumps=max_jumps)
        trajectory.config_digest = digest(sim_config.model_dump(mode="json"), exclude=())
        if trajectory.truncated:
            log_warning("Simulate", f"跳跃数达到上限 {max_jumps}，轨迹在 τ={trajectory.horizon!r} 截断")

        out_dir = self._out_dir(out_dir, "simulate")
        trajectory.to_csv(os.path.join(out_dir, "trajectory.csv"))
        trajectory.save_to_file(os.path.join(out_dir, "trajectory.json"))
        trajectory.write_local_times(os.path.join(out_dir, "local_times.csv"))
        log_info("Simulate", f"{len(trajectory.events)} 次跳跃，终止时间 {trajectory.horizon!r}，已保存到: {out_dir}")
        return trajectory

    def couple(self, coupling_config: CouplingConfig, out_dir: Optional[str] = None) -> PairSequences:
        """运行一个共享时钟耦合对，写出 pairs.csv 与 coupling.json"""
        seed = self._seed(coupling_config.seed)
        weight = weight_from_spec(coupling_config.weight)
        pair = CoupledPair.create(weight, seed, A=coupling_config.A, rule=coupling_config.clock_rule)
        sequences = run_coupled_pair(pair, coupling_config.n_jumps)
        violations = sequences.domination_violations()

        out_dir = self._out_dir(out_dir, "couple")
        sequences.to_csv(os.path.join(out_dir, "pairs.csv"))
        write_json(os.path.join(out_dir, "coupling.json"), {
            "seed": seed,
            "weight": weight.to_spec(),
            "A": pair.A,
            "n_jumps": coupling_config.n_jumps,
            "clock_rule": coupling_config.clock_rule,
            "violations": violations,
        })
        log_info("Couple", f"A = {pair.A!r}，{coupling_config.n_jumps} 次跳跃中违反支配 {len(violations)} 次")
        return sequences

    def _diagnose_weight(self, diagnose_config: DiagnoseConfig, trajectory: Trajectory) -> WeightFunction:
        if diagnose_config.weight is not None:
            weight = weight_from_spec(diagnose_config.weight)
            if trajectory.weight and trajectory.weight != weight.to_spec():
                log_warning("Diagnose", f"配置的权重 {weight.describe()} 与轨迹记录的 {trajectory.weight} 不同")
            return weight
        if not trajectory.weight:
            raise ConfigurationError("轨迹没有记录权重，请在配置中给出 weight")
        return weight_from_spec(trajectory.weight)

    def diagnose(self, diagnose_config: DiagnoseConfig, trajectory: Optional[Trajectory] = None,
                 out_dir: Optional[str] = None) -> Dict[str, Any]:
        """
        两顶点轨迹的泛函序列与路径检查，写出 series.csv 与 checks.json

        Args:
            diagnose_config: diagnose 配置
            trajectory: 内存中的轨迹，为空时按配置中的路径读取
            out_dir: 输出目录

        Returns:
            检查报告
        """
        if trajectory is None:
            if not diagnose_config.trajectory:
                raise ConfigurationError("diagnose 需要轨迹文件")
            trajectory = load_trajectory(diagnose_config.trajectory)
        weight = self._diagnose_weight(diagnose_config, trajectory)
        series: DiagnosticSeries = compute_series(trajectory, weight, diagnose_config.grid_step)

        residual = decomposition_residual(series, relative=True)
        checks = pathwise_checks(series)
        envelopes = [envelope_checks(series, t, s) for t, s in diagnose_config.envelope_pairs]
        report = {
            "weight": weight.to_spec(),
            "seed": trajectory.seed,
            "horizon": trajectory.horizon,
            "n_samples": len(series),
            "decomposition_residual": residual,
            "residual_tolerance": diagnose_config.residual_tolerance,
            "residual_pass": residual < diagnose_config.residual_tolerance,
            "checks": [c.to_dict() for c in checks],
            "envelopes": [e.to_dict() for e in envelopes],
        }
        report["pass"] = (report["residual_pass"] and all(c.passed for c in checks)
                          and all(e.passed for e in envelopes))

        out_dir = self._out_dir(out_dir, "diagnose")
        series.to_csv(os.path.join(out_dir, "series.csv"))
        write_json(os.path.join(out_dir, "checks.json"), report)
        log_info("Diagnose", f"分解残差 {residual!r}，已保存到: {out_dir}")
        return report

    def experiment(self, experiment_config: ExperimentConfig, out_dir: Optional[str] = None) -> Verdict:
        """运行实验，写出 verdict.json 与 replicas.csv；配置未给出种子时使用运行时配置的 default_seed"""
        experiment_config = experiment_config.model_copy(update={"seed": self._seed(experiment_config.seed)})
        out_dir = self._out_dir(out_dir, os.path.join("experiments", experiment_config.kind))
        return run_experiment(experiment_config, out_dir=out_dir, workers=self.config.threads)

    def custom_weight(self, evaluator: Callable[[float], float], converges: bool, name: str = "custom",
                      continuous: bool = True) -> CustomMonotone:
        """用运行时配置的积分容差构造自定义权重（只能通过库接口使用）"""
        return CustomMonotone(evaluator, converges, name=name, continuous=continuous,
                              tolerance=self.config.quadrature_tolerance)

    def regime(self, weight_spec: Union[Dict[str, Any], WeightFunction]) -> RegimeReport:
        """权重函数的强弱区分类"""
        return classify_regime(weight_from_spec(weight_spec))


def create_lab(config_file: Optional[str] = None) -> VrjpLab:
    """
    创建 VRJP Lab 实例的便捷函数

    Args:
        config_file: 配置文件路径

    Returns:
        VrjpLab 实例
    """
    config = load_config(config_file)
    return VrjpLab(config)
