"""
实验类型
每种实验定义单个副本做什么，以及如何只由副本记录得出系综判定
"""

from typing import Dict, List, Type

import numpy as np

from ..clocks.bank import ClockBank, substream_seed
from ..coupling.canonical import ENGINES, CanonicalEngine, build_engine
from ..coupling.crossings import rho_replica, rho_report
from ..coupling.pairs import CoupledPair, run_coupled_pair
from ..coupling.restriction_check import restriction_check
from ..diagnostics.checks import (
    CheckpointSamples,
    checkpoint_checks,
    decomposition_residual,
    envelope_checks,
    pathwise_checks,
)
from ..diagnostics.limits import atom_diagnostics, replica_limit, require_strong, simulate_two_vertex
from ..diagnostics.series import compute_series
from ..process.vertex_set import VertexSet
from ..schemas.schemas import ExperimentConfig
from ..utils.errors import ConfigurationError, UnsupportedOperationError
from .base_experiment import BaseExperiment, FractionExperiment, Record, Summary, ok_records
from .detectors import detect_localization, detect_recurrence, transient_signature
from .stats import binomial_ci, ks_two_sample


def _require_two_vertex(vertex_set: VertexSet, kind: str):
    if not (vertex_set.is_finite() and (vertex_set.lo, vertex_set.hi) == (0, 1)):
        raise ConfigurationError(f"实验 {kind} 只定义在 {{0,1}} 上，收到 {vertex_set}")


def _count_summary(experiment: BaseExperiment, records: List[Record], key: str) -> Summary:
    """统计量为各副本 key 之和，出错的副本按失败计"""
    n = len(records)
    ok = ok_records(records)
    errors = n - len(ok)
    total = float(sum(r[key] for r in ok))
    failing = errors + sum(1 for r in ok if r[key] > 0)
    return Summary(
        statistic=total,
        threshold=experiment.config.threshold,
        direction=experiment.config.direction,
        passed=experiment.compare(total) and errors == 0,
        ci=binomial_ci(failing, n) if n else None,
        details={"failing_replicas": failing, "errors": errors},
    )


class LocalizationExperiment(FractionExperiment):
    """ℤ 上最后时间窗内恰好停留在三个相邻顶点"""

    kind = "localization"

    def run_replica(self, index: int, seed: int) -> Record:
        trajectory = self.simulate(seed)
        verdict = detect_localization(trajectory, self.config.window_fraction,
                                      self.config.side_tolerance, self.config.center_growth)
        return {
            "success": verdict.localized and verdict.side_plateau,
            **verdict.to_dict(),
            "jumps": len(trajectory.events),
            "truncated": trajectory.truncated,
        }


class RecurrenceExperiment(FractionExperiment):
    kind = "recurrence"

    def run_replica(self, index: int, seed: int) -> Record:
        trajectory = self.simulate(seed)
        verdict = detect_recurrence(trajectory, self.config.probes, self.config.checkpoint_fractions)
        return {
            "success": verdict.recurrent,
            "min_local_times": verdict.min_local_times,
            "visits": {str(x): counts for x, counts in verdict.visits.items()},
            "jumps": len(trajectory.events),
        }


class NontransienceExperiment(FractionExperiment):
    """瞬移特征的比例，阈值是上限"""

    kind = "nontransience"

    def run_replica(self, index: int, seed: int) -> Record:
        trajectory = self.simulate(seed)
        verdict = transient_signature(trajectory, self.config.early_fraction, self.config.window_fraction)
        return {"success": verdict.signature, **verdict.to_dict(), "jumps": len(trajectory.events)}


class TwoVertexWeakExperiment(FractionExperiment):
    """
    弱区间的两点图：两个局部时间都趋于无穷

    成功 = min(L(0,T), L(1,T)) 超过下限；另外要求每个副本的最小值在 early_fraction·T 到 T 之间严格增长。
    """

    kind = "two_vertex_weak"

    def validate_input(self):
        _require_two_vertex(self.vertex_set, self.kind)

    def run_replica(self, index: int, seed: int) -> Record:
        trajectory = self.simulate(seed, start=0)
        early = self.config.early_fraction * trajectory.horizon
        min_late = min(trajectory.local_time(0), trajectory.local_time(1))
        min_early = min(trajectory.local_time(0, early), trajectory.local_time(1, early))
        return {
            "success": min_late > self.config.min_local_time_floor,
            "min_local_time": min_late,
            "min_local_time_early": min_early,
            "increases": min_late > min_early,
            "jumps": len(trajectory.events),
        }

    def extra_checks(self, records: List[Record]) -> Dict[str, bool]:
        ok = ok_records(records)
        return {"all_increase": len(ok) == len(records) and all(r["increases"] for r in ok)}


class TwoVertexStrongExperiment(FractionExperiment):
    """
    强区间的两点图：最小局部时间停在平台，Z_T 的分布没有原子

    成功 = 最小局部时间从 (1 - window_fraction)·T 到 T 不变（相对容差内）。
    """

    kind = "two_vertex_strong"

    def validate_input(self):
        _require_two_vertex(self.vertex_set, self.kind)
        try:
            require_strong(self.weight)
        except UnsupportedOperationError as e:
            raise ConfigurationError(str(e)) from e

    def run_replica(self, index: int, seed: int) -> Record:
        result = replica_limit(self.weight, self.config.horizon, seed,
                               early_fraction=1.0 - self.config.window_fraction,
                               plateau_tolerance=self.config.plateau_tolerance,
                               engine=self.config.engine)
        return {"success": result["plateau"], **result}

    def _atoms(self, records: List[Record]):
        samples = [r["Z"] for r in ok_records(records)]
        if len(samples) < 2:
            return None
        return atom_diagnostics(samples, sorted(self.config.near_zero_eps, reverse=True))

    def extra_checks(self, records: List[Record]) -> Dict[str, bool]:
        atoms = self._atoms(records)
        if atoms is None:
            return {}
        smallest = f"{min(self.config.near_zero_eps):g}"
        return {
            "no_duplicates": atoms.duplicates == 0,
            "near_zero_rare": atoms.near_zero[smallest] < self.config.near_zero_threshold,
        }

    def summarize(self, records: List[Record]) -> Summary:
        summary = super().summarize(records)
        atoms = self._atoms(records)
        summary.details["atoms"] = atoms.to_dict() if atoms is not None else None
        return summary


class CouplingDominationExperiment(BaseExperiment):
    """共享时钟耦合对的严格支配，统计量为违反次数之和"""

    kind = "coupling_domination"

    def validate_input(self):
        _require_two_vertex(self.vertex_set, self.kind)

    def run_replica(self, index: int, seed: int) -> Record:
        pair = CoupledPair.create(self.weight, seed, rule=self.config.clock_rule)
        sequences = run_coupled_pair(pair, self.config.n_jumps)
        violations = sequences.domination_violations()
        return {
            "A": pair.A,
            "violations": len(violations),
            "first_violation": violations[0] if violations else None,
        }

    def summarize(self, records: List[Record]) -> Summary:
        return _count_summary(self, records, "violations")


class CouplingDistributionExperiment(BaseExperiment):
    """
    耦合对与独立过程的分布恒等式

    (L*(1, τ*_n), L*(0, τ*_n)) 与 (L̃(0, τ̃_{n+1}), L̃(1, τ̃_{n+1})) 同分布；统计量为各坐标 KS p 值的最小值。
    """

    kind = "coupling_distribution"

    def validate_input(self):
        _require_two_vertex(self.vertex_set, self.kind)

    def run_replica(self, index: int, seed: int) -> Record:
        horizon_n = max(self.config.n_values)
        pair = CoupledPair.create(self.weight, substream_seed(seed, "pair"), rule=self.config.clock_rule)
        star = run_coupled_pair(pair, horizon_n)

        tilde = CanonicalEngine(self.weight, VertexSet.segment(0, 1), ClockBank(substream_seed(seed, "tilde")),
                                start=0, rule=self.config.clock_rule)
        tilde_local = []
        for _ in range(horizon_n + 1):
            tilde.step()
            tilde_local.append((tilde.local_time(0), tilde.local_time(1)))

        record: Record = {"A": pair.A}
        for n in self.config.n_values:
            record[f"star_L0_{n}"] = float(star.star_L0[n - 1])
            record[f"star_L1_{n}"] = float(star.star_L1[n - 1])
            record[f"tilde_L0_{n + 1}"] = tilde_local[n][0]
            record[f"tilde_L1_{n + 1}"] = tilde_local[n][1]
        return record

    def summarize(self, records: List[Record]) -> Summary:
        ok = ok_records(records)
        errors = len(records) - len(ok)
        tests = {}
        if ok:
            for n in self.config.n_values:
                pairs = {
                    f"n={n}/star_L1~tilde_L0": (f"star_L1_{n}", f"tilde_L0_{n + 1}"),
                    f"n={n}/star_L0~tilde_L1": (f"star_L0_{n}", f"tilde_L1_{n + 1}"),
                }
                for name, (left, right) in pairs.items():
                    tests[name] = ks_two_sample([r[left] for r in ok], [r[right] for r in ok], self.config.alpha)
        statistic = min((t.p for t in tests.values()), default=float("nan"))
        return Summary(
            statistic=statistic,
            threshold=self.config.threshold,
            direction=self.config.direction,
            passed=self.compare(statistic) and errors == 0,
            details={"ks": {name: t.to_dict() for name, t in tests.items()}, "errors": errors},
        )


class RhoSurplusExperiment(BaseExperiment):
    """
    截断 ρ_M(a, b) 的正性

    统计量为 ρ̂ / 标准误，同时要求积分恒等式两侧在 3 倍合成标准误内一致。
    L(0) 先到达 rho_cap 的副本按 M 计入。
    """

    kind = "rho_surplus"

    def _levels(self) -> np.ndarray:
        return np.linspace(self.config.rho_b, self.config.rho_a, self.config.rho_grid_points)

    def run_replica(self, index: int, seed: int) -> Record:
        return rho_replica(self.weight, self.config.rho_a, self.config.rho_b, seed, self._levels(),
                           cap=self.config.rho_cap)

    def summarize(self, records: List[Record]) -> Summary:
        ok = ok_records(records)
        errors = len(records) - len(ok)
        if not ok:
            return Summary(float("nan"), self.config.threshold, self.config.direction, False,
                           details={"errors": errors})
        report = rho_report(self.config.rho_a, self.config.rho_b, [r["L0_at_xi"] for r in ok],
                            [r["integral"] for r in ok], self._levels(), cap=self.config.rho_cap,
                            censored=sum(1 for r in ok if r.get("censored")))
        statistic = report.rho_hat / report.stderr if report.stderr > 0 else float("nan")
        return Summary(
            statistic=statistic,
            threshold=self.config.threshold,
            direction=self.config.direction,
            passed=self.compare(statistic) and report.eq_mean_consistent and errors == 0,
            ci=(report.rho_hat - 3.0 * report.stderr, report.rho_hat + 3.0 * report.stderr),
            details={"rho": report.to_dict(), "eq_mean_consistent": report.eq_mean_consistent,
                     "errors": errors},
        )


class EngineComparisonExperiment(BaseExperiment):
    """
    三个引擎在 X_{τ5} 与 L(0, τ10) 上的分布比较

    判定只看参考引擎与累积规则规范引擎；字面规则的 p 值只作报告。
    """

    kind = "engine_comparison"
    POSITION_JUMP = 5
    LOCAL_TIME_JUMP = 10

    def run_replica(self, index: int, seed: int) -> Record:
        record: Record = {}
        for name in ENGINES:
            simulator = build_engine(name, self.weight, self.vertex_set, ClockBank(substream_seed(seed, name)))
            trajectory = simulator.run(max_jumps=self.LOCAL_TIME_JUMP)
            record[f"{name}_X5"] = trajectory.events[self.POSITION_JUMP - 1].target
            record[f"{name}_L0_10"] = trajectory.local_time(0)
        return record

    def summarize(self, records: List[Record]) -> Summary:
        ok = ok_records(records)
        errors = len(records) - len(ok)
        tests = {}
        if ok:
            for other in ("canonical_cumulative", "canonical_literal"):
                for column in ("X5", "L0_10"):
                    tests[f"reference~{other}/{column}"] = ks_two_sample(
                        [r[f"reference_{column}"] for r in ok], [r[f"{other}_{column}"] for r in ok],
                        self.config.alpha)
        gated = [t.p for name, t in tests.items() if "canonical_cumulative" in name]
        statistic = min(gated, default=float("nan"))
        return Summary(
            statistic=statistic,
            threshold=self.config.threshold,
            direction=self.config.direction,
            passed=self.compare(statistic) and errors == 0,
            details={"ks": {name: t.to_dict() for name, t in tests.items()}, "errors": errors},
        )


class DiagnosticsSuiteExperiment(BaseExperiment):
    """
    两点图上的路径恒等式与系综鞅检验

    每个副本：分解残差、逐路径界、一对随机 (t, s) 的包络界，并记录检查时刻的鞅样本。
    统计量为未通过路径检查的副本数；副本数不少于 min_ensemble 时还要通过鞅检验。
    """

    kind = "diagnostics_suite"

    def validate_input(self):
        _require_two_vertex(self.vertex_set, self.kind)
        latest = max(self.config.checkpoints) + max(self.config.drift_steps)
        if latest > self.config.horizon:
            raise ConfigurationError(
                f"检查时刻加步长 {latest!r} 超过终止时间 {self.config.horizon!r}")

    def run_replica(self, index: int, seed: int) -> Record:
        trajectory = simulate_two_vertex(self.weight, self.config.horizon, seed, self.config.engine)
        series = compute_series(trajectory, self.weight)

        residual = decomposition_residual(series, relative=True)
        failures = [c.name for c in pathwise_checks(series) if not c.passed]

        rng = np.random.Generator(np.random.Philox(substream_seed(seed, "envelope")))
        t, s = sorted(float(u) for u in rng.uniform(0.0, trajectory.horizon, size=2))
        envelope = envelope_checks(series, t, s)
        if not envelope.passed:
            failures.append("envelope")
        if residual > self.config.residual_tolerance:
            failures.append("decomposition")

        record: Record = {
            "failures": len(failures),
            "failed_checks": ";".join(failures),
            "residual": residual,
            "envelope_t": t,
            "envelope_s": s,
            "jumps": len(trajectory.events),
        }
        for cp in self.config.checkpoints:
            point = series.at(cp)
            record[f"M@{cp:g}"] = point.M
            record[f"angleM@{cp:g}"] = point.angleM
            record[f"X@{cp:g}"] = point.X
            record[f"Pi@{cp:g}"] = point.Pi
            record[f"Lambda@{cp:g}"] = point.Lambda
            for h in self.config.drift_steps:
                record[f"X@{cp:g}+{h:g}"] = series.at(cp + h).X
        return record

    def _samples(self, records: List[Record], cp: float) -> CheckpointSamples:
        def column(key: str) -> np.ndarray:
            return np.array([r[key] for r in records], dtype=float)

        return CheckpointSamples(
            t=cp,
            M=column(f"M@{cp:g}"),
            bracket=column(f"angleM@{cp:g}"),
            X=column(f"X@{cp:g}"),
            Pi=column(f"Pi@{cp:g}"),
            Lam=column(f"Lambda@{cp:g}"),
            ahead={h: column(f"X@{cp:g}+{h:g}") for h in self.config.drift_steps},
        )

    def summarize(self, records: List[Record]) -> Summary:
        summary = _count_summary(self, records, "failures")
        ok = ok_records(records)
        if len(ok) < self.config.min_ensemble:
            summary.details["martingale"] = f"skipped: {len(ok)} < {self.config.min_ensemble} replicas"
            return summary

        checks, ratios = [], {}
        for cp in self.config.checkpoints:
            found, drift = checkpoint_checks(self._samples(ok, cp))
            checks.extend(found)
            ratios[f"{cp:g}"] = drift
        martingale_ok = all(c.passed for c in checks)
        summary.passed = summary.passed and martingale_ok
        summary.details["martingale"] = {
            "pass": martingale_ok,
            "checks": [c.to_dict() for c in checks],
            "drift_ratios": ratios,
        }
        return summary


class RestrictionExperiment(BaseExperiment):
    """完整过程限制到 B 后与 B 上的延拓逐事件一致，统计量为不一致的 (副本, B) 个数"""

    kind = "restriction"

    def _subsets(self) -> List[VertexSet]:
        return [VertexSet.mask(vertices) for vertices in self.config.restriction_sets]

    def validate_input(self):
        for subset in self._subsets():
            if not subset.is_subset_of(self.vertex_set):
                raise ConfigurationError(f"B = {subset} 不是 {self.vertex_set} 的子集")

    def run_replica(self, index: int, seed: int) -> Record:
        record: Record = {"mismatches": 0}
        for subset in self._subsets():
            check = restriction_check(seed, self.weight, subset, self.config.horizon,
                                      full_set=self.vertex_set, rule=self.config.clock_rule)
            label = f"{subset.lo}..{subset.hi}"
            record[f"matched[{label}]"] = check.matched
            record[f"events[{label}]"] = check.n_events
            if not check.matched:
                record["mismatches"] += 1
                self.log_debug(f"种子 {seed}，B = {label}: {'; '.join(check.details)}")
        return record

    def summarize(self, records: List[Record]) -> Summary:
        return _count_summary(self, records, "mismatches")


KINDS: Dict[str, Type[BaseExperiment]] = {
    cls.kind: cls
    for cls in (
        LocalizationExperiment,
        RecurrenceExperiment,
        NontransienceExperiment,
        TwoVertexWeakExperiment,
        TwoVertexStrongExperiment,
        CouplingDominationExperiment,
        CouplingDistributionExperiment,
        RhoSurplusExperiment,
        EngineComparisonExperiment,
        DiagnosticsSuiteExperiment,
        RestrictionExperiment,
    )
}


def build_experiment(config: ExperimentConfig) -> BaseExperiment:
    """按 config.kind 构造实验"""
    try:
        cls = KINDS[config.kind]
    except KeyError:
        raise ConfigurationError(f"未知的实验类型: {config.kind!r}") from None
    return cls(config, experiment_name=config.kind)
