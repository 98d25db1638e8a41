"""检测器、统计检验、实验类型与执行框架"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from conftest import make_trajectory, unit_path
from src.experiments import (
    EXIT_FAIL,
    EXIT_PASS,
    KINDS,
    binomial_ci,
    build_experiment,
    detect_localization,
    detect_recurrence,
    ks_two_sample,
    load_verdict,
    mean_stderr,
    replica_table,
    run_experiment,
    transient_signature,
    verify_verdict,
)
from src.experiments import kinds
from src.schemas import ExperimentConfig
from src.utils.config import DEFAULT_SEED
from src.utils.errors import ConfigurationError, EmptySampleError, ExplosionError


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    monkeypatch.delenv("VRJP_LAB_THREADS", raising=False)


def localized_trajectory():
    jumps = [(1.0, 0, 1), (1.01, 1, 0), (3.0, 0, -1), (3.01, -1, 0),
             (12.0, 0, 1), (12.01, 1, 0), (15.0, 0, -1), (15.01, -1, 0)]
    return make_trajectory(jumps, horizon=20.0)


def test_localization_detector():
    verdict = detect_localization(localized_trajectory())
    assert verdict.localized
    assert verdict.center == 0
    assert verdict.side_plateau
    assert verdict.window_vertices == [-1, 0, 1]


def test_localization_needs_jumps_in_window():
    verdict = detect_localization(make_trajectory([(1.0, 0, 1)], horizon=10.0))
    assert verdict.degenerate
    assert not verdict.localized


def test_ballistic_path_is_transient_not_localized():
    trajectory = make_trajectory(unit_path(list(range(21))), horizon=20.5)
    assert not detect_localization(trajectory).localized
    signature = transient_signature(trajectory)
    assert signature.signature
    assert signature.last_visit_to_start == 1.0
    assert signature.displacement_growing


def test_back_and_forth_is_recurrent():
    trajectory = make_trajectory(unit_path([0] + [1, 0, -1, 0] * 10), horizon=40.5)
    verdict = detect_recurrence(trajectory, probes=[-1, 0, 1])
    assert verdict.recurrent
    assert all(np.diff(verdict.min_local_times) > 0)
    assert not transient_signature(trajectory).signature
    # 从未访问的探测点使判定失败
    assert not detect_recurrence(trajectory, probes=[-2, -1, 0, 1, 2]).recurrent


def test_ks_two_sample():
    same = ks_two_sample([1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 3.0, 4.0])
    assert same.D == 0.0
    assert not same.reject
    disjoint = ks_two_sample(np.arange(50.0), np.arange(50.0) + 100.0)
    assert disjoint.D == 1.0
    assert disjoint.reject
    with pytest.raises(EmptySampleError):
        ks_two_sample([], [1.0])


def test_binomial_ci():
    low, high = binomial_ci(5, 10)
    assert low < 0.5 < high
    low, high = binomial_ci(0, 1)
    assert low == pytest.approx(0.0, abs=1e-12)
    assert 0.0 < high < 1.0
    with pytest.raises(EmptySampleError):
        binomial_ci(0, 0)


def test_mean_stderr():
    mean, se = mean_stderr([1.0, 2.0, 3.0])
    assert mean == 2.0
    assert se == pytest.approx(1.0 / math.sqrt(3.0))
    assert math.isnan(mean_stderr([4.0])[1])


def test_replica_table():
    header, rows = replica_table([{"a": 1}, {"a": 2, "b": [1, 2]}])
    assert header == ["a", "b"]
    assert rows == [[1, None], [2, "[1,2]"]]


def test_every_kind_is_registered():
    assert set(KINDS) == {
        "localization", "recurrence", "nontransience", "two_vertex_weak", "two_vertex_strong",
        "coupling_domination", "coupling_distribution", "rho_surplus", "engine_comparison",
        "diagnostics_suite", "restriction",
    }


def test_kind_defaults_are_filled():
    config = ExperimentConfig(kind="localization")
    assert config.replicas == 500
    assert config.threshold == 0.95
    assert config.direction == "min"
    assert config.horizon == 1e4
    config = ExperimentConfig(kind="coupling_distribution")
    assert config.threshold == config.alpha


def test_coupling_domination_verdict(tmp_path):
    config = ExperimentConfig(kind="coupling_domination", replicas=5, n_jumps=50, seed=7)
    verdict = run_experiment(config, out_dir=str(tmp_path))
    assert verdict.passed
    assert verdict.exit_code == EXIT_PASS
    assert verdict.statistic == 0.0
    assert verdict.n_replicas == 5
    assert [r["index"] for r in verdict.replicas] == list(range(5))
    assert (tmp_path / "verdict.json").exists()
    assert len((tmp_path / "replicas.csv").read_text(encoding="utf-8").splitlines()) == 6

    data = load_verdict(str(tmp_path / "verdict.json"))
    assert data["pass"] is True
    assert data["digest"] == verdict.digest
    assert verify_verdict(data)


def test_single_replica():
    verdict = run_experiment(ExperimentConfig(kind="coupling_domination", replicas=1, n_jumps=20))
    assert len(verdict.replicas) == 1
    assert verdict.ci is not None


def test_digest_is_reproducible():
    config = ExperimentConfig(kind="coupling_domination", replicas=4, n_jumps=30, seed=11)
    first = run_experiment(config)
    assert run_experiment(config).digest == first.digest
    other = run_experiment(config.model_copy(update={"seed": 12}))
    assert other.digest != first.digest


@pytest.mark.parametrize("workers", [1, 4])
def test_digest_is_worker_independent(workers):
    config = ExperimentConfig(kind="coupling_domination", replicas=9, n_jumps=30, seed=11)
    assert run_experiment(config, workers=workers).digest == run_experiment(config, workers=1).digest


def test_seed_defaults_to_runtime_setting(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    verdict = run_experiment(ExperimentConfig(kind="coupling_domination", replicas=2, n_jumps=5))
    assert verdict.seed == DEFAULT_SEED


def test_tampered_verdict_fails_verification(tmp_path):
    config = ExperimentConfig(kind="coupling_domination", replicas=3, n_jumps=20)
    run_experiment(config, out_dir=str(tmp_path))
    data = load_verdict(str(tmp_path / "verdict.json"))
    data["replicas"][0]["violations"] = 4
    assert not verify_verdict(data)


def test_failing_replicas_are_recorded(monkeypatch):
    class Exploding(kinds.CouplingDominationExperiment):
        def run_replica(self, index, seed):
            raise ExplosionError("时间无法推进")

    monkeypatch.setitem(kinds.KINDS, "coupling_domination", Exploding)
    verdict = run_experiment(ExperimentConfig(kind="coupling_domination", replicas=3, n_jumps=5))
    assert all(r["error"].startswith("ExplosionError") for r in verdict.replicas)
    assert not verdict.passed
    assert verdict.exit_code == EXIT_FAIL
    assert verdict.details["errors"] == 3


def test_two_vertex_weak():
    config = ExperimentConfig(kind="two_vertex_weak", replicas=4, horizon=50.0, min_local_time_floor=2.0)
    verdict = run_experiment(config)
    assert verdict.statistic == 1.0
    assert verdict.details["all_increase"]
    assert verdict.passed


def test_diagnostics_suite_small_ensemble():
    config = ExperimentConfig(kind="diagnostics_suite", replicas=3, horizon=12.0)
    verdict = run_experiment(config)
    assert verdict.statistic == 0.0
    assert verdict.passed
    assert verdict.details["martingale"].startswith("skipped")
    assert all(r["residual"] < 1e-8 for r in verdict.replicas)
    assert verify_verdict(verdict.to_dict())


def test_restriction_experiment():
    config = ExperimentConfig(kind="restriction", replicas=2, horizon=20.0,
                              restriction_sets=[[0, 1], [0, 1, 2]])
    verdict = run_experiment(config)
    assert verdict.statistic == 0.0
    assert verdict.passed
    assert verdict.replicas[0]["matched[0..1]"] is True


def test_rho_surplus_records():
    config = ExperimentConfig(kind="rho_surplus", replicas=3, rho_grid_points=8)
    verdict = run_experiment(config)
    assert len(verdict.replicas) == 3
    assert all(r["L0_at_xi"] >= 3.0 for r in verdict.replicas)
    rho = verdict.details["rho"]
    assert rho["cap"] == 100.0
    assert len(rho["eq_mean_check"]["grid"]) == 8
    assert verify_verdict(verdict.to_dict())


def test_engine_comparison_reports_all_pairs():
    verdict = run_experiment(ExperimentConfig(kind="engine_comparison", replicas=20))
    assert set(verdict.details["ks"]) == {
        "reference~canonical_cumulative/X5", "reference~canonical_cumulative/L0_10",
        "reference~canonical_literal/X5", "reference~canonical_literal/L0_10",
    }
    assert 0.0 <= verdict.statistic <= 1.0


def test_coupling_distribution_columns():
    verdict = run_experiment(ExperimentConfig(kind="coupling_distribution", replicas=10, n_values=[2]))
    assert set(verdict.details["ks"]) == {"n=2/star_L1~tilde_L0", "n=2/star_L0~tilde_L1"}
    assert {"star_L0_2", "star_L1_2", "tilde_L0_3", "tilde_L1_3"} <= set(verdict.replicas[0])


@pytest.mark.parametrize("kind, overrides", [
    ("localization", {"horizon": 100.0}),
    ("recurrence", {"horizon": 100.0}),
    ("nontransience", {"horizon": 100.0}),
    ("two_vertex_strong", {"horizon": 50.0}),
])
def test_trajectory_kinds_verify(kind, overrides):
    verdict = run_experiment(ExperimentConfig(kind=kind, replicas=3, **overrides))
    assert len(verdict.replicas) == 3
    assert all("error" not in r for r in verdict.replicas)
    assert verify_verdict(verdict.to_dict())


@pytest.mark.parametrize("data", [
    {"kind": "two_vertex_weak", "graph": {"kind": "full_line"}},
    {"kind": "two_vertex_strong", "weight": {"kind": "linear"}},
    {"kind": "diagnostics_suite", "horizon": 5.0},
    {"kind": "restriction", "graph": {"kind": "segment", "lo": 0, "hi": 1}, "restriction_sets": [[0, 1, 2]]},
])
def test_incompatible_configs_rejected_before_running(data, tmp_path):
    config = ExperimentConfig.model_validate({**data, "replicas": 2})
    out = tmp_path / "out"
    with pytest.raises(ConfigurationError):
        run_experiment(config, out_dir=str(out))
    assert not out.exists()


@pytest.mark.parametrize("data", [
    {"kind": "rho_surplus", "rho_a": 2.0, "rho_b": 3.0},
    {"kind": "rho_surplus", "rho_cap": 2.5},
    {"kind": "localization", "replicas": 0},
    {"kind": "localization", "weight": {"kind": "power", "a": -1}},
    {"kind": "localization", "checkpoint_fractions": [0.5, 0.25]},
    {"kind": "unknown"},
])
def test_schema_rejects(data):
    with pytest.raises(ValidationError):
        ExperimentConfig.model_validate(data)


def test_build_experiment_names_by_kind():
    experiment = build_experiment(ExperimentConfig(kind="recurrence"))
    assert isinstance(experiment, kinds.RecurrenceExperiment)
    assert experiment.experiment_name == "recurrence"


@pytest.mark.slow
def test_localization_acceptance():
    verdict = run_experiment(ExperimentConfig(kind="localization"), workers=4)
    assert verdict.passed


@pytest.mark.slow
def test_rho_surplus_acceptance():
    verdict = run_experiment(ExperimentConfig(kind="rho_surplus"), workers=4)
    assert verdict.passed
    assert verdict.ci[0] > 0


@pytest.mark.slow
@pytest.mark.parametrize("weight", [{"kind": "linear"}, {"kind": "power", "a": 2.0}])
def test_coupling_domination_acceptance(weight):
    verdict = run_experiment(ExperimentConfig(kind="coupling_domination", weight=weight), workers=4)
    assert verdict.passed
    assert verdict.statistic == 0


@pytest.mark.slow
def test_coupling_distribution_acceptance():
    verdict = run_experiment(ExperimentConfig(kind="coupling_distribution"), workers=4)
    assert verdict.passed


@pytest.mark.slow
@pytest.mark.parametrize("weight", [{"kind": "linear"}, {"kind": "power", "a": 2.0}])
def test_diagnostics_suite_acceptance(weight):
    config = ExperimentConfig(kind="diagnostics_suite", weight=weight, replicas=10000)
    verdict = run_experiment(config, workers=4)
    assert verdict.passed
    assert verdict.details["martingale"]["pass"]


@pytest.mark.slow
@pytest.mark.parametrize("kind", ["two_vertex_weak", "two_vertex_strong", "engine_comparison", "restriction"])
def test_default_kind_acceptance(kind):
    assert run_experiment(ExperimentConfig(kind=kind), workers=4).passed


@pytest.mark.slow
def test_recurrence_acceptance_and_strong_contrast():
    assert run_experiment(ExperimentConfig(kind="recurrence"), workers=4).passed
    # 强区间下过程局部化在三个顶点上，探测集合不会被反复访问
    strong = run_experiment(ExperimentConfig(kind="recurrence", weight={"kind": "power", "a": 2.0}), workers=4)
    assert strong.statistic <= 0.05


@pytest.mark.slow
@pytest.mark.parametrize("weight", [{"kind": "linear"}, {"kind": "power", "a": 2.0}])
def test_nontransience_acceptance(weight):
    assert run_experiment(ExperimentConfig(kind="nontransience", weight=weight), workers=4).passed
