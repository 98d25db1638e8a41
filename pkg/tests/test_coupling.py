"""规范引擎、耦合对、水平穿越与限制原理"""

import math

import numpy as np
import pytest

from conftest import make_trajectory, unit_path
from src.clocks import ClockBank
from src.coupling import (
    CanonicalEngine,
    ClockRule,
    CoupledPair,
    build_engine,
    estimate_rho,
    hitting_time_eta,
    restriction_check,
    rho_replica,
    rho_report,
    truncated_integrand,
    run_coupled_pair,
    two_vertex_recursion,
    xi_crossing,
    xi_profile,
)
from src.process import VertexSet
from src.utils.config import DEFAULT_SEED
from src.utils.errors import ConfigurationError
from src.weights import ExpShifted, Linear, Power

SEGMENT = {"kind": "segment", "lo": 0, "hi": 1}


@pytest.mark.parametrize("rule", list(ClockRule))
@pytest.mark.parametrize("weight", [Linear(), Power(2.0), ExpShifted(0.5)], ids=repr)
def test_engine_matches_direct_recursion(rule, weight):
    bank = ClockBank(314)
    engine = CanonicalEngine(weight, VertexSet.segment(0, 1), bank, start=0, rule=rule)
    observed = []
    for _ in range(60):
        engine.step()
        observed.append((engine.local_time(0), engine.local_time(1)))
    expected = two_vertex_recursion(weight, bank, 1.0, 1.0, 60)
    np.testing.assert_allclose(np.array(observed), expected, rtol=1e-12)


def test_rules_coincide_on_two_vertices():
    literal = CanonicalEngine(Power(2.0), VertexSet.segment(0, 1), ClockBank(8), rule="literal").run(max_jumps=100)
    cumulative = CanonicalEngine(Power(2.0), VertexSet.segment(0, 1), ClockBank(8), rule="cumulative").run(max_jumps=100)
    assert literal.events == cumulative.events


def test_cumulative_keeps_residual_of_losing_clock():
    bank = ClockBank(21)
    engine = CanonicalEngine(Linear(), VertexSet.segment(0, 2), bank, start=1, rule=ClockRule.CUMULATIVE)
    left = bank.exponential((1, 0), 1)
    right = bank.exponential((1, 2), 1)
    event = engine.step()
    winner, loser = (0, 2) if left < right else (2, 0)
    assert event.target == winner
    assert event.tau == pytest.approx(min(left, right))
    assert (1, winner) not in engine.residuals
    assert engine.residuals[(1, loser)] == pytest.approx(abs(right - left))
    assert engine.gamma(1, winner) == 2
    assert engine.gamma(1, loser) == 1


def test_literal_rereads_same_clock():
    bank = ClockBank(21)
    engine = CanonicalEngine(Linear(), VertexSet.segment(0, 2), bank, start=1, rule=ClockRule.LITERAL)
    engine.step()
    loser = 2 if engine.events[0].target == 0 else 0
    assert engine.clock(1, loser) == bank.exponential((1, loser), 1)
    assert engine.residuals == {}


@pytest.mark.parametrize("name, engine_name", [
    ("reference", "reference"),
    ("canonical_literal", "canonical_literal"),
    ("canonical_cumulative", "canonical_cumulative"),
])
def test_build_engine(name, engine_name):
    engine = build_engine(name, Linear(), VertexSet.full_line(), ClockBank(1))
    assert engine.engine_name == engine_name
    assert engine.run(max_jumps=5).engine == engine_name


def test_build_engine_unknown_name():
    with pytest.raises(ConfigurationError):
        build_engine("gillespie", Linear(), VertexSet.full_line(), ClockBank(1))


@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5, 2024])
@pytest.mark.parametrize("rule", ["literal", "cumulative"])
def test_coupled_pair_domination(seed, rule):
    pair = CoupledPair.create(Power(2.0), seed, rule=rule)
    assert pair.A > 0
    sequences = run_coupled_pair(pair, 200)
    assert len(sequences) == 200
    assert sequences.domination_violations() == []
    assert sequences.holds_domination()


def test_zero_A_gives_identical_processes():
    sequences = run_coupled_pair(CoupledPair.create(Power(2.0), 7, A=0.0), 50)
    np.testing.assert_array_equal(sequences.tilde_L0, sequences.star_L0)
    np.testing.assert_array_equal(sequences.tilde_L1, sequences.star_L1)
    assert len(sequences.domination_violations()) == 50


def test_negative_A_rejected():
    with pytest.raises(ConfigurationError):
        CoupledPair.create(Power(2.0), 7, A=-0.5)


def test_pair_csv(tmp_path):
    sequences = run_coupled_pair(CoupledPair.create(Power(2.0), 3), 10)
    path = tmp_path / "pairs.csv"
    sequences.to_csv(str(path))
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "k,tilde_L0,tilde_L1,star_L0,star_L1"
    assert len(lines) == 11


def test_xi_on_unit_sojourn_path():
    trajectory = make_trajectory(unit_path([0, 1, 0, 1]), horizon=3.5, vertex_set=SEGMENT)
    crossing = xi_crossing(trajectory, 1.5)
    assert not crossing.censored
    assert crossing.time == pytest.approx(1.5)
    assert crossing.other_local_time == pytest.approx(2.0)
    # 第二次在 1 的逗留从 τ=3 开始，入口局部时间 2
    assert xi_crossing(trajectory, 2.25).time == pytest.approx(3.25)


def test_hitting_time_censored_and_trivial():
    trajectory = make_trajectory(unit_path([0, 1, 0, 1]), horizon=3.5, vertex_set=SEGMENT)
    assert hitting_time_eta(trajectory, 0, 1.0).time == 0.0
    assert hitting_time_eta(trajectory, 1, 10.0).censored
    with pytest.raises(ConfigurationError):
        hitting_time_eta(trajectory, 0, 0.5)
    profile = xi_profile(trajectory, [1.0, 1.5, 10.0])
    assert profile[1] == pytest.approx(2.0)
    assert math.isnan(profile[2])


def test_rho_replica_runs_to_level():
    levels = np.linspace(2.0, 3.0, 8)
    for seed in range(20):
        result = rho_replica(Power(2.0), 3.0, 2.0, seed, levels)
        assert 3.0 <= result["L0_at_xi"] <= 100.0
        assert result["integral"] > 0
        assert result["jumps"] >= 1
        if result["censored"]:
            assert result["L0_at_xi"] == 100.0


def test_rho_replica_low_cap_censors():
    result = rho_replica(Power(2.0), 3.0, 2.0, 5, np.linspace(2.0, 3.0, 8), cap=3.0 + 1e-9)
    assert result["L0_at_xi"] <= 3.0 + 1e-9
    with pytest.raises(ConfigurationError):
        rho_replica(Power(2.0), 3.0, 2.0, 5, np.linspace(2.0, 3.0, 8), cap=3.0)


def test_truncated_integrand():
    w = Power(2.0)
    assert truncated_integrand(w, 2.5, float("nan"), 100.0) == 0.0
    assert truncated_integrand(w, 2.5, 150.0, 100.0) == 0.0
    assert truncated_integrand(w, 2.5, 4.0, math.inf) == pytest.approx(16.0 / 6.25)
    expected = 16.0 * -math.expm1(-6.25 * 1.0) / 6.25
    assert truncated_integrand(w, 2.5, 4.0, 5.0) == pytest.approx(expected)


def test_rho_report_arithmetic():
    report = rho_report(3.0, 2.0, [4.0, 5.0, 6.0], [1.0, 2.0, 3.0], [2.0, 3.0])
    assert report.rho_hat == pytest.approx(1.0)
    assert report.stderr == pytest.approx(1.0 / math.sqrt(3.0))
    assert report.lhs == pytest.approx(5.0)
    assert report.rhs == pytest.approx(5.0)
    assert report.eq_mean_consistent
    assert not report.positive


def test_estimate_rho_seed_defaults_to_runtime_setting(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    implicit = estimate_rho(Power(2.0), n_replicas=2, grid_points=4)
    explicit = estimate_rho(Power(2.0), n_replicas=2, grid_points=4, seed=DEFAULT_SEED)
    assert implicit.rho_hat == explicit.rho_hat
    assert implicit.grid == explicit.grid


@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5, 6, 7, 8])
@pytest.mark.parametrize("vertices", [[0, 1], [0, 1, 2], [0, 1, 2, 3]])
def test_restriction_principle_cumulative(seed, vertices):
    check = restriction_check(seed, Power(2.0), VertexSet.mask(vertices), horizon=20.0,
                              rule=ClockRule.CUMULATIVE)
    assert check.matched, check.details
    assert check.first_mismatch is None
    assert check.max_time_rel_error < 1e-9


def test_restriction_principle_weak_weight():
    check = restriction_check(17, Linear(), VertexSet.mask([0, 1, 2]), horizon=30.0,
                              full_set=VertexSet.half_line_plus())
    assert check.matched, check.details
