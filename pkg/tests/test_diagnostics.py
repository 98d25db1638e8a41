"""两顶点泛函序列、分解恒等式、逐路径检查与系综鞅检验"""

import dataclasses
import math

import numpy as np
import pytest

from conftest import make_trajectory, unit_path
from src.diagnostics import (
    CheckpointSamples,
    atom_diagnostics,
    checkpoint_checks,
    compute_series,
    decomposition_residual,
    domination_ratio,
    envelope_checks,
    functionals_at,
    martingale_checks,
    pathwise_checks,
    ratio_series,
    replica_limit,
    require_strong,
    simulate_two_vertex,
    terminal_z,
    z_limit_samples,
)
from src.clocks import substream_seed
from src.diagnostics.checks import MIN_ENSEMBLE
from src.utils.errors import (
    ConfigurationError,
    InsufficientEnsembleError,
    TimeRangeError,
    UnsupportedOperationError,
)
from src.weights import CustomMonotone, Linear, Power


def test_canary_decomposition_is_exact(canary_trajectory):
    series = compute_series(canary_trajectory, Linear())
    assert len(series) == 4
    assert decomposition_residual(series) < 1e-12


def test_shifted_martingale_breaks_decomposition(canary_trajectory):
    series = compute_series(canary_trajectory, Linear())
    shifted = series.M.copy()
    shifted[1:] += 1e-3
    residual = decomposition_residual(dataclasses.replace(series, M=shifted), relative=True)
    # 残差 = β(0.5)·1e-3 = 1e-3/1.5
    assert 5e-4 < residual < 1e-3
    assert residual == pytest.approx(1e-3 / 1.5, rel=1e-6)


def test_canary_point_values(canary_trajectory):
    point = functionals_at(canary_trajectory, Linear(), 1.0)
    assert point.X == 1
    assert (point.L0, point.L1) == pytest.approx((1.5, 1.5))
    assert point.H == pytest.approx(0.0, abs=1e-15)
    assert point.beta == pytest.approx(1.0 / 2.25)
    assert point.Z == pytest.approx(-1.0 / 2.25)
    assert point.M == pytest.approx(1.25)
    assert point.angleM == pytest.approx(1.25)
    assert point.A == pytest.approx(-point.beta)
    assert point.Pi == pytest.approx(-1.5)


def test_terminal_z_matches_series(canary_trajectory):
    series = compute_series(canary_trajectory, Linear())
    z = terminal_z(canary_trajectory, Linear())
    assert z == pytest.approx(series.Z[-1])
    assert z == pytest.approx(math.log(2.3 / 1.7))


def test_grid_samples(canary_trajectory):
    series = compute_series(canary_trajectory, Linear(), grid_step=0.25)
    assert np.count_nonzero(series.grid) == 6
    assert np.all(np.diff(series.t) > 0)
    assert decomposition_residual(series) < 1e-12
    k = int(np.flatnonzero(series.t == 0.75)[0])
    assert series.M[k] == pytest.approx(series.at(0.75).M)


def test_series_needs_two_vertices():
    trajectory = make_trajectory(unit_path([0, 1, 2]), horizon=3.0)
    with pytest.raises(ConfigurationError):
        compute_series(trajectory, Linear())


def test_series_query_out_of_range(canary_trajectory):
    series = compute_series(canary_trajectory, Linear())
    with pytest.raises(TimeRangeError):
        series.at(2.5)


def test_series_csv(tmp_path, canary_trajectory):
    path = tmp_path / "series.csv"
    compute_series(canary_trajectory, Linear()).to_csv(str(path))
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "t,W0,W1,H,Z,M,A,angleM,alpha,beta,grid"
    assert len(lines) == 5


@pytest.mark.parametrize("weight", [Linear(), Power(2.0), Power(1.5)], ids=repr)
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_simulated_paths_pass_pathwise_checks(weight, seed):
    trajectory = simulate_two_vertex(weight, 20.0, seed)
    series = compute_series(trajectory, weight, grid_step=0.5)
    assert decomposition_residual(series, relative=True) < 1e-8
    failed = [c.name for c in pathwise_checks(series) if not c.passed]
    assert failed == []


@pytest.mark.parametrize("seed", [4, 5])
def test_envelopes_hold(seed):
    weight = Power(2.0)
    series = compute_series(simulate_two_vertex(weight, 20.0, seed), weight)
    for t, s in [(0.0, 20.0), (2.0, 10.0), (5.5, 6.0)]:
        result = envelope_checks(series, t, s)
        assert result.passed, result.to_dict()


def test_envelope_weak_upper_is_trivial():
    series = compute_series(simulate_two_vertex(Linear(), 10.0, 1), Linear())
    result = envelope_checks(series, 1.0, 5.0)
    assert result.upper.passed
    assert math.isinf(result.upper.threshold)
    with pytest.raises(TimeRangeError):
        envelope_checks(series, 5.0, 1.0)


def test_discontinuous_weight_refuses_a_integrals(canary_trajectory):
    weight = CustomMonotone(lambda t: t ** 2, converges=True, name="step", continuous=False)
    series = compute_series(canary_trajectory, weight)
    with pytest.raises(UnsupportedOperationError):
        decomposition_residual(series)


def test_ratio_and_domination():
    weight = Power(2.0)
    series = compute_series(simulate_two_vertex(weight, 20.0, 9), weight)
    ratio, running = ratio_series(series)
    assert np.all((ratio > 0) & (ratio <= 1))
    assert np.all(np.diff(running) <= 0)
    values = domination_ratio(series, 2.0, 3.0)
    assert np.all(np.isfinite(values)) and np.all(values > 0)
    with pytest.raises(UnsupportedOperationError):
        domination_ratio(compute_series(simulate_two_vertex(Linear(), 5.0, 9), Linear()), 2.0, 1.0)


def test_martingale_checks_need_ensemble():
    series = compute_series(simulate_two_vertex(Power(2.0), 3.0, 1), Power(2.0))
    with pytest.raises(InsufficientEnsembleError):
        martingale_checks([series], [1.0], min_runs=10)


def test_martingale_report_shape():
    weight = Power(2.0)
    runs = [compute_series(simulate_two_vertex(weight, 3.0, seed), weight) for seed in range(6)]
    report = martingale_checks(runs, [1.0, 2.0], steps=(0.01,), min_runs=5)
    assert report.n_runs == 6
    assert [c.name for c in report.checks[:3]] == ["mean_M@1", "isometry@1", "drift@1/h=0.01"]
    assert len(report.checks) == 6
    assert set(report.drift_ratios) == {"1", "2"}


def test_checkpoint_checks_on_synthetic_samples():
    balanced = CheckpointSamples(
        t=1.0,
        M=np.array([1.0, -1.0, 1.0, -1.0]),
        bracket=np.ones(4),
        X=np.array([0.0, 1.0, 0.0, 1.0]),
        Pi=np.zeros(4),
        Lam=np.ones(4),
        ahead={0.01: np.array([0.0, 1.0, 0.0, 1.0])},
    )
    checks, ratios = checkpoint_checks(balanced)
    assert all(c.passed for c in checks)
    assert ratios == [0.0]

    biased = dataclasses.replace(balanced, M=np.array([1.0, 1.1, 0.9, 1.0]))
    checks, _ = checkpoint_checks(biased)
    assert not checks[0].passed


def test_atom_diagnostics():
    atoms = atom_diagnostics([0.5, 0.5, -0.05, 0.2, 0.0005, 1.0])
    assert atoms.n == 6
    assert atoms.duplicates == 1
    assert atoms.near_zero == pytest.approx({"0.1": 2 / 6, "0.01": 1 / 6, "0.001": 1 / 6})
    assert atoms.near_zero_decreasing
    with pytest.raises(ConfigurationError):
        atom_diagnostics([0.1])


def test_require_strong():
    require_strong(Power(2.0))
    with pytest.raises(UnsupportedOperationError):
        require_strong(Linear())


def test_replica_limit_record():
    record = replica_limit(Power(2.0), 50.0, 1)
    assert set(record) == {"Z", "min_local_time", "plateau", "jumps"}
    assert math.isfinite(record["Z"])
    assert record["min_local_time"] >= 1.0
    assert record["jumps"] >= 1


def _ensemble(weight, horizon, n, seed=2024):
    return [compute_series(simulate_two_vertex(weight, horizon, substream_seed(seed, f"run/{i}")), weight)
            for i in range(n)]


def test_martingale_starts_at_zero():
    for series in _ensemble(Power(2.0), 2.0, 5):
        assert series.at(0.0).M == 0.0
        assert series.at(0.0).angleM == 0.0


def test_martingale_mean_and_isometry_small_ensemble():
    runs = _ensemble(Power(2.0), 1.01, 300)
    report = martingale_checks(runs, [1.0], steps=(0.01,), min_runs=300, sigmas=4.0)
    by_name = {c.name: c for c in report.checks}
    assert by_name["mean_M@1"].passed
    assert by_name["isometry@1"].passed


@pytest.mark.slow
@pytest.mark.parametrize("weight", [Linear(), Power(2.0)], ids=["linear", "power2"])
def test_martingale_ensemble_acceptance(weight):
    runs = _ensemble(weight, 10.01, 10 * MIN_ENSEMBLE)
    report = martingale_checks(runs, [1.0, 5.0, 10.0], sigmas=4.0)
    failed = [c.name for c in report.checks if not c.passed]
    assert failed == []
    for ratios in report.drift_ratios.values():
        assert all(math.isfinite(r) for r in ratios)


def test_z_limit_samples_strong_weight():
    report = z_limit_samples(Power(2.0), 50.0, 40, seed=5)
    assert report.samples.shape == (40,)
    assert np.all(np.isfinite(report.samples))
    assert report.atoms.n == 40
    assert report.atoms.duplicates == 0
    assert 0.0 <= report.plateau_fraction <= 1.0
    assert set(report.to_dict()) == {"horizon", "n", "atoms", "plateau_fraction"}
    again = z_limit_samples(Power(2.0), 50.0, 40, seed=5)
    np.testing.assert_array_equal(report.samples, again.samples)


def test_z_limit_samples_rejects_weak_weight():
    with pytest.raises(UnsupportedOperationError):
        z_limit_samples(Linear(), 50.0, 10, seed=5)


@pytest.mark.slow
def test_z_limit_has_no_atoms():
    report = z_limit_samples(Power(2.0), 1000.0, 2000, seed=20240101, early_fraction=0.5)
    assert report.atoms.duplicates == 0
    assert report.atoms.near_zero["0.001"] < 0.01
    assert report.atoms.near_zero_decreasing
    assert report.plateau_fraction >= 0.95
