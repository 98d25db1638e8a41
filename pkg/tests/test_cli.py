"""命令行与运行时配置"""

import json

import pytest

from src.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, UsageError, main, parse_and_validate
from src import VrjpLab
from src.schemas import ExperimentConfig, SimulationConfig
from src.utils import Config, load_config
from src.utils.errors import ConfigurationError

TWO_VERTEX = {"kind": "segment", "lo": 0, "hi": 1}


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("VRJP_LAB_THREADS", raising=False)


def inline(data) -> str:
    return json.dumps(data)


def test_missing_config_is_usage_error():
    assert main(["simulate"]) == EXIT_USAGE


def test_unknown_subcommand():
    assert main(["explode", "--config", "{}"]) == EXIT_USAGE


def test_negative_exponent_is_reported(capsys):
    code = main(["regime", "--config", inline({"kind": "power", "a": -1})])
    assert code == EXIT_USAGE
    assert "exponent must be > 0" in capsys.readouterr().err


def test_all_validation_errors_reported_together(capsys):
    code = main(["experiment", "--config", inline({"kind": "rho_surplus", "replicas": 0, "alpha": 2})])
    assert code == EXIT_USAGE
    err = capsys.readouterr().err
    assert "replicas" in err
    assert "alpha" in err


def test_regime_prints_json(capsys):
    assert main(["regime", "--config", inline({"kind": "power", "a": 2})]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    report = json.loads(lines[-1])
    assert report["regime"] == "strong"
    assert report["rho_condition"]["verified"] is True


def test_regime_accepts_bare_kind(capsys):
    assert main(["regime", "--config", '"linear"']) == EXIT_OK
    assert json.loads(capsys.readouterr().out.strip().splitlines()[-1])["regime"] == "weak"


def test_config_file_path(tmp_path):
    path = tmp_path / "couple.json"
    path.write_text(inline({"n_jumps": 10, "seed": 5}), encoding="utf-8")
    invocation = parse_and_validate(["couple", "--config", str(path), "--seed", "9"])
    assert invocation.config.n_jumps == 10
    assert invocation.config.seed == 9


def test_missing_config_file():
    with pytest.raises(UsageError):
        parse_and_validate(["couple", "--config", "no/such/file.json"])


def test_overrides_apply_only_where_defined():
    invocation = parse_and_validate(
        ["experiment", "--config", inline({"kind": "localization"}), "--replicas", "7", "--horizon", "50"])
    assert invocation.config.replicas == 7
    assert invocation.config.horizon == 50.0
    with pytest.raises(UsageError):
        parse_and_validate(["couple", "--config", "{}", "--replicas", "7"])


def test_invalid_config_creates_no_output(tmp_path):
    out = tmp_path / "out"
    code = main(["simulate", "--config", inline({"horizon": -1}), "--out", str(out)])
    assert code == EXIT_USAGE
    assert not out.exists()


def test_incompatible_experiment_creates_no_output(tmp_path):
    out = tmp_path / "out"
    config = {"kind": "two_vertex_weak", "graph": {"kind": "full_line"}, "replicas": 2}
    assert main(["experiment", "--config", inline(config), "--out", str(out)]) == EXIT_USAGE
    assert not out.exists()


def test_simulate_then_diagnose(tmp_path):
    sim_dir = tmp_path / "sim"
    config = {"weight": {"kind": "power", "a": 2}, "graph": TWO_VERTEX, "horizon": 20, "seed": 3}
    assert main(["simulate", "--config", inline(config), "--out", str(sim_dir)]) == EXIT_OK
    for name in ("trajectory.csv", "trajectory.meta.json", "trajectory.json", "local_times.csv"):
        assert (sim_dir / name).exists(), name

    diag_dir = tmp_path / "diag"
    code = main(["diagnose", "--config", inline({"grid_step": 0.5}),
                 "--trajectory", str(sim_dir / "trajectory.csv"), "--out", str(diag_dir)])
    assert code == EXIT_OK
    report = json.loads((diag_dir / "checks.json").read_text(encoding="utf-8"))
    assert report["pass"] is True
    assert report["weight"] == {"kind": "power", "a": 2.0}
    assert (diag_dir / "series.csv").read_text(encoding="utf-8").startswith("t,W0,W1,H,Z,M,A,angleM,alpha,beta,grid")


def test_simulate_is_reproducible(tmp_path):
    config = inline({"weight": {"kind": "linear"}, "horizon": 15, "seed": 42})
    for name in ("a", "b"):
        assert main(["simulate", "--config", config, "--out", str(tmp_path / name), "--quiet"]) == EXIT_OK
    first = (tmp_path / "a" / "trajectory.csv").read_bytes()
    assert first == (tmp_path / "b" / "trajectory.csv").read_bytes()


def test_diagnose_requires_existing_trajectory(tmp_path):
    code = main(["diagnose", "--config", "{}", "--trajectory", str(tmp_path / "missing.csv")])
    assert code == EXIT_USAGE


def test_couple_writes_pairs(tmp_path):
    out = tmp_path / "couple"
    assert main(["couple", "--config", inline({"n_jumps": 25, "seed": 1}), "--out", str(out)]) == EXIT_OK
    summary = json.loads((out / "coupling.json").read_text(encoding="utf-8"))
    assert summary["violations"] == []
    assert len((out / "pairs.csv").read_text(encoding="utf-8").splitlines()) == 26


def test_experiment_prints_digest(tmp_path, capsys):
    out = tmp_path / "exp"
    config = {"kind": "coupling_domination", "replicas": 3, "n_jumps": 20}
    assert main(["experiment", "--config", inline(config), "--out", str(out)]) == EXIT_OK
    printed = capsys.readouterr().out.strip().splitlines()[-1]
    verdict = json.loads((out / "verdict.json").read_text(encoding="utf-8"))
    assert printed == verdict["digest"]


def test_failing_experiment_exit_code(tmp_path):
    config = {"kind": "two_vertex_weak", "replicas": 2, "horizon": 5}
    assert main(["experiment", "--config", inline(config), "--out", str(tmp_path / "exp")]) == EXIT_FAIL


def test_env_file_settings(tmp_path, monkeypatch):
    path = tmp_path / "settings.env"
    path.write_text("THREADS=3\nDEFAULT_SEED=17\nVERBOSE=true\n", encoding="utf-8")
    config = load_config(str(path))
    assert config.threads == 3
    assert config.default_seed == 17
    assert config.verbose
    monkeypatch.setenv("VRJP_LAB_THREADS", "2")
    assert load_config(str(path)).threads == 2


def test_lab_uses_settings_seed(tmp_path, monkeypatch):
    monkeypatch.delenv("VRJP_LAB_THREADS", raising=False)
    path = tmp_path / "settings.env"
    path.write_text("DEFAULT_SEED=17\n", encoding="utf-8")
    lab = VrjpLab(load_config(str(path)))
    verdict = lab.experiment(ExperimentConfig(kind="coupling_domination", replicas=2, n_jumps=5),
                             out_dir=str(tmp_path / "exp"))
    assert verdict.seed == 17
    trajectory = lab.simulate(SimulationConfig(horizon=5.0), out_dir=str(tmp_path / "sim"))
    assert trajectory.seed == 17


def test_cli_experiment_uses_settings_seed(tmp_path, monkeypatch):
    monkeypatch.delenv("VRJP_LAB_THREADS", raising=False)
    settings = tmp_path / "settings.env"
    settings.write_text("DEFAULT_SEED=17\n", encoding="utf-8")
    out = tmp_path / "exp"
    code = main(["experiment", "--config", inline({"kind": "coupling_domination", "replicas": 2, "n_jumps": 5}),
                 "--settings", str(settings), "--out", str(out)])
    assert code == EXIT_OK
    assert json.loads((out / "verdict.json").read_text(encoding="utf-8"))["seed"] == 17


def test_bad_settings():
    with pytest.raises(ConfigurationError):
        load_config("no/such/settings.env")
    assert not Config(threads=0).validate()
    assert not Config(default_seed=-1).validate()
