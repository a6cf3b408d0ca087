"""CLI verbs through the click runner (in-process thin client)."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from revfrf.cli import main

CONFIG_TOML = """
[dataset]
task = "classification"
kind = "synth"
rows = 60
features = 4
informative = [0]
seed = 5

[partition]
participants = 2

[forest]
t_max = 3
d_max = 3
varsigma = 4
varrho = 16

[crypto]
kappa = 32
c = 3

[run]
seeds = [11]
test_fraction = 0.2
max_test_rows = 6
revoke = [0, 1]
"""


@pytest.fixture()
def runner():
    return CliRunner()


def _write_config(tmp_path) -> str:
    path = tmp_path / "exp.toml"
    path.write_text(CONFIG_TOML)
    return str(path)


def test_keygen_verb(runner, tmp_path):
    out = tmp_path / "keys.json"
    result = runner.invoke(
        main, ["keygen", "--kappa", "32", "--seed", "3", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    material = json.loads(out.read_text())
    assert set(material) >= {"n", "g", "lam1", "lam2"}


def test_synth_verb(runner, tmp_path):
    out = tmp_path / "d.csv"
    result = runner.invoke(main, ["synth", "--rows", "20", "--features", "3", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert out.read_text().splitlines()[0] == "f0,f1,f2,label"


def test_train_test_predict_revoke_cycle(runner, tmp_path):
    cfg = _write_config(tmp_path)
    store = str(tmp_path / "store")
    result = runner.invoke(main, ["train", "--config", cfg, "--outdir", store])
    assert result.exit_code == 0, result.output
    run_id = result.output.split()[1].rstrip(":")

    result = runner.invoke(main, ["test", "--run-id", run_id, "--outdir", store,
                                  "--out", str(tmp_path / "m.csv")])
    assert result.exit_code == 0, result.output
    assert "ACC," in result.output
    assert (tmp_path / "m.csv").exists()

    result = runner.invoke(
        main,
        ["predict", "--run-id", run_id, "--outdir", store, "--features", "1,2,3,4"],
    )
    assert result.exit_code == 0, result.output

    result = runner.invoke(
        main, ["revoke", "--run-id", run_id, "--outdir", store, "--participant", "3"]
    )
    assert result.exit_code == 0, result.output

    # a revoked requester is a protocol error: exit code 2
    result = runner.invoke(
        main,
        ["predict", "--run-id", run_id, "--outdir", store,
         "--features", "1,2,3,4", "--requester", "3"],
    )
    assert result.exit_code == 2, result.output


def test_bench_verb(runner, tmp_path):
    cfg = _write_config(tmp_path)
    outdir = str(tmp_path / "reports")
    result = runner.invoke(main, ["bench", "--config", cfg, "--outdir", outdir])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "reports" / "metrics.csv").exists()


def test_bad_config_exits_1(runner, tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text('[dataset]\ntask = "nonsense"\n')
    result = runner.invoke(main, ["train", "--config", str(bad), "--outdir", str(tmp_path / "s")])
    assert result.exit_code == 1
    result = runner.invoke(
        main, ["train", "--config", str(tmp_path / "missing.toml"), "--outdir", str(tmp_path / "s")]
    )
    assert result.exit_code == 1


def test_regression_test_reports_both_r2(runner, tmp_path):
    cfg_text = CONFIG_TOML.replace('task = "classification"', 'task = "regression"')
    cfg = tmp_path / "reg.toml"
    cfg.write_text(cfg_text)
    store = str(tmp_path / "store")
    result = runner.invoke(main, ["train", "--config", str(cfg), "--outdir", store])
    assert result.exit_code == 0, result.output
    run_id = result.output.split()[1].rstrip(":")
    result = runner.invoke(main, ["test", "--run-id", run_id, "--outdir", store])
    assert result.exit_code == 0, result.output
    assert "R2," in result.output and "R2_alt," in result.output
    flagged = runner.invoke(
        main, ["test", "--run-id", run_id, "--outdir", store, "--standard-r2"]
    )
    assert flagged.exit_code == 0
