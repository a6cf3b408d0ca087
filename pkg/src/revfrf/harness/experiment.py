"""Experiment configs and sweep runner.

Configs are plain TOML.  A run trains a federation on a train split,
evaluates it with the vertically-partitioned testing protocol on a
held-out split, optionally revokes participants first, and emits one
metrics CSV (run_id, metric, value) plus one ledger CSV per run.  Sweep
modes vary the number of revoked participants or the tree count; fixed
seeds make every report file byte-reproducible.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import tomli

from revfrf.errors import ValidationError
from revfrf.seeding import derive_rng, derive_seed
from revfrf.crypto import keygen
from revfrf.federation.session import FederationSession, SessionConfig
from revfrf.forest.forest_io import save_forest
from revfrf.forest.scoring import TASK_CLASSIFICATION, TASK_REGRESSION
from revfrf.harness.dataset import DatasetSpec, PartitionPlan, ingest_csv, synth_dataset
from revfrf.harness.metrics import compute_metrics

__all__ = ["ExperimentConfig", "run_experiment", "load_config", "build_session_inputs"]

_TASKS = {"regression": TASK_REGRESSION, "classification": TASK_CLASSIFICATION}


@dataclass
class ExperimentConfig:
    """Validated experiment description (see ``load_config``)."""

    task: int
    dataset: dict[str, Any]
    n_participants: int
    explicit_plan: dict[int, tuple[int, ...]] | None
    t_max: int = 100
    d_max: int = 10
    varsigma: int = 8
    varrho: int = 32
    feature_subset_size: int | None = None
    bagging_fraction: float | None = None
    kappa: int = 512
    c: int = 6
    seeds: tuple[int, ...] = (1,)
    test_fraction: float = 0.25
    max_test_rows: int = 50
    revoke_counts: tuple[int, ...] = (0,)
    revocation_level: int = 1
    standard_r2: bool = False
    mode: str = "revocation_sweep"
    t_sweep: tuple[int, ...] = ()
    gnuplot: bool = False

    def forest_kwargs(self) -> dict[str, Any]:
        return dict(
            task=self.task,
            t_max=self.t_max,
            d_max=self.d_max,
            varsigma=self.varsigma,
            varrho=self.varrho,
            feature_subset_size=self.feature_subset_size,
            bagging_fraction=self.bagging_fraction,
        )


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ValidationError("no such config file: %s" % path)
    try:
        raw = tomli.loads(path.read_text())
    except tomli.TOMLDecodeError as exc:
        raise ValidationError("config parse error: %s" % exc) from exc
    return config_from_dict(raw)


def config_from_dict(raw: dict[str, Any]) -> ExperimentConfig:
    try:
        ds = dict(raw["dataset"])
        task_name = ds.pop("task")
    except KeyError as exc:
        raise ValidationError("config needs [dataset] with a task") from exc
    if task_name not in _TASKS:
        raise ValidationError("task must be 'regression' or 'classification'")
    task = _TASKS[task_name]
    kind = ds.get("kind", "synth")
    if kind not in ("synth", "csv"):
        raise ValidationError("dataset.kind must be 'synth' or 'csv'")
    if kind == "csv" and "path" not in ds:
        raise ValidationError("csv datasets need dataset.path")

    part = raw.get("partition", {})
    explicit = None
    n_participants = int(part.get("participants", 2))
    if "plan" in part:
        explicit = {int(k): tuple(int(f) for f in v) for k, v in part["plan"].items()}

    forest = raw.get("forest", {})
    subset = forest.get("feature_subset", "sqrt")
    subset_size = None if subset == "sqrt" else int(subset)
    bagging = forest.get("bagging", 0.0)

    crypto = raw.get("crypto", {})
    run = raw.get("run", {})
    mode = run.get("mode", "revocation_sweep")
    if mode not in ("revocation_sweep", "tree_sweep", "single"):
        raise ValidationError("run.mode must be revocation_sweep, tree_sweep or single")

    cfg = ExperimentConfig(
        task=task,
        dataset={"kind": kind, **ds},
        n_participants=n_participants,
        explicit_plan=explicit,
        t_max=int(forest.get("t_max", 100)),
        d_max=int(forest.get("d_max", 10)),
        varsigma=int(forest.get("varsigma", 8)),
        varrho=int(forest.get("varrho", 32)),
        feature_subset_size=subset_size,
        bagging_fraction=None if not bagging else float(bagging),
        kappa=int(crypto.get("kappa", 512)),
        c=int(crypto.get("c", 6)),
        seeds=tuple(int(s) for s in run.get("seeds", [1])),
        test_fraction=float(run.get("test_fraction", 0.25)),
        max_test_rows=int(run.get("max_test_rows", 50)),
        revoke_counts=tuple(int(k) for k in run.get("revoke", [0])),
        revocation_level=int(run.get("revocation_level", 1)),
        standard_r2=bool(run.get("standard_r2", False)),
        mode=mode,
        t_sweep=tuple(int(t) for t in run.get("t_sweep", [])),
        gnuplot=bool(run.get("gnuplot", False)),
    )
    if not 0.0 < cfg.test_fraction < 1.0:
        raise ValidationError("run.test_fraction must be in (0, 1)")
    if cfg.mode == "tree_sweep" and not cfg.t_sweep:
        raise ValidationError("tree_sweep mode needs run.t_sweep")
    return cfg


def load_dataset(cfg: ExperimentConfig) -> DatasetSpec:
    ds = cfg.dataset
    if ds["kind"] == "csv":
        return ingest_csv(
            ds["path"],
            label=ds.get("label", -1),
            task=cfg.task,
            column_types=ds.get("column_types"),
        )
    return synth_dataset(
        n_rows=int(ds.get("rows", 200)),
        n_features=int(ds.get("features", 6)),
        task=cfg.task,
        seed=int(ds.get("seed", 7)),
        informative=tuple(ds.get("informative", [0])),
        noise=float(ds.get("noise", 0.0)),
        n_classes=int(ds.get("classes", 2)),
    )


def make_plan(cfg: ExperimentConfig, n_features: int) -> PartitionPlan:
    if cfg.explicit_plan is not None:
        return PartitionPlan(cfg.explicit_plan)
    return PartitionPlan.round_robin(n_features, cfg.n_participants)


def split_rows(n_rows: int, test_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic train mask and test row indices."""
    rng = derive_rng(seed, "split")
    n_test = max(1, round(test_fraction * n_rows))
    test_rows = np.array(sorted(rng.sample(range(n_rows), n_test)))
    mask = np.ones(n_rows, dtype=np.uint8)
    mask[test_rows] = 0
    return mask, test_rows


def build_session_inputs(cfg: ExperimentConfig, seed: int, t_max: int | None = None):
    """Dataset, plan, session config and split for one run."""
    data = load_dataset(cfg)
    plan = make_plan(cfg, data.n_features)
    kwargs = cfg.forest_kwargs()
    if t_max is not None:
        kwargs["t_max"] = t_max
    scfg = SessionConfig(
        kappa=cfg.kappa,
        c=cfg.c,
        seed=seed,
        **kwargs,
    )
    train_mask, test_rows = split_rows(data.n_rows, cfg.test_fraction, seed)
    return data, plan, scfg, train_mask, test_rows


def _evaluate(session: FederationSession, data: DatasetSpec, test_rows: np.ndarray, cap: int):
    rows = test_rows[:cap]
    preds = [session.test(int(r)) for r in rows]
    return compute_metrics(preds, data.y[rows], data.task)


def _fmt(v: float) -> str:
    return repr(float(v))


def run_experiment(config: ExperimentConfig | str | Path, outdir: str | Path) -> list[Path]:
    """Execute the configured runs; returns the written report paths."""
    if not isinstance(config, ExperimentConfig):
        config = load_config(config)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    metrics_rows: list[tuple[str, str, str]] = []
    written: list[Path] = []
    keyset_cache: dict[int, Any] = {}

    def keyset_for(seed: int):
        if seed not in keyset_cache:
            keyset_cache[seed] = keygen(
                kappa=config.kappa, c=config.c, seed=derive_seed(seed, "keys")
            )
        return keyset_cache[seed]

    def one_run(run_id: str, seed: int, revoke_count: int = 0, t_max: int | None = None):
        data, plan, scfg, train_mask, test_rows = build_session_inputs(config, seed, t_max)
        session = FederationSession.from_dataset(
            scfg, data.x, data.y, plan.owners, keyset=keyset_for(seed)
        )
        session.train_mask = train_mask
        session.train()
        if revoke_count:
            pool = list(plan.participants)
            chooser = derive_rng(seed, "revoke-pick")
            for u_r in chooser.sample(pool, revoke_count):
                session.revoke(u_r, level=config.revocation_level)
        report = _evaluate(session, data, test_rows, config.max_test_rows)
        for metric, value in report.rows(standard_r2=config.standard_r2):
            metrics_rows.append((run_id, metric, _fmt(value)))
        metrics_rows.append((run_id, "revoked_participants", str(revoke_count)))
        metrics_rows.append((run_id, "trees", str(session.forest.params.t_max)))
        ledger_path = outdir / ("ledger_%s.csv" % run_id)
        ledger_path.write_text(session.ledger.to_csv())
        written.append(ledger_path)
        forest_path = outdir / ("forest_%s.bin" % run_id)
        save_forest(session.forest, forest_path)
        written.append(forest_path)

    if config.mode == "tree_sweep":
        for seed in config.seeds:
            for t in config.t_sweep:
                one_run("s%d_t%d" % (seed, t), seed, t_max=t)
    elif config.mode == "single":
        for seed in config.seeds:
            one_run("s%d" % seed, seed)
    else:
        for seed in config.seeds:
            for k in config.revoke_counts:
                one_run("s%d_r%d" % (seed, k), seed, revoke_count=k)

    out = io.StringIO()
    out.write("run_id,metric,value\n")
    for run_id, metric, value in metrics_rows:
        out.write("%s,%s,%s\n" % (run_id, metric, value))
    metrics_path = outdir / "metrics.csv"
    metrics_path.write_text(out.getvalue())
    written.insert(0, metrics_path)

    if config.gnuplot:
        # one column per metric, one row per run, whitespace separated
        by_run: dict[str, dict[str, str]] = {}
        for run_id, metric, value in metrics_rows:
            by_run.setdefault(run_id, {})[metric] = value
        names = sorted({m for row in by_run.values() for m in row})
        lines = ["# run_id " + " ".join(names)]
        for run_id in sorted(by_run):
            lines.append(
                run_id + " " + " ".join(by_run[run_id].get(m, "nan") for m in names)
            )
        dat_path = outdir / "metrics.dat"
        dat_path.write_text("\n".join(lines) + "\n")
        written.append(dat_path)
    return written
