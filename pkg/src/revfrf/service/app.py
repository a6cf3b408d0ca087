"""FastAPI application wrapping the federation library.

The service owns live sessions (keyed by store directory and run id) so a
train/predict/test/revoke sequence over HTTP reuses one federation
instance; every run is also persisted through the run store, so a fresh
service process can deterministically reconstruct any previously trained
run from its manifest.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from revfrf.errors import ProtocolError, RevfrfError, ValidationError
from revfrf.crypto import keygen
from revfrf.federation.session import FederationSession
from revfrf.forest.scoring import TASK_CLASSIFICATION
from revfrf.harness.dataset import synth_dataset
from revfrf.harness.experiment import (
    build_session_inputs,
    config_from_dict,
    run_experiment,
)
from revfrf.harness.metrics import compute_metrics
from revfrf.harness.runstore import RunStore
from revfrf.service import schemas as sc

__all__ = ["create_app"]


def _run_id_for(config_dict: dict, seed: int) -> str:
    digest = hashlib.sha256(
        json.dumps({"config": config_dict, "seed": seed}, sort_keys=True).encode()
    )
    return "run-%s" % digest.hexdigest()[:12]


def create_app() -> FastAPI:
    app = FastAPI(title="revfrf", version="0.1.0")
    app.state.sessions = {}

    @app.exception_handler(RevfrfError)
    async def _revfrf_error(_request, exc: RevfrfError):
        if isinstance(exc, ValidationError):
            status, kind = 400, "validation"
        elif isinstance(exc, ProtocolError):
            status, kind = 409, "protocol"
        else:
            status, kind = 500, "internal"
        return JSONResponse(
            status_code=status, content={"error": str(exc), "kind": kind}
        )

    def _session_for(store_dir: str, run_id: str):
        key = (str(Path(store_dir).resolve()), run_id)
        if key not in app.state.sessions:
            store = RunStore(store_dir)
            session, config, manifest = store.load_session(run_id)
            app.state.sessions[key] = (session, config, manifest, store)
        return app.state.sessions[key]

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    @app.post("/keygen", response_model=sc.KeygenResponse)
    async def do_keygen(req: sc.KeygenRequest):
        params, _factory, shares = keygen(kappa=req.kappa, c=req.c, seed=req.seed)
        path = None
        if req.out_path:
            material = {
                "n": hex(params.n),
                "g": hex(params.g),
                "kappa": params.kappa,
                "c": params.c,
                "r1_bits": params.r1_bits,
                "lam1": hex(shares.lam1),
                "lam2": hex(shares.lam2),
            }
            out = Path(req.out_path)
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(json.dumps(material, indent=2, sort_keys=True))
            path = str(out)
        return sc.KeygenResponse(
            modulus_bits=params.n.bit_length(),
            kappa=params.kappa,
            c=params.c,
            r1_bits=params.r1_bits,
            path=path,
        )

    @app.post("/datasets/synth", response_model=sc.SynthResponse)
    async def do_synth(req: sc.SynthRequest):
        task = TASK_CLASSIFICATION if req.task == "classification" else 0
        data = synth_dataset(
            n_rows=req.rows,
            n_features=req.features,
            task=task,
            seed=req.seed,
            informative=tuple(req.informative),
            noise=req.noise,
            n_classes=req.classes,
        )
        out = Path(req.out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        with out.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(list(data.feature_names) + ["label"])
            for row, label in zip(data.x, data.y):
                writer.writerow([repr(float(v)) for v in row] + [repr(float(label))])
        return sc.SynthResponse(path=str(out), rows=data.n_rows, features=data.n_features)

    @app.post("/train", response_model=sc.TrainResponse)
    async def do_train(req: sc.TrainRequest):
        config = config_from_dict(req.config)
        seed = req.seed if req.seed is not None else config.seeds[0]
        run_id = req.run_id or _run_id_for(req.config, seed)
        data, plan, scfg, train_mask, _test_rows = build_session_inputs(config, seed)
        session = FederationSession.from_dataset(scfg, data.x, data.y, plan.owners)
        session.train_mask = train_mask
        session.train()
        store = RunStore(req.store_dir)
        rdir = store.save_run(run_id, config, seed, session)
        key = (str(Path(req.store_dir).resolve()), run_id)
        app.state.sessions[key] = (session, config, {"seed": seed, "revoked": []}, store)
        return sc.TrainResponse(
            run_id=run_id,
            trees=len(session.forest.trees),
            internal_nodes=session.forest.internal_count(),
            providers=sorted(session.forest.providers()),
            forest_path=str(rdir / "forest.bin"),
            ledger_path=str(rdir / "ledger.csv"),
        )

    @app.post("/predict", response_model=sc.PredictResponse)
    async def do_predict(req: sc.PredictRequest):
        session, _config, _manifest, _store = _session_for(req.store_dir, req.run_id)
        requester = req.requester
        if requester is None:
            active = session.active_participant_ids()
            if not active:
                raise ProtocolError("no active participant can issue requests")
            requester = active[0]
        value = session.predict(requester, req.features)
        return sc.PredictResponse(
            run_id=req.run_id, prediction=float(value), path_bits=len(session.cs.observed_bits)
        )

    @app.post("/test", response_model=sc.TestResponse)
    async def do_test(req: sc.TestRequest):
        session, config, manifest, _store = _session_for(req.store_dir, req.run_id)
        data, _plan, _scfg, _mask, test_rows = build_session_inputs(
            config, int(manifest["seed"])
        )
        rows = req.rows if req.rows is not None else [int(r) for r in test_rows]
        rows = rows[: req.max_rows]
        if not rows:
            raise ValidationError("no rows to test")
        preds = [session.test(int(r)) for r in rows]
        report = compute_metrics(preds, data.y[list(rows)], data.task)
        metrics = {name: float(v) for name, v in report.rows(req.standard_r2)}
        path = None
        if req.out_path:
            out = Path(req.out_path)
            out.parent.mkdir(parents=True, exist_ok=True)
            lines = ["run_id,metric,value"]
            lines += ["%s,%s,%r" % (req.run_id, k, v) for k, v in metrics.items()]
            out.write_text("\n".join(lines) + "\n")
            path = str(out)
        return sc.TestResponse(
            run_id=req.run_id, n_rows=len(rows), metrics=metrics, metrics_path=path
        )

    @app.post("/revoke", response_model=sc.RevokeResponse)
    async def do_revoke(req: sc.RevokeRequest):
        session, _config, _manifest, store = _session_for(req.store_dir, req.run_id)
        accepted = session.revoke(req.participant, level=req.level)
        if accepted:
            store.record_revocation(req.run_id, session, req.participant, req.level)
        return sc.RevokeResponse(
            run_id=req.run_id,
            accepted=accepted,
            participant=req.participant,
            level=req.level,
            remaining_providers=sorted(session.forest.providers()),
        )

    @app.post("/bench", response_model=sc.BenchResponse)
    async def do_bench(req: sc.BenchRequest):
        config = config_from_dict(req.config)
        written = run_experiment(config, req.out_dir)
        return sc.BenchResponse(reports=[str(p) for p in written])

    return app
