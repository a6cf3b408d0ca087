"""Persistent run artifacts and deterministic session reconstruction.

A trained run is stored as a directory holding the forest binary, the
ledger CSV, and a JSON manifest with everything needed to rebuild the
session deterministically: the experiment config, the seed, and the list
of already-revoked participants.  Key material is never written; it is
re-derived from the seed, which the manifest records precisely so that a
reconstructed session ends up with byte-identical keys.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

from revfrf.errors import ValidationError
from revfrf.federation.session import FederationSession
from revfrf.forest.forest_io import load_forest, save_forest
from revfrf.harness.experiment import ExperimentConfig, build_session_inputs

__all__ = ["RunStore"]

_MANIFEST = "manifest.json"
_FOREST = "forest.bin"
_LEDGER = "ledger.csv"


class RunStore:
    """Directory-backed store of trained runs."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def run_dir(self, run_id: str) -> Path:
        return self.root / run_id

    def save_run(
        self,
        run_id: str,
        config: ExperimentConfig,
        seed: int,
        session: FederationSession,
        revoked: list[tuple[int, int]] | None = None,
    ) -> Path:
        rdir = self.run_dir(run_id)
        rdir.mkdir(parents=True, exist_ok=True)
        save_forest(session.forest, rdir / _FOREST)
        (rdir / _LEDGER).write_text(session.ledger.to_csv())
        manifest = {
            "run_id": run_id,
            "seed": seed,
            "config": asdict(config),
            "revoked": revoked or [],
        }
        (rdir / _MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True))
        return rdir

    def record_revocation(self, run_id: str, session: FederationSession, u_r: int, level: int) -> None:
        rdir = self.run_dir(run_id)
        manifest = self._read_manifest(run_id)
        manifest["revoked"].append([u_r, level])
        save_forest(session.forest, rdir / _FOREST)
        (rdir / _LEDGER).write_text(session.ledger.to_csv())
        (rdir / _MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True))

    def _read_manifest(self, run_id: str) -> dict:
        path = self.run_dir(run_id) / _MANIFEST
        if not path.exists():
            raise ValidationError("unknown run %r" % run_id)
        return json.loads(path.read_text())

    def load_session(self, run_id: str) -> tuple[FederationSession, ExperimentConfig, dict]:
        """Rebuild a session: keys re-derived, forest loaded, revocations replayed
        as state (the destroyed subtrees are already gone from the stored forest)."""
        manifest = self._read_manifest(run_id)
        cfg_dict = dict(manifest["config"])
        cfg_dict["explicit_plan"] = (
            {int(k): tuple(v) for k, v in cfg_dict["explicit_plan"].items()}
            if cfg_dict.get("explicit_plan")
            else None
        )
        for key in ("seeds", "revoke_counts", "t_sweep"):
            cfg_dict[key] = tuple(cfg_dict[key])
        config = ExperimentConfig(**cfg_dict)
        seed = int(manifest["seed"])
        data, plan, scfg, train_mask, test_rows = build_session_inputs(config, seed)
        session = FederationSession.from_dataset(scfg, data.x, data.y, plan.owners)
        session.train_mask = train_mask
        forest = load_forest(
            self.run_dir(run_id) / _FOREST, session.params, lambda pid: session.keyring[pid]
        )
        session.adopt_forest(forest)
        for u_r, _level in manifest["revoked"]:
            session.mark_revoked(int(u_r))
        return session, config, manifest
