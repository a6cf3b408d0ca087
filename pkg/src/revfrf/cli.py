"""Command line surface: a thin client over the HTTP service.

Every verb sends requests to the FastAPI app -- in-process by default
(no socket needed), or to a running server via ``--server``.  Exit codes:
0 success, 1 validation error, 2 protocol error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx
import tomli

EXIT_VALIDATION = 1
EXIT_PROTOCOL = 2


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from revfrf.service.app import create_app

    return TestClient(create_app())


def _call(server: str | None, path: str, payload: dict) -> dict:
    with _client(server) as client:
        resp = client.post(path, json=payload)
    body = resp.json()
    if resp.status_code >= 400:
        kind = body.get("kind", "internal")
        message = body.get("error") or body.get("detail") or "request failed"
        click.echo("error: %s" % message, err=True)
        if kind == "protocol":
            sys.exit(EXIT_PROTOCOL)
        sys.exit(EXIT_VALIDATION)
    return body


def _load_toml(path: str) -> dict:
    try:
        return tomli.loads(Path(path).read_text())
    except FileNotFoundError:
        click.echo("error: no such config file: %s" % path, err=True)
        sys.exit(EXIT_VALIDATION)
    except tomli.TOMLDecodeError as exc:
        click.echo("error: config parse error: %s" % exc, err=True)
        sys.exit(EXIT_VALIDATION)


@click.group()
@click.option("--server", default=None, help="Base URL of a running service; default runs in-process.")
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Revocable federated random forests."""
    ctx.obj = server


@main.command()
@click.option("--kappa", default=512, show_default=True, help="Per-prime bit length.")
@click.option("--scale", "c", default=6, show_default=True, help="Fixed-point decimal digits.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", default=None, type=click.Path(), help="Write key material JSON here.")
@click.pass_obj
def keygen(server, kappa: int, c: int, seed: int, out_path: str | None) -> None:
    """Generate key material."""
    body = _call(server, "/keygen", {"kappa": kappa, "c": c, "seed": seed, "out_path": out_path})
    click.echo(json.dumps(body, indent=2, sort_keys=True))


@main.command()
@click.option("--rows", default=200, show_default=True)
@click.option("--features", default=6, show_default=True)
@click.option("--task", type=click.Choice(["classification", "regression"]), default="classification", show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--informative", default="0", show_default=True, help="Comma-separated informative feature ids.")
@click.option("--noise", default=0.0, show_default=True)
@click.option("--classes", default=2, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_obj
def synth(server, rows, features, task, seed, informative, noise, classes, out_path) -> None:
    """Emit a synthetic CSV dataset."""
    payload = {
        "rows": rows,
        "features": features,
        "task": task,
        "seed": seed,
        "informative": [int(v) for v in informative.split(",") if v != ""],
        "noise": noise,
        "classes": classes,
        "out_path": out_path,
    }
    body = _call(server, "/datasets/synth", payload)
    click.echo("wrote %s (%d rows, %d features)" % (body["path"], body["rows"], body["features"]))


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Experiment TOML.")
@click.option("--outdir", "store_dir", required=True, type=click.Path(), help="Run store directory.")
@click.option("--run-id", default=None, help="Override the derived run id.")
@click.option("--seed", default=None, type=int, help="Override the config's first seed.")
@click.pass_obj
def train(server, config_path: str, store_dir: str, run_id: str | None, seed: int | None) -> None:
    """Train a federated forest and persist the run."""
    body = _call(
        server,
        "/train",
        {"config": _load_toml(config_path), "store_dir": store_dir, "run_id": run_id,
         "seed": seed},
    )
    click.echo(
        "run %s: %d trees, %d internal nodes -> %s"
        % (body["run_id"], body["trees"], body["internal_nodes"], body["forest_path"])
    )


@main.command()
@click.option("--run-id", required=True)
@click.option("--outdir", "store_dir", required=True, type=click.Path())
@click.option("--features", required=True, help="Comma-separated values for every feature dimension.")
@click.option("--requester", default=None, type=int, help="Requesting participant id.")
@click.pass_obj
def predict(server, run_id: str, store_dir: str, features: str, requester: int | None) -> None:
    """Encrypted prediction for a full-dimension request."""
    payload = {
        "run_id": run_id,
        "store_dir": store_dir,
        "features": [float(v) for v in features.split(",")],
        "requester": requester,
    }
    body = _call(server, "/predict", payload)
    click.echo(repr(body["prediction"]))


@main.command()
@click.option("--run-id", required=True)
@click.option("--outdir", "store_dir", required=True, type=click.Path())
@click.option("--rows", default=None, help="Comma-separated row indices; default: the held-out split.")
@click.option("--max-rows", default=50, show_default=True)
@click.option("--standard-r2", is_flag=True, help="Label the conventional R2 as the primary R2 column.")
@click.option("--out", "out_path", default=None, type=click.Path(), help="Write metrics CSV here.")
@click.pass_obj
def test(server, run_id, store_dir, rows, max_rows, standard_r2, out_path) -> None:
    """Evaluate via the vertically-partitioned testing protocol."""
    payload = {
        "run_id": run_id,
        "store_dir": store_dir,
        "rows": [int(v) for v in rows.split(",")] if rows else None,
        "max_rows": max_rows,
        "standard_r2": standard_r2,
        "out_path": out_path,
    }
    body = _call(server, "/test", payload)
    for name, value in body["metrics"].items():
        click.echo("%s,%r" % (name, value))


@main.command()
@click.option("--run-id", required=True)
@click.option("--outdir", "store_dir", required=True, type=click.Path())
@click.option("--participant", required=True, type=int)
@click.option("--level", default=1, show_default=True, type=click.IntRange(1, 2))
@click.pass_obj
def revoke(server, run_id: str, store_dir: str, participant: int, level: int) -> None:
    """Revoke a participant and rebuild the affected subtrees."""
    body = _call(
        server,
        "/revoke",
        {"run_id": run_id, "store_dir": store_dir, "participant": participant, "level": level},
    )
    if not body["accepted"]:
        click.echo("revocation rejected", err=True)
        sys.exit(EXIT_PROTOCOL)
    click.echo(
        "revoked %d (level %d); remaining providers: %s"
        % (participant, level, body["remaining_providers"])
    )


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Experiment TOML.")
@click.option("--outdir", "out_dir", required=True, type=click.Path())
@click.pass_obj
def bench(server, config_path: str, out_dir: str) -> None:
    """Run the configured experiment sweep and emit report CSVs."""
    body = _call(server, "/bench", {"config": _load_toml(config_path), "out_dir": out_dir})
    for path in body["reports"]:
        click.echo(path)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from revfrf.service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
