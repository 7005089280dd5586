"""homectl: serve the controller or talk to a running one.

``homectl serve`` starts the HTTP service from a config file; the other
subcommands are thin clients over its endpoints.
"""

from __future__ import annotations

import json

import click
import requests
import uvicorn

from .demo import write_demo_files
from .service.api import create_app
from .service.config import ServiceConfig
from .service.controller import Controller

DEFAULT_URL = "http://127.0.0.1:8000"


@click.group()
def main() -> None:
    """Natural-language smart home controller."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def serve(config_path: str) -> None:
    """Run the controller service."""
    config = ServiceConfig.from_file(config_path)
    controller = Controller.from_config(config)
    host, port = config.host_port()
    app = create_app(controller)
    click.echo(f"mode={config.mode} backend={config.backend.kind} listening on {host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command()
@click.option("--out", "out_dir", default="demo", show_default=True, type=click.Path(file_okay=False))
@click.option("--mode", type=click.Choice(["auto", "review"]), default="review", show_default=True)
@click.option("--ui", "static_dir", default=None, type=click.Path(exists=True, file_okay=False),
              help="Built dashboard assets to serve under /ui.")
def demo(out_dir: str, mode: str, static_dir: str | None) -> None:
    """Write a ready-to-run demo config (mock backend, single room)."""
    config_path = write_demo_files(out_dir, mode=mode, static_dir=static_dir)
    click.echo(f"demo files written; start with: homectl serve --config {config_path}")


def _request(method: str, url: str, **kwargs) -> dict | list:
    try:
        resp = requests.request(method, url, timeout=30, **kwargs)
    except requests.RequestException as exc:
        raise click.ClickException(f"service unreachable: {exc}")
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        raise click.ClickException(f"HTTP {resp.status_code}: {detail}")
    return resp.json()


def _print_proposal(doc: dict) -> None:
    changes = doc["changeset"]["changes"]
    dropped = doc["changeset"]["dropped"]
    click.echo(f"{doc['id']}  [{doc['status']}]  {doc['command']!r}  ({doc['latency']:.2f}s)")
    for change in changes:
        path = ".".join((change["room"], change["device_type"], change["device"]))
        click.echo(f"  {path}.{change['property']}: {change['old']!r} -> {change['new']!r}")
    for entry in dropped:
        click.echo(f"  dropped {entry['path']} ({entry['kind']})")
    if doc.get("error"):
        click.echo(f"  error: {doc['error']}")


@main.command()
@click.argument("text")
@click.option("--url", default=DEFAULT_URL, show_default=True)
def cmd(text: str, url: str) -> None:
    """Send a command to the running service."""
    doc = _request("POST", f"{url}/command", json={"text": text})
    _print_proposal(doc)


@main.command()
@click.option("--url", default=DEFAULT_URL, show_default=True)
def state(url: str) -> None:
    """Print the current device state."""
    doc = _request("GET", f"{url}/state")
    click.echo(json.dumps(doc, indent=2))


@main.command()
@click.option("--url", default=DEFAULT_URL, show_default=True)
@click.option("--limit", type=int, default=None)
def proposals(url: str, limit: int | None) -> None:
    """List proposals, newest first."""
    params = {"limit": limit} if limit is not None else {}
    for doc in _request("GET", f"{url}/proposals", params=params):
        _print_proposal(doc)


@main.command()
@click.argument("proposal_id")
@click.option("--url", default=DEFAULT_URL, show_default=True)
def approve(proposal_id: str, url: str) -> None:
    """Approve a pending proposal."""
    _print_proposal(_request("POST", f"{url}/proposals/{proposal_id}/approve"))


@main.command()
@click.argument("proposal_id")
@click.option("--url", default=DEFAULT_URL, show_default=True)
def reject(proposal_id: str, url: str) -> None:
    """Reject a pending proposal."""
    _print_proposal(_request("POST", f"{url}/proposals/{proposal_id}/reject"))
