"""Command line entry point."""

from __future__ import annotations

import json
from pathlib import Path

import click

from psytrain.gateway import HttpProvider, ProviderConfig, load_script
from psytrain.kb import default_data_dir
from psytrain.platform.api import build_app


@click.group()
def main():
    """Psychiatry consultation training platform."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None, help="JSON file with provider settings.")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--provider", "provider_kind",
              type=click.Choice(["scripted", "http"]), default="scripted",
              show_default=True)
@click.option("--kb-dir", type=click.Path(exists=True), default=None,
              help="Directory with knowledge base JSON files.")
@click.option("--seed", type=int, default=0, show_default=True)
def serve(config_path, port, provider_kind, kb_dir, seed):
    """Run the HTTP API server."""
    import uvicorn

    settings = {}
    if config_path:
        settings = json.loads(Path(config_path).read_text())

    config = ProviderConfig(**settings.get("gateway", {}))
    if provider_kind == "http":
        provider = HttpProvider(settings.get("llm_endpoint", "http://localhost:9000/v1/complete"))
    else:
        script = settings.get("script_path") or str(
            default_data_dir() / "scripts" / "default.json")
        provider = load_script(script)

    app = build_app(provider=provider, kb_dir=kb_dir, seed=seed, config=config)
    uvicorn.run(app, host=settings.get("host", "127.0.0.1"), port=port)


if __name__ == "__main__":
    main()
