"""Train and serve commands."""

from __future__ import annotations

import click

from .config import load_adapter_config
from .data import load_examples
from .training import train_classifier


@click.group()
def cli():
    """Reference model server for the claim-verification wire protocols."""


@cli.command()
@click.option("--store", required=True, type=click.Path(exists=True),
              help="Normalized claim store (claims.jsonl) from the harness.")
@click.option("--dataset", default=None, help="Restrict to one dataset name.")
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def train(store, dataset, config_path, out):
    """Fine-tune the veracity classifier and save the best checkpoint."""
    cfg = load_adapter_config(config_path)
    train_examples = load_examples(store, "train", dataset)
    dev_examples = load_examples(store, "dev", dataset)
    checkpoint = train_classifier(train_examples, dev_examples, cfg, out)
    click.echo(f"checkpoint saved to {checkpoint}")


@cli.command()
@click.option("--checkpoint", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8600)
def serve(checkpoint, config_path, host, port):
    """Serve /v1/score, /v1/score_batch and the chat-completions proxy."""
    import uvicorn

    from .serving import create_app

    cfg = load_adapter_config(config_path)
    app = create_app(checkpoint, generator_backend=cfg.generator_backend)
    click.echo(f"serving adapter on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")


def main():
    cli()


if __name__ == "__main__":
    main()
