"""Command line for the extraction adapter."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .extract import (
    ExtractionJob,
    JobError,
    emit_modifier_manifest,
    load_items,
    run_extraction,
)


@click.group()
def cli():
    """Dump hidden states and token manifests from published models."""


@cli.command()
@click.option("--model", required=True, help="Model hub id.")
@click.option("--items", type=click.Path(exists=True), required=True,
              help="JSON list of {id, payload, kind}.")
@click.option("--dump", type=click.Path(), required=True)
@click.option("--manifest", type=click.Path(), required=True)
@click.option("--precision", type=click.Choice(["full", "half-upconverted"]),
              default="full", show_default=True)
def extract(model, items, dump, manifest, precision):
    """Run the model over each item; write the dump and manifest."""
    job = ExtractionJob(
        model_id=model,
        items=load_items(items),
        dump_path=Path(dump),
        manifest_path=Path(manifest),
        precision=precision,
    )
    report = run_extraction(job)
    click.echo(f"wrote {report.written} records to {dump}")
    for item_id, reason in report.skipped.items():
        click.echo(f"skipped {item_id}: {reason}", err=True)


@cli.command("modifier-manifest")
@click.option("--model", required=True, help="Model hub id (tokenizer only).")
@click.option("--manifest", type=click.Path(), required=True)
def modifier_manifest(model, manifest):
    """Emit a manifest holding exactly the five bare tone modifiers."""
    counts = emit_modifier_manifest(model, Path(manifest))
    for item_id, count in counts.items():
        click.echo(f"{item_id}: {count} tokens")


def main():
    try:
        cli.main(standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except (click.ClickException,) as exc:
        exc.show()
        sys.exit(2)
    except JobError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    main()
