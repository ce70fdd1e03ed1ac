"""Command-line client for the audit service.

Every subcommand talks to the HTTP API: against a remote server when
``--server``/``TONEAUDIT_SERVER`` is set, otherwise against an in-process
application instance over an ASGI transport. Payloads returned by the
service are written to disk client-side.

Exit codes: 0 success, 1 usage error, 2 partial failure.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import httpx

from . import __version__
from .resources import bundled_emoji_test


class ServiceClient:
    def __init__(self, server: str | None):
        self._server = server
        self._app = None
        if server is None:
            from .service import create_app

            self._app = create_app()

    def post(self, path: str, payload: dict) -> dict:
        if self._server:
            response = httpx.post(f"{self._server.rstrip('/')}{path}", json=payload, timeout=600.0)
        else:
            response = self._post_in_process(path, payload)
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise click.ClickException(f"{path} failed ({response.status_code}): {detail}")
        return response.json()

    def _post_in_process(self, path: str, payload: dict) -> httpx.Response:
        import asyncio

        async def go():
            transport = httpx.ASGITransport(app=self._app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://toneaudit.local", timeout=600.0
            ) as client:
                return await client.post(path, json=payload)

        return asyncio.run(go())


pass_client = click.make_pass_decorator(ServiceClient)


@click.group()
@click.option(
    "--server",
    envvar="TONEAUDIT_SERVER",
    default=None,
    help="Audit service URL; defaults to an in-process instance.",
)
@click.version_option(version=__version__)
@click.pass_context
def cli(ctx, server):
    """Skin-tone bias audits for emoji embeddings and tokenizers."""
    ctx.obj = ServiceClient(server)


def _data_option(fn):
    return click.option(
        "--data",
        type=click.Path(),
        default=lambda: str(bundled_emoji_test()),
        show_default="bundled snapshot",
        help="Unicode emoji data file (emoji-test.txt format).",
    )(fn)


def _write_payloads(out_dir: Path, tables: dict, figures: dict):
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, payload in list(tables.items()) + list(figures.items()):
        (out_dir / name).write_text(payload, encoding="utf-8")
        click.echo(f"wrote {out_dir / name}")


@cli.command()
@_data_option
@click.option("--group", default=None, help="Restrict to one group.")
@click.option("--subgroup", default=None, help="Restrict to one subgroup.")
@click.option("--out", type=click.Path(), required=True, help="Output JSON path.")
@pass_client
def catalog(client, data, group, subgroup, out):
    """Parse the emoji data file and emit the catalog as JSON."""
    result = client.post(
        "/v1/catalog", {"data_file": _abs(data), "group": group, "subgroup": subgroup}
    )
    Path(out).write_text(json.dumps(result["catalog"], indent=1), encoding="utf-8")
    counts = result["counts"]
    click.echo(
        f"catalog {result['unicode_version'] or '(unversioned)'}: "
        f"{counts['families']} families, "
        f"{counts['toned_fully_qualified']} toned fully-qualified sequences, "
        f"{counts['toned_any_status']} toned lines across all statuses"
    )
    click.echo(f"wrote {out}")


@cli.command()
@click.option("--embeddings", type=click.Path(), required=True)
@click.option(
    "--format", "fmt", type=click.Choice(["word2vec", "dump"]), default="word2vec",
    show_default=True,
)
@_data_option
@click.option("--label", default=None)
@click.option("--out", type=click.Path(), default=None, help="Directory for the CSV table.")
@pass_client
def coverage(client, embeddings, fmt, data, label, out):
    """Report emoji and skin-tone coverage of an embedding set."""
    result = client.post(
        "/v1/coverage",
        {"embeddings_file": _abs(embeddings), "format": fmt, "data_file": _abs(data), "label": label},
    )
    click.echo(
        f"{result['model']}: {result['total_tokens']} tokens, "
        f"{result['emojis_supported']} emojis, "
        f"{result['skin_toned_supported']} skin-toned"
    )
    if out:
        _write_payloads(Path(out), result["tables"], {})


@cli.command()
@click.option("--manifest", type=click.Path(), required=True)
@click.option("--data", type=click.Path(), default=None,
              help="Restrict to ids present in this emoji data file.")
@click.option("--modifiers-only", is_flag=True, default=False)
@click.option("--boxplot", is_flag=True, default=False, help="Also render a boxplot SVG.")
@click.option("--out", type=click.Path(), default=None, help="Directory for CSV/SVG payloads.")
@pass_client
def tokens(client, manifest, data, modifiers_only, boxplot, out):
    """Token-cost statistics for skin-toned emojis and bare modifiers."""
    result = client.post(
        "/v1/tokens",
        {
            "manifest_file": _abs(manifest),
            "data_file": _abs(data),
            "modifiers_only": modifiers_only,
            "boxplot": boxplot,
        },
    )
    click.echo(json.dumps({k: v for k, v in result.items() if k not in ("tables", "figures")}, indent=1))
    if out:
        _write_payloads(Path(out), result["tables"], result["figures"])


@cli.command()
@click.option("--dump", type=click.Path(), required=True)
@_data_option
@click.option("--strip-modifier-tokens", is_flag=True, default=False)
@click.option("--label", default=None)
@click.option("--out", type=click.Path(), default=None)
@pass_client
def align(client, dump, data, strip_modifier_tokens, label, out):
    """Emoji vs description alignment per tone (cosine + WMD)."""
    result = client.post(
        "/v1/align",
        {
            "dump_file": _abs(dump),
            "data_file": _abs(data),
            "strip_modifier_tokens": strip_modifier_tokens,
            "label": label,
        },
    )
    for row in result["rows"]:
        click.echo(
            f"{row['tone']:>13}: cosine={_fmt(row['mean_cosine'])} "
            f"wmd-cos={_fmt(row['mean_wmd_cosine'])} "
            f"wmd-euc={_fmt(row['mean_wmd_euclidean'])} "
            f"pairs={row['pairs']} skipped={row['skipped']}"
        )
    if out:
        _write_payloads(Path(out), result["tables"], {})


def _abs(path) -> str | None:
    return None if path is None else str(Path(path).resolve())


def _pick_source(dump, embeddings):
    if (dump is None) == (embeddings is None):
        raise click.UsageError("provide exactly one of --dump or --embeddings")
    if dump is not None:
        return _abs(dump), "dump"
    return _abs(embeddings), "word2vec"


def _fmt(value) -> str:
    return "n/a" if value is None else f"{value:.4f}"


@cli.command()
@click.option("--dump", type=click.Path(), required=True)
@_data_option
@click.option("--group", default=None)
@click.option("--subgroup", default=None)
@click.option("--label", default=None)
@click.option("--out", type=click.Path(), default=None)
@pass_client
def pairwise(client, dump, data, group, subgroup, label, out):
    """Mean cosine distance between tone variants of the same base."""
    result = client.post(
        "/v1/pairwise",
        {
            "dump_file": _abs(dump),
            "data_file": _abs(data),
            "group": group,
            "subgroup": subgroup,
            "label": label,
        },
    )
    _echo_matrix(result)
    if out:
        _write_payloads(Path(out), result["tables"], result["figures"])


def _echo_matrix(result):
    tones = result["tones"]
    click.echo("          " + " ".join(f"{t:>12}" for t in tones))
    for tone, row in zip(tones, result["matrix"]):
        cells = " ".join(f"{v:12.4f}" if v is not None else " " * 9 + "n/a" for v in row)
        click.echo(f"{tone:>10} {cells}")


@cli.command()
@click.option("--dump", type=click.Path(), default=None, help="Adapter dump (JSONL).")
@click.option("--embeddings", type=click.Path(), default=None, help="Static word2vec text file.")
@_data_option
@click.option("--vad", type=click.Path(), default=None, help="VAD lexicon (bundled by default).")
@click.option("--low", type=float, default=0.48, show_default=True)
@click.option("--high", type=float, default=0.52, show_default=True)
@click.option("--subgroup", "subgroups", multiple=True, help="Family subgroups (repeatable).")
@click.option("--no-normalize", is_flag=True, default=False, help="Raw centroid averaging.")
@click.option("--label", default=None)
@click.option("--out", type=click.Path(), default=None)
@pass_client
def rnd(client, dump, embeddings, data, vad, low, high, subgroups, no_normalize, label, out):
    """Pairwise relative norm distance against the neutral lexicon."""
    path, fmt = _pick_source(dump, embeddings)
    result = client.post(
        "/v1/rnd",
        {
            "dump_file": path,
            "format": fmt,
            "data_file": _abs(data),
            "vad_file": _abs(vad),
            "neutral_low": low,
            "neutral_high": high,
            "subgroups": list(subgroups) or None,
            "normalize": not no_normalize,
            "label": label,
        },
    )
    _echo_matrix(result)
    if out:
        _write_payloads(Path(out), result["tables"], result["figures"])


@cli.command()
@click.option("--dump", type=click.Path(), default=None, help="Adapter dump (JSONL).")
@click.option("--embeddings", type=click.Path(), default=None, help="Static word2vec text file.")
@_data_option
@click.option("--mode", type=click.Choice(["roles", "caliskan"]), default="roles", show_default=True)
@click.option("--sets", type=click.Path(), default=None, help="Attribute sets (bundled by default).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--permutations", type=int, default=10_000, show_default=True)
@click.option("--exact-limit", type=int, default=20_000, show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--label", default=None)
@click.option("--out", type=click.Path(), default=None)
@pass_client
def weat(client, dump, embeddings, data, mode, sets, seed, permutations, exact_limit, alpha, label, out):
    """Association test suite over tone pairs."""
    path, fmt = _pick_source(dump, embeddings)
    result = client.post(
        "/v1/weat",
        {
            "dump_file": path,
            "format": fmt,
            "data_file": _abs(data),
            "mode": mode,
            "sets_file": _abs(sets),
            "seed": seed,
            "permutations": permutations,
            "exact_limit": exact_limit,
            "alpha": alpha,
            "label": label,
        },
    )
    for row in result["rows"]:
        click.echo(
            f"{row['x_tone']:>13} vs {row['y_tone']:<13} "
            f"mean effect {row['mean_effect_size']:+.3f} "
            f"significant {row['significant_rate']:.0%} of {row['tests']}"
        )
    if out:
        _write_payloads(Path(out), result["tables"], {})


@cli.command()
@click.option("--dump", type=click.Path(), default=None, help="Adapter dump (JSONL).")
@click.option("--embeddings", type=click.Path(), default=None, help="Static word2vec text file.")
@_data_option
@click.option("--sets", type=click.Path(), default=None)
@click.option("--lam", "lam", type=float, default=0.1, show_default=True, help="L2 strength.")
@click.option("--label", default=None)
@click.option("--out", type=click.Path(), default=None)
@pass_client
def rnsb(client, dump, embeddings, data, sets, lam, label, out):
    """Negative-sentiment share distribution across tone variants."""
    path, fmt = _pick_source(dump, embeddings)
    result = client.post(
        "/v1/rnsb",
        {
            "dump_file": path,
            "format": fmt,
            "data_file": _abs(data),
            "sets_file": _abs(sets),
            "sentiment_lambda": lam,
            "label": label,
        },
    )
    shares = " ".join(
        f"{tone}={_fmt(share)}" for tone, share in result["mean_shares"].items()
    )
    click.echo(f"{result['model']}: {shares}")
    click.echo(f"avg KL {result['avg_kl']:.6f} over {result['roles']} roles")
    if out:
        _write_payloads(Path(out), result["tables"], {})


@cli.command()
@click.option("--config", type=click.Path(), required=True)
@click.option("--out", type=click.Path(), default=None, help="Override the config output dir.")
@pass_client
def audit(client, config, out):
    """Run every configured analysis and write the full report."""
    result = client.post("/v1/audit", {"config_file": _abs(config)})
    out_dir = Path(out) if out else Path(result["output_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, payload in result["analyses"].items():
        _write_payloads(out_dir, payload["tables"], payload["figures"])
    (out_dir / "report.md").write_text(result["report_md"], encoding="utf-8")
    click.echo(f"wrote {out_dir / 'report.md'}")
    if result["errors"]:
        for name, message in result["errors"].items():
            click.echo(f"analysis {name} failed: {message}", err=True)
        sys.exit(2)


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8390, show_default=True)
def serve(host, port):
    """Run the audit service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


def main():
    try:
        cli.main(standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(2)
    except SystemExit:
        raise


if __name__ == "__main__":
    main()
