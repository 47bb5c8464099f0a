"""Command-line entry point: one figure per invocation."""

from __future__ import annotations

import sys

import click

from .render import KINDS, FigureRequest, SchemaMismatchError, render


@click.command()
@click.argument("kind", type=click.Choice(list(KINDS)))
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@click.argument("output_image", type=click.Path(dir_okay=False))
@click.option("--log/--linear", "log_scale", default=True, show_default=True,
              help="Logarithmic or linear value axis.")
@click.option("--top", "top_count", default=4, show_default=True,
              help="Bars in the top-servers-bar figure.")
def main(kind, input_csv, output_image, log_scale, top_count):
    """Render a fedload CSV artifact (PNG or SVG by output suffix)."""
    request = FigureRequest(
        kind=kind, input_path=input_csv, output_path=output_image,
        log_scale=log_scale, top_count=top_count,
    )
    try:
        out = render(request)
    except SchemaMismatchError as exc:
        click.echo(f"error: schema-mismatch: {exc}", err=True)
        sys.exit(1)
    click.echo(f"ok: wrote {out}")


if __name__ == "__main__":
    main()
