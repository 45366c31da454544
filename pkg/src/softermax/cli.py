"""Command-line front end: ``softermax run | sweep | tables``."""

from __future__ import annotations

import sys

import click

from .engine import EngineConfig
from .gen import GenSpec
from .harness import reports_to_csv, reports_to_json, run_once, run_sweep
from .lpw import build_pow2_table, build_recip_table


def _engine_config(lane_width: int, mode: str) -> EngineConfig:
    cfg = EngineConfig(lane_width=lane_width, mode=mode)
    if not cfg.lane_width_is_standard:
        click.echo(f"warning: nonstandard lane width {lane_width}", err=True)
    return cfg


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        click.echo(text, nl=False)


_run_options = [
    click.option("--rows", default=8, show_default=True, help="Generated matrix rows."),
    click.option("--cols", default=128, show_default=True, help="Generated matrix cols (sequence length)."),
    click.option("--distribution", default="normal(0,1)", show_default=True,
                 help="normal(mu,sigma) | uniform(lo,hi) | attention(d_k)"),
    click.option("--seed", default=1, show_default=True, help="64-bit PRNG seed."),
    click.option("--lane-width", default=16, show_default=True,
                 help="Vector slice width (16 or 32 are the standard sizes)."),
    click.option("--mode", type=click.Choice(["quantized", "exact"]), default="quantized",
                 show_default=True),
    click.option("--input", "input_path", type=click.Path(), default=None,
                 help="Read scores from a CSV or SMX1 file instead of generating."),
    click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
                 show_default=True),
    click.option("--out", type=click.Path(), default=None, help="Write the report here instead of stdout."),
    click.option("--compare-oracle/--no-compare-oracle", default=True, show_default=True,
                 help="Also run the float reference and report error statistics."),
    click.option("--workers", default=1, show_default=True, help="Parallel row workers."),
]


def _with_run_options(f):
    for opt in reversed(_run_options):
        f = opt(f)
    return f


@click.group()
def main() -> None:
    """Bit-accurate fixed-point softmax pipeline with a float oracle."""


@main.command()
@_with_run_options
def run(rows, cols, distribution, seed, lane_width, mode, input_path, fmt, out,
        compare_oracle, workers) -> None:
    """Run the pipeline once and emit a report."""
    try:
        cfg = _engine_config(lane_width, mode)
        spec = None
        if input_path is None:
            spec = GenSpec(distribution, rows, cols, seed)
        report = run_once(cfg, spec, input_path=input_path,
                          compare_oracle=compare_oracle, workers=workers)
        text = report.to_json() if fmt == "json" else reports_to_csv([report])
        _emit(text, out)
    except (ValueError, OSError) as e:
        raise click.ClickException(str(e))


@main.command()
@click.option("--lengths", required=True, help="Comma-separated sequence lengths, e.g. 128,384,1024.")
@_with_run_options
def sweep(lengths, rows, cols, distribution, seed, lane_width, mode, input_path, fmt,
          out, compare_oracle, workers) -> None:
    """Run one report per sequence length (cols is swept; --cols is ignored)."""
    try:
        if input_path is not None:
            raise ValueError("sweep generates its inputs; --input is not supported")
        parsed = [int(tok) for tok in lengths.split(",") if tok.strip()]
        if not parsed:
            raise ValueError("no lengths given")
        cfg = _engine_config(lane_width, mode)
        base = GenSpec(distribution, rows, max(parsed), seed)
        reports = run_sweep(cfg, parsed, base, compare_oracle=compare_oracle, workers=workers)
        text = reports_to_json(reports) if fmt == "json" else reports_to_csv(reports)
        _emit(text, out)
    except (ValueError, OSError) as e:
        raise click.ClickException(str(e))


@main.command()
@click.option("--function", type=click.Choice(["pow2", "recip", "both"]), default="both",
              show_default=True)
@click.option("--out", type=click.Path(), default=None)
def tables(function, out) -> None:
    """Dump the LPW slope/intercept tables as JSON."""
    import json as _json

    try:
        objs = []
        if function in ("pow2", "both"):
            objs.append(build_pow2_table().to_dict())
        if function in ("recip", "both"):
            objs.append(build_recip_table().to_dict())
        payload = objs[0] if len(objs) == 1 else objs
        _emit(_json.dumps(payload, indent=2) + "\n", out)
    except (ValueError, OSError) as e:
        raise click.ClickException(str(e))


if __name__ == "__main__":
    sys.exit(main())
