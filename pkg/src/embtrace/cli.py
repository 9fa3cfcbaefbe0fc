"""Command line entry point: precompute, serve, bench, gen-demo."""

from __future__ import annotations

import json
import socket
import sys
from pathlib import Path

import click

from . import bench as bench_mod
from . import demo, pipeline
from .errors import TraceError
from .model import load_bundle


def _fail(exc: BaseException, code: int = 1) -> None:
    """Machine-readable error line on stderr, non-zero exit."""
    print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}), file=sys.stderr)
    sys.exit(code)


def _set_threads(threads: int | None) -> None:
    if threads is not None:
        import numba

        if threads < 1:
            _fail(ValueError(f"--threads must be positive, got {threads}"))
        try:
            numba.set_num_threads(threads)
        except ValueError:
            # the pool cap is fixed at import from NUMBA_NUM_THREADS (defaults
            # to the core count); going above it needs the env var, not a flag
            _fail(
                ValueError(
                    f"--threads {threads} exceeds this process's thread cap; "
                    "set NUMBA_NUM_THREADS before launching to raise it"
                )
            )


def _parse_k_list(text: str | None):
    if text is None:
        return None
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        _fail(exc)


@click.group()
def main():
    """Per-point quality measures for 2D embeddings."""


@main.command("precompute")
@click.option("--data", envvar="TRACE_DATA", required=True, type=click.Path(path_type=Path))
@click.option("--k", "k_text", default=None, help="Comma-separated k values, e.g. 10,50,100.")
@click.option("--seed", type=int, default=None)
@click.option("--triplets", type=int, default=None, help="Sampled triplets per point.")
@click.option("--anchors", type=int, default=None, help="Anchor count for rank correlation.")
@click.option("--force", is_flag=True, help="Recompute even when the cache matches.")
@click.option("--threads", type=int, default=None, help="Cap the worker thread count.")
def cmd_precompute(data, k_text, seed, triplets, anchors, force, threads):
    """Build every neighbor graph and metric column for a dataset directory."""
    _set_threads(threads)
    try:
        bundle = load_bundle(data)
        manifest = bundle.manifest
        config = pipeline.PrecomputeConfig(
            k_list=_parse_k_list(k_text) or tuple(manifest.k_list),
            seed=manifest.seed if seed is None else seed,
            triplets_per_point=500 if triplets is None else triplets,
            anchor_count=anchors,
            force=force,
        )
        manifest = pipeline.precompute(bundle, config)
        report = pipeline.status(manifest)
    except (TraceError, OSError) as exc:
        _fail(exc)
    for row in report["graphs"]:
        click.echo(f"{row['state']:>8}  graph   {row['stem']}")
    for row in report["columns"]:
        where = row["embedding"] or "(bundle)"
        click.echo(f"{row['state']:>8}  column  {where}  {row['path']}")
    for warning in report["warnings"]:
        click.echo(f" warning  {warning['reason']}")
    click.echo(
        f"present={report['present']} missing={report['missing']} corrupt={report['corrupt']}"
    )
    if report["missing"] or report["corrupt"]:
        sys.exit(1)


@main.command("status")
@click.option("--data", envvar="TRACE_DATA", required=True, type=click.Path(path_type=Path))
def cmd_status(data):
    """Report cache state without computing anything."""
    from .model import Manifest

    try:
        report = pipeline.status(Manifest.load(data))
    except (TraceError, OSError) as exc:
        _fail(exc)
    click.echo(json.dumps(report, indent=2, sort_keys=True))
    if report["missing"] or report["corrupt"]:
        sys.exit(1)


@main.command("serve")
@click.option("--data", envvar="TRACE_DATA", required=True, type=click.Path(path_type=Path))
@click.option("--port", type=int, default=8000)
@click.option("--bind", default="127.0.0.1")
def cmd_serve(data, port, bind):
    """Serve the read-only HTTP API for a dataset directory."""
    import uvicorn

    from .service import create_app

    try:
        bundle = load_bundle(data)
        app = create_app(bundle)
    except (TraceError, OSError) as exc:
        _fail(exc)
    try:
        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((bind, port))
        probe.close()
    except OSError as exc:
        _fail(exc)
    uvicorn.run(app, host=bind, port=port, log_level="warning")


@main.command("bench")
@click.option("--n", type=int, required=True)
@click.option("--d", type=int, required=True)
@click.option("--embeddings", type=int, default=5)
@click.option("--k", type=int, default=50)
@click.option("--seed", type=int, default=42)
@click.option("--triplets", type=int, default=500)
@click.option("--threads", type=int, default=None, help="Cap the worker thread count.")
def cmd_bench(n, d, embeddings, k, seed, triplets, threads):
    """Time the full precompute on synthetic data; JSON report on stdout."""
    _set_threads(threads)
    try:
        report = bench_mod.run_bench(
            n, d, embedding_count=embeddings, k=k, seed=seed, triplets_per_point=triplets
        )
    except TraceError as exc:
        _fail(exc)
    click.echo(json.dumps(report.to_dict(), indent=2))


@main.command("gen-demo")
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.option("--n", type=int, default=demo.DEFAULT_N)
@click.option("--d", type=int, default=demo.DEFAULT_D)
@click.option("--clusters", type=int, default=demo.DEFAULT_CLUSTERS)
@click.option("--seed", type=int, default=42)
@click.option(
    "--fixture",
    type=click.Choice(["line4"]),
    default=None,
    help="Emit a named hand-check fixture instead of random data (ignores --n/--d).",
)
def cmd_gen_demo(out, n, d, clusters, seed, fixture):
    """Write a complete synthetic dataset directory."""
    try:
        if fixture == "line4":
            manifest = demo.write_line4_bundle(out)
        else:
            manifest = demo.write_demo_bundle(out, n=n, d=d, clusters=clusters, seed=seed)
    except (TraceError, OSError, ValueError) as exc:
        _fail(exc)
    click.echo(f"wrote {manifest.name} to {out}")


if __name__ == "__main__":
    main()
