"""Command-line interface for batch pipelines, experiments, and serving."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .archive import Archive, ScanFilter
from .capture import CaptureEvent
from .config import ServiceConfig, load_config
from .encoding import (
    DETAIL_SWEEP,
    EncodingStrategy,
    PatchPolicy,
    PatchVariant,
    encode_capture,
)
from .geometry import CameraIntrinsics, PixelPoint
from .harness import (
    ExperimentConfig,
    emit_report,
    render_samples,
    run_encoding_experiment,
    run_retrieval_experiment,
)
from .manifest import load_manifest
from .providers import MockProviders, RemoteProviders, config_from_env
from .retrieval import AnswerMode, FlatIndex, IndexVariant, Query, answer, index_entry


def _providers(mock_fixtures: str | None, use_env: bool):
    if use_env:
        cfg = config_from_env()
        if cfg is None:
            raise click.ClickException(
                "--remote requires GAZEMEM_ENDPOINT to be set"
            )
        return RemoteProviders(cfg)
    if mock_fixtures:
        return MockProviders.from_fixture_file(mock_fixtures)
    return MockProviders()


def _parse_policy(patch: str, background: bool) -> PatchPolicy:
    return PatchPolicy(
        variant=PatchVariant.from_name(patch), include_background=background
    )


provider_options = [
    click.option("--mock-fixtures", type=click.Path(exists=True), default=None,
                 help="JSONL fixture table for the offline mock providers."),
    click.option("--remote", "use_remote", is_flag=True, default=False,
                 help="Use the remote endpoint from GAZEMEM_ENDPOINT."),
]


def with_provider_options(fn):
    for option in reversed(provider_options):
        fn = option(fn)
    return fn


@click.group()
def main():
    """Gaze-guided memory archiving and recall."""


@main.command()
@click.option("--archive", "archive_dir", required=True, type=click.Path())
@click.option("--manifest", "manifest_path", type=click.Path(exists=True))
@click.option("--image", "image_path", type=click.Path(exists=True))
@click.option("--gaze-x", type=float)
@click.option("--gaze-y", type=float)
@click.option("--timestamp", type=int, default=0)
@click.option("--lat", type=float)
@click.option("--lon", type=float)
@click.option("--fov-h", type=float, default=85.0, show_default=True)
@click.option("--fov-v", type=float, default=68.0, show_default=True)
@click.option("--strategy", default="contextual", show_default=True)
@click.option("--gamma", type=int, default=9, show_default=True)
@click.option("--patch", default="text_only", show_default=True)
@click.option("--background/--no-background", default=True, show_default=True)
@with_provider_options
def ingest(
    archive_dir,
    manifest_path,
    image_path,
    gaze_x,
    gaze_y,
    timestamp,
    lat,
    lon,
    fov_h,
    fov_v,
    strategy,
    gamma,
    patch,
    background,
    mock_fixtures,
    use_remote,
):
    """Encode captures into an archive, from a manifest or a single image."""
    providers = _providers(mock_fixtures, use_remote)
    store = Archive(archive_dir)
    strat = EncodingStrategy.from_name(strategy)
    policy = _parse_policy(patch, background)

    captures: list[CaptureEvent] = []
    if manifest_path:
        loaded = load_manifest(manifest_path)
        for violation in loaded.violations:
            click.echo(f"warning: {violation}", err=True)
        from .harness import ExperimentConfig as _Cfg, capture_from_record

        cfg = _Cfg(fov_h=fov_h, fov_v=fov_v)
        captures = [
            capture_from_record(record, i, cfg)
            for i, record in enumerate(loaded.records)
        ]
    elif image_path:
        if gaze_x is None or gaze_y is None:
            raise click.ClickException("--image needs --gaze-x and --gaze-y")
        data = Path(image_path).read_bytes()
        from PIL import Image

        with Image.open(image_path) as im:
            width, height = im.size
        captures = [
            CaptureEvent(
                capture_id=Path(image_path).stem,
                image_bytes=data,
                gaze=PixelPoint(gaze_x, gaze_y),
                timestamp=timestamp,
                intrinsics=CameraIntrinsics(width, height, fov_h, fov_v),
                gps=(lat, lon) if lat is not None and lon is not None else None,
            )
        ]
    else:
        raise click.ClickException("provide --manifest or --image")

    for capture in captures:
        entry = encode_capture(capture, strat, gamma, policy, providers, store)
        store.put_entry(entry)
        click.echo(f"{capture.capture_id} -> {entry.entry_id}")
    click.echo(f"archive now holds {len(store)} entries")


@main.command()
@click.option("--archive", "archive_dir", required=True, type=click.Path())
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--strategy", required=True)
@click.option("--gamma", type=int, required=True)
@click.option("--patch", "policy_name", default="text_only", show_default=True)
@click.option("--background/--no-background", default=False, show_default=True)
@click.option("--fov-h", type=float, default=85.0, show_default=True)
@click.option("--fov-v", type=float, default=68.0, show_default=True)
@with_provider_options
def encode(
    archive_dir,
    manifest_path,
    strategy,
    gamma,
    policy_name,
    background,
    fov_h,
    fov_v,
    mock_fixtures,
    use_remote,
):
    """Encode a manifest with explicit strategy, detail level, and patch policy."""
    ctx = click.get_current_context()
    ctx.invoke(
        ingest,
        archive_dir=archive_dir,
        manifest_path=manifest_path,
        image_path=None,
        gaze_x=None,
        gaze_y=None,
        timestamp=0,
        lat=None,
        lon=None,
        fov_h=fov_h,
        fov_v=fov_v,
        strategy=strategy,
        gamma=gamma,
        patch=policy_name,
        background=background,
        mock_fixtures=mock_fixtures,
        use_remote=use_remote,
    )


@main.command()
@click.option("--archive", "archive_dir", required=True, type=click.Path(exists=True))
@click.option("--question", required=True)
@click.option("--k", type=int, default=3, show_default=True)
@click.option("--scene/--no-scene", default=False, show_default=True)
@click.option("--metadata/--no-metadata", default=False, show_default=True)
@click.option("--window", nargs=2, type=int, default=None,
              help="Inclusive epoch-second window T0 T1.")
@click.option("--geo", nargs=3, type=float, default=None,
              help="LAT LON RADIUS_M circle filter.")
@click.option("--hybrid", is_flag=True, default=False,
              help="Attach stored patches when regenerating the answer.")
@with_provider_options
def query(
    archive_dir,
    question,
    k,
    scene,
    metadata,
    window,
    geo,
    hybrid,
    mock_fixtures,
    use_remote,
):
    """Ask a recall question against an archive."""
    providers = _providers(mock_fixtures, use_remote)
    store = Archive(archive_dir, create=False)
    index = FlatIndex()
    for entry in store.entries():
        index_entry(entry, IndexVariant.FOCAL_ONLY, providers, index)
        index_entry(entry, IndexVariant.FOCAL_PLUS_SCENE, providers, index)
    flt = ScanFilter(
        t0=window[0] if window else None,
        t1=window[1] if window else None,
        geo=tuple(geo) if geo else None,
    )
    result = answer(
        Query(
            question=question,
            top_k=k,
            use_scene=scene,
            use_metadata=metadata,
            filter=flt,
            answer_mode=AnswerMode.HYBRID if hybrid else AnswerMode.TEXT_ONLY,
        ),
        store,
        index,
        providers,
    )
    click.echo(result.answer)
    for ranked in result.supports:
        click.echo(f"  {ranked.score:.4f}  {ranked.entry_id}")


@main.group()
def eval():
    """Run the experiment grids."""


def _csv_ints(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip())


@eval.command("encode")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--workdir", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--format", "fmt", default="csv", type=click.Choice(["csv", "markdown"]),
              show_default=True)
@click.option("--samples-out", type=click.Path(), default=None)
@click.option("--strategies", default="global,focal,contextual", show_default=True)
@click.option("--gammas", default="3,7,13", show_default=True)
@click.option("--patch", "policy_name", default="text_only", show_default=True)
@click.option("--background/--no-background", default=False, show_default=True)
@click.option("--seed", type=int, default=17, show_default=True)
@with_provider_options
def eval_encode(
    manifest_path,
    workdir,
    out_path,
    fmt,
    samples_out,
    strategies,
    gammas,
    policy_name,
    background,
    seed,
    mock_fixtures,
    use_remote,
):
    """Encoding-strategy grid: accuracy and storage per (strategy, gamma)."""
    providers = _providers(mock_fixtures, use_remote)
    loaded = load_manifest(manifest_path)
    for violation in loaded.violations:
        click.echo(f"warning: {violation}", err=True)
    config = ExperimentConfig(
        strategies=tuple(
            EncodingStrategy.from_name(s) for s in strategies.split(",") if s.strip()
        ),
        gammas=_csv_ints(gammas),
        policies=(_parse_policy(policy_name, background),),
        seed=seed,
    )
    report = run_encoding_experiment(config, loaded.records, providers, workdir)
    emit_report(report, fmt, out_path)
    if samples_out:
        Path(samples_out).write_text(render_samples(report), encoding="utf-8")
    click.echo(f"wrote {out_path}")


@eval.command("retrieve")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--workdir", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--format", "fmt", default="csv", type=click.Choice(["csv", "markdown"]),
              show_default=True)
@click.option("--sizes", default="200,400,600,800,1000", show_default=True)
@click.option("--modes", default="base,scene,metadata,scene_metadata", show_default=True)
@click.option("--gamma", type=int, default=9, show_default=True)
@click.option("--seed", type=int, default=17, show_default=True)
@with_provider_options
def eval_retrieve(
    manifest_path,
    workdir,
    out_path,
    fmt,
    sizes,
    modes,
    gamma,
    seed,
    mock_fixtures,
    use_remote,
):
    """Retrieval scaling: top-1/top-3 hit rates per mode and archive size."""
    providers = _providers(mock_fixtures, use_remote)
    loaded = load_manifest(manifest_path)
    config = ExperimentConfig(
        archive_sizes=_csv_ints(sizes),
        retrieval_modes=tuple(m.strip() for m in modes.split(",") if m.strip()),
        retrieval_gamma=gamma,
        seed=seed,
    )
    report = run_retrieval_experiment(config, loaded.records, providers, workdir)
    emit_report(report, fmt, out_path)
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--archive", "archive_dir", required=True, type=click.Path(exists=True))
def verify(archive_dir):
    """Check journal and blob integrity; exit nonzero on any problem."""
    store = Archive(archive_dir, create=False)
    report = store.verify()
    click.echo(
        f"checked {report.entries_checked} entries, {report.blobs_checked} blobs"
    )
    for problem in report.problems:
        click.echo(f"PROBLEM: {problem}", err=True)
    if not report.ok:
        sys.exit(1)
    click.echo("archive OK")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
def serve(config_path, host, port):
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app

    config = load_config(config_path) if config_path else ServiceConfig()
    app = create_app(config)
    uvicorn.run(
        app,
        host=host if host is not None else config.host,
        port=port if port is not None else config.port,
    )


if __name__ == "__main__":
    main()
