"""Experiment harness: encoding-strategy grids and retrieval scaling runs.

Encoding runs ask each record's question against its own entry and judge
the answer on the three-point scale; retrieval runs sample archives of
increasing size and measure whether each question finds its own entry.
All sampling is seeded; with mock providers every report is
bit-reproducible.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from pathlib import Path

from .archive import Archive, ScanFilter
from .capture import CaptureEvent
from .encoding import (
    EncodingStrategy,
    MemoryEntry,
    PatchPolicy,
    PatchVariant,
    compute_storage_bytes,
    encode_capture,
)
from .geometry import CameraIntrinsics
from .manifest import EvalRecord, image_size, load_image_bytes
from .providers.base import JudgeVerdict, ProviderError, Providers
from .retrieval import FlatIndex, IndexVariant, Query, index_entry, retrieve

RETRIEVAL_MODES = ("base", "scene", "metadata", "scene_metadata")
ARCHIVE_SIZE_SWEEP = (200, 400, 600, 800, 1000)

VERDICT_SCORES = {
    JudgeVerdict.FULL: 1.0,
    JudgeVerdict.PARTIAL: 0.5,
    JudgeVerdict.NONE: 0.0,
}


def verdict_score(verdict: JudgeVerdict) -> float:
    """Three-point scale: full -> 1, partial -> 0.5, none -> 0."""
    return VERDICT_SCORES[verdict]


def score_recall(generated: str, reference: str, judge: Providers) -> float:
    return verdict_score(judge.judge_answer(generated, reference))


@dataclass(frozen=True)
class ExperimentConfig:
    strategies: tuple[EncodingStrategy, ...] = tuple(EncodingStrategy)
    gammas: tuple[int, ...] = (3, 7, 13)
    policies: tuple[PatchPolicy, ...] = (PatchPolicy(),)
    retrieval_modes: tuple[str, ...] = RETRIEVAL_MODES
    archive_sizes: tuple[int, ...] = ARCHIVE_SIZE_SWEEP
    seed: int = 17
    fov_h: float = 85.0
    fov_v: float = 68.0
    # Encoding configuration used for the retrieval experiment.
    retrieval_strategy: EncodingStrategy = EncodingStrategy.CONTEXTUAL
    retrieval_gamma: int = 9
    # Synthetic capture times: records are spaced ``timestamp_spacing_s``
    # apart and the metadata filter asks for +- half of ``metadata_window_s``
    # around the target, so a window usually holds several candidates.
    timestamp_base: int = 1_700_000_000
    timestamp_spacing_s: int = 600
    metadata_window_s: int = 7200

    def __post_init__(self) -> None:
        if not self.strategies or not self.gammas or not self.policies:
            raise ValueError("encoding grid must be non-empty")
        if any(g < 1 for g in self.gammas):
            raise ValueError("every gamma must be >= 1")
        unknown = set(self.retrieval_modes) - set(RETRIEVAL_MODES)
        if unknown:
            raise ValueError(f"unknown retrieval modes: {sorted(unknown)}")


@dataclass(frozen=True)
class EncodingCell:
    strategy: str
    gamma: int
    patch_variant: str
    include_background: bool
    n_encoded: int
    n_scored: int
    n_flagged: int
    mean_accuracy: float
    mean_storage_bytes: float
    total_storage_bytes: int


@dataclass(frozen=True)
class RetrievalCell:
    mode: str
    archive_size: int
    n_queries: int
    n_flagged: int
    top1_accuracy: float
    top3_accuracy: float


@dataclass(frozen=True)
class SampleScore:
    record_id: str
    strategy: str
    gamma: int
    patch_variant: str
    include_background: bool
    score: float
    storage_bytes: int


@dataclass
class MetricsReport:
    kind: str  # "encoding" | "retrieval"
    judge: str
    embedder: str
    encoding_cells: list[EncodingCell] = field(default_factory=list)
    retrieval_cells: list[RetrievalCell] = field(default_factory=list)
    samples: list[SampleScore] = field(default_factory=list)


def capture_from_record(
    record: EvalRecord, index: int, config: ExperimentConfig
) -> CaptureEvent:
    """Materialize a capture from an evaluation record with synthetic time."""
    width, height = image_size(record)
    return CaptureEvent(
        capture_id=record.record_id,
        image_bytes=load_image_bytes(record),
        gaze=record.gaze,
        timestamp=config.timestamp_base + index * config.timestamp_spacing_s,
        intrinsics=CameraIntrinsics(width, height, config.fov_h, config.fov_v),
    )


def run_encoding_experiment(
    config: ExperimentConfig,
    records: list[EvalRecord],
    providers: Providers,
    workdir: str | Path,
) -> MetricsReport:
    """Encode every record per grid cell, QA it against its own entry, score."""
    workdir = Path(workdir)
    report = MetricsReport(
        kind="encoding",
        judge=type(providers).__name__,
        embedder=type(providers).__name__,
    )
    for strategy in config.strategies:
        for gamma in config.gammas:
            for policy in config.policies:
                cell_dir = workdir / (
                    f"{strategy.value}_g{gamma}_{policy.variant.value}"
                    f"{'_bg' if policy.include_background else ''}"
                )
                archive = Archive(cell_dir)
                scores: list[float] = []
                storages: list[int] = []
                flagged = 0
                for i, record in enumerate(records):
                    capture = capture_from_record(record, i, config)
                    try:
                        entry = encode_capture(
                            capture, strategy, gamma, policy, providers, archive
                        )
                    except ProviderError:
                        flagged += 1
                        continue
                    archive.put_entry(entry)
                    storage = compute_storage_bytes(entry, archive)
                    storages.append(storage)
                    try:
                        generated = providers.synthesize_answer(
                            record.question, [entry]
                        )
                        score = score_recall(generated, record.answer, providers)
                    except ProviderError:
                        flagged += 1
                        continue
                    scores.append(score)
                    report.samples.append(
                        SampleScore(
                            record_id=record.record_id,
                            strategy=strategy.value,
                            gamma=gamma,
                            patch_variant=policy.variant.value,
                            include_background=policy.include_background,
                            score=score,
                            storage_bytes=storage,
                        )
                    )
                report.encoding_cells.append(
                    EncodingCell(
                        strategy=strategy.value,
                        gamma=gamma,
                        patch_variant=policy.variant.value,
                        include_background=policy.include_background,
                        n_encoded=len(storages),
                        n_scored=len(scores),
                        n_flagged=flagged,
                        mean_accuracy=sum(scores) / len(scores) if scores else 0.0,
                        mean_storage_bytes=(
                            sum(storages) / len(storages) if storages else 0.0
                        ),
                        total_storage_bytes=sum(storages),
                    )
                )
    return report


_MODE_FLAGS = {  # mode -> (use_scene, use_metadata)
    "base": (False, False),
    "scene": (True, False),
    "metadata": (False, True),
    "scene_metadata": (True, True),
}


def _mode_flags(mode: str) -> tuple[bool, bool]:
    return _MODE_FLAGS[mode]


def run_retrieval_experiment(
    config: ExperimentConfig,
    records: list[EvalRecord],
    providers: Providers,
    workdir: str | Path,
) -> MetricsReport:
    """Sampled-archive retrieval: does each question find its own entry?"""
    workdir = Path(workdir)
    report = MetricsReport(
        kind="retrieval",
        judge=type(providers).__name__,
        embedder=type(providers).__name__,
    )
    policy = PatchPolicy(variant=PatchVariant.TEXT_ONLY, include_background=True)
    for n in config.archive_sizes:
        if n > len(records):
            raise ValueError(
                f"archive size {n} exceeds the {len(records)}-record manifest"
            )
        rng = random.Random(f"{config.seed}:{n}")
        sampled = rng.sample(records, n)
        archive = Archive(workdir / f"n{n}")
        index = FlatIndex()
        entry_by_record: dict[str, MemoryEntry] = {}
        flagged_encode = 0
        for i, record in enumerate(sampled):
            capture = capture_from_record(record, i, config)
            try:
                entry = encode_capture(
                    capture,
                    config.retrieval_strategy,
                    config.retrieval_gamma,
                    policy,
                    providers,
                    archive,
                )
            except ProviderError:
                flagged_encode += 1
                continue
            archive.put_entry(entry)
            entry_by_record[record.record_id] = entry
            index_entry(entry, IndexVariant.FOCAL_ONLY, providers, index)
            index_entry(entry, IndexVariant.FOCAL_PLUS_SCENE, providers, index)
        for mode in config.retrieval_modes:
            use_scene, use_metadata = _mode_flags(mode)
            top1 = top3 = asked = 0
            flagged = flagged_encode
            for record in sampled:
                entry = entry_by_record.get(record.record_id)
                if entry is None:
                    continue
                flt = None
                if use_metadata:
                    half = config.metadata_window_s // 2
                    flt = ScanFilter(
                        t0=entry.timestamp - half, t1=entry.timestamp + half
                    )
                try:
                    ranked = retrieve(
                        Query(
                            question=record.question,
                            top_k=3,
                            use_scene=use_scene,
                            use_metadata=use_metadata,
                            filter=flt,
                        ),
                        archive,
                        index,
                        providers,
                    )
                except ProviderError:
                    flagged += 1
                    continue
                asked += 1
                hits = [r.entry_id for r in ranked]
                if hits and hits[0] == entry.entry_id:
                    top1 += 1
                if entry.entry_id in hits[:3]:
                    top3 += 1
            report.retrieval_cells.append(
                RetrievalCell(
                    mode=mode,
                    archive_size=n,
                    n_queries=asked,
                    n_flagged=flagged,
                    top1_accuracy=top1 / asked if asked else 0.0,
                    top3_accuracy=top3 / asked if asked else 0.0,
                )
            )
    return report


# -- report emission -----------------------------------------------------------

ENCODING_HEADER = [
    "strategy",
    "gamma",
    "patch_variant",
    "include_background",
    "n_encoded",
    "n_scored",
    "n_flagged",
    "mean_accuracy",
    "mean_storage_bytes",
    "total_storage_bytes",
]
RETRIEVAL_HEADER = [
    "mode",
    "archive_size",
    "n_queries",
    "n_flagged",
    "top1_accuracy",
    "top3_accuracy",
]
SAMPLES_HEADER = [
    "record_id",
    "strategy",
    "gamma",
    "patch_variant",
    "include_background",
    "score",
    "storage_bytes",
]


def _encoding_rows(report: MetricsReport) -> list[list[str]]:
    return [
        [
            c.strategy,
            str(c.gamma),
            c.patch_variant,
            str(c.include_background).lower(),
            str(c.n_encoded),
            str(c.n_scored),
            str(c.n_flagged),
            f"{c.mean_accuracy:.4f}",
            f"{c.mean_storage_bytes:.2f}",
            str(c.total_storage_bytes),
        ]
        for c in report.encoding_cells
    ]


def _retrieval_rows(report: MetricsReport) -> list[list[str]]:
    return [
        [
            c.mode,
            str(c.archive_size),
            str(c.n_queries),
            str(c.n_flagged),
            f"{c.top1_accuracy:.4f}",
            f"{c.top3_accuracy:.4f}",
        ]
        for c in report.retrieval_cells
    ]


def render_report(report: MetricsReport, fmt: str = "csv") -> str:
    """Render the report deterministically; re-rendering is byte-identical."""
    if report.kind == "encoding":
        header, rows = ENCODING_HEADER, _encoding_rows(report)
    elif report.kind == "retrieval":
        header, rows = RETRIEVAL_HEADER, _retrieval_rows(report)
    else:
        raise ValueError(f"unknown report kind {report.kind!r}")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt == "markdown":
        lines = [
            "| " + " | ".join(header) + " |",
            "| " + " | ".join("---" for _ in header) + " |",
        ]
        lines += ["| " + " | ".join(row) + " |" for row in rows]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}; expected csv or markdown")


def render_samples(report: MetricsReport) -> str:
    """Per-sample scores as CSV, for external statistical tooling."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SAMPLES_HEADER)
    for s in report.samples:
        writer.writerow(
            [
                s.record_id,
                s.strategy,
                str(s.gamma),
                s.patch_variant,
                str(s.include_background).lower(),
                f"{s.score:.1f}",
                str(s.storage_bytes),
            ]
        )
    return buf.getvalue()


def emit_report(report: MetricsReport, fmt: str, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_report(report, fmt), encoding="utf-8")
    return path
