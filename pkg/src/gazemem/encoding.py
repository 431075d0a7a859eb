"""Region-specific memory encoding and storage accounting.

Turns a capture into a persisted memory entry: a focal description capped
at ``gamma`` sentences, an optional two-sentence background summary, and
optional JPEG patches per the hybrid storage policy.
"""

from __future__ import annotations

import enum
import hashlib
import io
import json
import re
from dataclasses import dataclass, replace
from typing import Protocol

from PIL import Image

from .capture import CaptureEvent
from .geometry import (
    BoundingBox,
    FovealParams,
    PartitionResult,
    locate_focal_region,
    partition,
)
from .providers.base import Providers

DETAIL_SWEEP = (3, 5, 7, 9, 11, 13)
BACKGROUND_SENTENCE_BUDGET = 2
CTX_PATCH_JPEG_QUALITY = 85
LQ_GLOBAL_JPEG_QUALITY = 50
LQ_GLOBAL_MAX_SIDE = 512

JPEG_MEDIA_TYPE = "image/jpeg"


class EncodingError(Exception):
    """Encoding this capture failed for a non-provider reason."""


class EncodingStrategy(enum.Enum):
    """What region evidence feeds the focal description."""

    GLOBAL = "global"  # full image, gaze ignored
    FOCAL = "focal"  # fixation-centered box only
    CONTEXTUAL = "contextual"  # fixation box plus expanded context box

    @classmethod
    def from_name(cls, name: str) -> "EncodingStrategy":
        try:
            return cls(name.strip().casefold())
        except ValueError:
            raise ValueError(
                f"unknown strategy {name!r}; expected one of "
                f"{[s.value for s in cls]}"
            ) from None


class PatchVariant(enum.Enum):
    TEXT_ONLY = "text_only"
    CTX_PATCH = "ctx_patch"
    LOW_GLOBAL = "low_global"
    CTX_AND_LOW_GLOBAL = "ctx_and_low_global"

    @classmethod
    def from_name(cls, name: str) -> "PatchVariant":
        try:
            return cls(name.strip().casefold())
        except ValueError:
            raise ValueError(
                f"unknown patch variant {name!r}; expected one of "
                f"{[v.value for v in cls]}"
            ) from None

    @property
    def wants_ctx(self) -> bool:
        return self in (PatchVariant.CTX_PATCH, PatchVariant.CTX_AND_LOW_GLOBAL)

    @property
    def wants_lq(self) -> bool:
        return self in (PatchVariant.LOW_GLOBAL, PatchVariant.CTX_AND_LOW_GLOBAL)


@dataclass(frozen=True)
class PatchPolicy:
    """Which image patches to keep and whether to store a background summary."""

    variant: PatchVariant = PatchVariant.TEXT_ONLY
    include_background: bool = False


@dataclass(frozen=True)
class BlobRef:
    """Pointer to a content-addressed blob."""

    sha256: str
    length: int
    media_type: str = JPEG_MEDIA_TYPE

    def to_record(self) -> dict:
        return {"sha256": self.sha256, "length": self.length, "media_type": self.media_type}

    @classmethod
    def from_record(cls, record: dict) -> "BlobRef":
        return cls(
            sha256=record["sha256"],
            length=int(record["length"]),
            media_type=record.get("media_type", JPEG_MEDIA_TYPE),
        )


class BlobSink(Protocol):
    def put_blob(self, data: bytes, media_type: str = JPEG_MEDIA_TYPE) -> BlobRef: ...


@dataclass(frozen=True)
class Provenance:
    strategy: EncodingStrategy
    gamma: int
    policy: PatchPolicy
    degraded: bool = False


@dataclass(frozen=True)
class MemoryEntry:
    """One persisted memory. ``entry_id`` is a content hash, stable across runs."""

    entry_id: str
    capture_id: str
    focal_description: str
    background_summary: str | None
    timestamp: int
    gps: tuple[float, float] | None
    ctx_blob: BlobRef | None
    lq_blob: BlobRef | None
    boxes: PartitionResult
    provenance: Provenance
    image_size: tuple[int, int] = (0, 0)  # source frame (width, height)

    def describe_for_prompt(self) -> str:
        parts = [f"at t={self.timestamp}"]
        if self.gps is not None:
            parts.append(f"near ({self.gps[0]:.5f}, {self.gps[1]:.5f})")
        text = self.focal_description
        if self.background_summary:
            text += " Scene: " + self.background_summary
        return f"({', '.join(parts)}) {text}"

    def to_record(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "capture_id": self.capture_id,
            "focal_description": self.focal_description,
            "background_summary": self.background_summary,
            "timestamp": self.timestamp,
            "gps": list(self.gps) if self.gps is not None else None,
            "image_size": list(self.image_size),
            "ctx_blob": self.ctx_blob.to_record() if self.ctx_blob else None,
            "lq_blob": self.lq_blob.to_record() if self.lq_blob else None,
            "boxes": {
                "focal": list(self.boxes.focal.as_tuple()),
                "contextual": list(self.boxes.contextual.as_tuple()),
                "proposals": [list(b.as_tuple()) for b in self.boxes.proposals],
            },
            "provenance": {
                "strategy": self.provenance.strategy.value,
                "gamma": self.provenance.gamma,
                "patch_variant": self.provenance.policy.variant.value,
                "include_background": self.provenance.policy.include_background,
                "degraded": self.provenance.degraded,
            },
        }

    @classmethod
    def from_record(cls, record: dict) -> "MemoryEntry":
        prov = record["provenance"]
        boxes = record["boxes"]
        gps = record.get("gps")
        size = record.get("image_size", (0, 0))
        return cls(
            entry_id=record["entry_id"],
            capture_id=record["capture_id"],
            focal_description=record["focal_description"],
            background_summary=record.get("background_summary"),
            timestamp=int(record["timestamp"]),
            gps=(float(gps[0]), float(gps[1])) if gps is not None else None,
            image_size=(int(size[0]), int(size[1])),
            ctx_blob=BlobRef.from_record(record["ctx_blob"]) if record.get("ctx_blob") else None,
            lq_blob=BlobRef.from_record(record["lq_blob"]) if record.get("lq_blob") else None,
            boxes=PartitionResult(
                focal=BoundingBox.from_tuple(boxes["focal"]),
                contextual=BoundingBox.from_tuple(boxes["contextual"]),
                proposals=tuple(BoundingBox.from_tuple(b) for b in boxes["proposals"]),
                degraded=bool(prov["degraded"]),
            ),
            provenance=Provenance(
                strategy=EncodingStrategy(prov["strategy"]),
                gamma=int(prov["gamma"]),
                policy=PatchPolicy(
                    variant=PatchVariant(prov["patch_variant"]),
                    include_background=bool(prov["include_background"]),
                ),
                degraded=bool(prov["degraded"]),
            ),
        )


def canonical_json(value) -> str:
    """One-line JSON with sorted keys; the archive journal line format."""
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def compute_entry_id(record: dict) -> str:
    """Content hash over the canonical serialization, id field excluded."""
    body = {k: v for k, v in record.items() if k != "entry_id"}
    return hashlib.sha256(canonical_json(body).encode()).hexdigest()


# -- sentence budgeting -------------------------------------------------------

_SENTENCE_END_RE = re.compile(r"[.!?]+(?=\s|$)")


def _sentence_spans(text: str) -> list[tuple[int, int]]:
    spans: list[tuple[int, int]] = []
    start = 0
    for match in _SENTENCE_END_RE.finditer(text):
        spans.append((start, match.end()))
        start = match.end()
    if text[start:].strip():
        spans.append((start, len(text)))
    return spans


def count_sentences(text: str) -> int:
    return len(_sentence_spans(text))


def enforce_sentence_budget(text: str, gamma: int) -> str:
    """Keep at most ``gamma`` leading sentences; the text is otherwise untouched.

    A sentence ends at terminal punctuation (. ! ?) followed by whitespace
    or end-of-text, so decimals like "3.50" do not split.
    """
    if gamma < 1:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    spans = _sentence_spans(text)
    if len(spans) <= gamma:
        return text
    return text[: spans[gamma - 1][1]]


# -- image patches ------------------------------------------------------------

def make_ctx_patch(image: Image.Image, contextual: BoundingBox) -> bytes:
    """Native-resolution JPEG crop of the contextual box."""
    if contextual.right > image.width or contextual.bottom > image.height:
        raise ValueError("contextual box exceeds image bounds")
    crop = image.crop((contextual.x, contextual.y, contextual.right, contextual.bottom))
    buf = io.BytesIO()
    crop.convert("RGB").save(buf, format="JPEG", quality=CTX_PATCH_JPEG_QUALITY)
    return buf.getvalue()


def make_lq_global(image: Image.Image) -> bytes:
    """Whole image downscaled so the longest side is 512 px (never upscaled)."""
    width, height = image.size
    longest = max(width, height)
    if longest > LQ_GLOBAL_MAX_SIDE:
        scale = LQ_GLOBAL_MAX_SIDE / longest
        size = (max(1, round(width * scale)), max(1, round(height * scale)))
        image = image.resize(size, Image.LANCZOS)
    buf = io.BytesIO()
    image.convert("RGB").save(buf, format="JPEG", quality=LQ_GLOBAL_JPEG_QUALITY)
    return buf.getvalue()


# -- entry assembly ------------------------------------------------------------

def encode_capture(
    capture: CaptureEvent,
    strategy: EncodingStrategy,
    gamma: int,
    policy: PatchPolicy,
    providers: Providers,
    blob_sink: BlobSink,
    foveal: FovealParams = FovealParams(),
) -> MemoryEntry:
    """Run partition -> describe -> patch -> assemble for one capture.

    A region-proposal failure degrades the contextual box to the focal box
    (flagged in provenance); a focal-description failure is fatal for the
    capture and propagates.
    """
    if gamma < 1:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    image = capture.decode_image()
    intrinsics = capture.intrinsics

    if strategy is EncodingStrategy.CONTEXTUAL:
        boxes = partition(capture, providers, foveal)
    else:
        gaze = capture.gaze.clamped(intrinsics.width, intrinsics.height)
        focal = locate_focal_region(gaze, intrinsics, foveal)
        boxes = PartitionResult(focal=focal, contextual=focal)

    if strategy is EncodingStrategy.GLOBAL:
        describe_focal_box = describe_ctx_box = intrinsics.full_box
    elif strategy is EncodingStrategy.FOCAL:
        describe_focal_box = describe_ctx_box = boxes.focal
    else:
        describe_focal_box, describe_ctx_box = boxes.focal, boxes.contextual

    focal_text = enforce_sentence_budget(
        providers.describe_focal(capture.image_bytes, describe_focal_box, describe_ctx_box, gamma),
        gamma,
    )
    if not focal_text.strip():
        raise EncodingError(f"capture {capture.capture_id}: empty focal description")

    background = None
    if policy.include_background:
        background = enforce_sentence_budget(
            providers.summarize_background(capture.image_bytes),
            BACKGROUND_SENTENCE_BUDGET,
        )

    ctx_ref = lq_ref = None
    if policy.variant.wants_ctx:
        ctx_ref = blob_sink.put_blob(make_ctx_patch(image, boxes.contextual))
    if policy.variant.wants_lq:
        lq_ref = blob_sink.put_blob(make_lq_global(image))

    entry = MemoryEntry(
        entry_id="",
        capture_id=capture.capture_id,
        focal_description=focal_text,
        background_summary=background,
        timestamp=capture.timestamp,
        gps=capture.gps,
        ctx_blob=ctx_ref,
        lq_blob=lq_ref,
        boxes=boxes,
        provenance=Provenance(
            strategy=strategy, gamma=gamma, policy=policy, degraded=boxes.degraded
        ),
        image_size=(intrinsics.width, intrinsics.height),
    )
    return replace(entry, entry_id=compute_entry_id(entry.to_record()))


def compute_storage_bytes(entry: MemoryEntry, blob_store) -> int:
    """The storage metric: UTF-8 description bytes plus on-disk patch bytes.

    Metadata (timestamp, GPS, ids, boxes) is excluded by definition.
    ``blob_store`` must expose ``blob_size(ref)``; a dangling ref raises.
    """
    total = len(entry.focal_description.encode("utf-8"))
    if entry.background_summary is not None:
        total += len(entry.background_summary.encode("utf-8"))
    for ref in (entry.ctx_blob, entry.lq_blob):
        if ref is not None:
            total += blob_store.blob_size(ref)
    return total
