"""Request and response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..encoding import MemoryEntry
from ..retrieval import RankedEntry, RecallAnswer


class BoxModel(BaseModel):
    x: int
    y: int
    w: int
    h: int

    @classmethod
    def from_box(cls, box) -> "BoxModel":
        return cls(x=box.x, y=box.y, w=box.w, h=box.h)


class BlobRefModel(BaseModel):
    sha256: str
    length: int
    media_type: str


class ProvenanceModel(BaseModel):
    strategy: str
    gamma: int
    patch_variant: str
    include_background: bool
    degraded: bool


class EntryModel(BaseModel):
    entry_id: str
    capture_id: str
    focal_description: str
    background_summary: str | None
    timestamp: int
    gps: tuple[float, float] | None
    image_size: tuple[int, int]
    ctx_blob: BlobRefModel | None
    lq_blob: BlobRefModel | None
    focal: BoxModel
    contextual: BoxModel
    proposals: list[BoxModel]
    provenance: ProvenanceModel

    @classmethod
    def from_entry(cls, entry: MemoryEntry) -> "EntryModel":
        prov = entry.provenance
        return cls(
            entry_id=entry.entry_id,
            capture_id=entry.capture_id,
            focal_description=entry.focal_description,
            background_summary=entry.background_summary,
            timestamp=entry.timestamp,
            gps=entry.gps,
            image_size=entry.image_size,
            ctx_blob=BlobRefModel(**entry.ctx_blob.to_record()) if entry.ctx_blob else None,
            lq_blob=BlobRefModel(**entry.lq_blob.to_record()) if entry.lq_blob else None,
            focal=BoxModel.from_box(entry.boxes.focal),
            contextual=BoxModel.from_box(entry.boxes.contextual),
            proposals=[BoxModel.from_box(b) for b in entry.boxes.proposals],
            provenance=ProvenanceModel(
                strategy=prov.strategy.value,
                gamma=prov.gamma,
                patch_variant=prov.policy.variant.value,
                include_background=prov.policy.include_background,
                degraded=prov.degraded,
            ),
        )


class CaptureResponse(BaseModel):
    entry_id: str
    focal: BoxModel
    contextual: BoxModel
    degraded: bool


class EntriesPage(BaseModel):
    items: list[EntryModel]
    total: int
    offset: int
    limit: int


class QueryRequest(BaseModel):
    question: str = Field(min_length=1)
    top_k: int = Field(default=3, ge=1)
    use_scene: bool = False
    use_metadata: bool = False
    answer_mode: str = "text_only"
    t0: int | None = None
    t1: int | None = None
    lat: float | None = None
    lon: float | None = None
    radius_m: float | None = None
    strategy: str | None = None
    gamma: int | None = None


class SupportModel(BaseModel):
    entry_id: str
    score: float

    @classmethod
    def from_ranked(cls, ranked: RankedEntry) -> "SupportModel":
        return cls(entry_id=ranked.entry_id, score=ranked.score)


class AnswerResponse(BaseModel):
    answer: str
    mode: str
    supports: list[SupportModel]
    patch_hashes: list[str]

    @classmethod
    def from_answer(cls, result: RecallAnswer) -> "AnswerResponse":
        return cls(
            answer=result.answer,
            mode=result.mode.value,
            supports=[SupportModel.from_ranked(r) for r in result.supports],
            patch_hashes=list(result.patch_hashes),
        )


class HealthResponse(BaseModel):
    status: str
    entries: int
    provider: str
    provider_reachable: bool


class VerifyResponse(BaseModel):
    ok: bool
    entries_checked: int
    blobs_checked: int
    problems: list[str]
