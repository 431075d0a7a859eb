"""Question-driven retrieval: flat cosine index, metadata pre-filter, answers.

The index is exhaustive and exact (no approximate structure): at the
archive scales this system targets, a brute-force scan over unit
vectors is fast and its behavior can be checked against an independent
oracle to the last tie-break.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from .archive import Archive, ScanFilter
from .encoding import MemoryEntry
from .providers.base import Providers

logger = logging.getLogger(__name__)

NO_MEMORY_FOUND = "no memory found"


class IndexVariant(enum.Enum):
    FOCAL_ONLY = "focal_only"
    FOCAL_PLUS_SCENE = "focal_plus_scene"


class AnswerMode(enum.Enum):
    TEXT_ONLY = "text_only"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class IndexRecord:
    entry_id: str
    vector: np.ndarray  # unit-normalized
    variant: IndexVariant


@dataclass(frozen=True)
class RankedEntry:
    entry_id: str
    score: float


@dataclass(frozen=True)
class Query:
    question: str
    top_k: int = 3
    use_scene: bool = False
    use_metadata: bool = False
    filter: ScanFilter | None = None  # consulted only when use_metadata is set
    answer_mode: AnswerMode = AnswerMode.TEXT_ONLY

    def __post_init__(self) -> None:
        if not self.question.strip():
            raise ValueError("query question must be non-empty")
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")


@dataclass(frozen=True)
class RecallAnswer:
    answer: str
    supports: tuple[RankedEntry, ...]
    mode: AnswerMode
    patch_hashes: tuple[str, ...] = ()


def _unit(vector: np.ndarray) -> np.ndarray:
    v = np.asarray(vector, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    return v / norm if norm > 0 else v


def index_text(entry: MemoryEntry, variant: IndexVariant) -> str:
    """The text embedded for an entry under a variant.

    The scene variant concatenates the focal description with the
    background summary; entries without a summary fall back to the focal
    text alone.
    """
    if variant is IndexVariant.FOCAL_PLUS_SCENE:
        if entry.background_summary:
            return entry.focal_description + "\n" + entry.background_summary
        logger.warning(
            "entry %s has no background summary; scene variant falls back to "
            "the focal description",
            entry.entry_id,
        )
    return entry.focal_description


class FlatIndex:
    """Exhaustive cosine index; one record per (entry, variant)."""

    def __init__(self) -> None:
        self._records: dict[tuple[str, IndexVariant], IndexRecord] = {}
        self._dim: int | None = None

    def __len__(self) -> int:
        return len(self._records)

    def records(self, variant: IndexVariant) -> list[IndexRecord]:
        return [r for r in self._records.values() if r.variant is variant]

    def get(self, entry_id: str, variant: IndexVariant) -> IndexRecord | None:
        return self._records.get((entry_id, variant))

    def add(self, record: IndexRecord) -> None:
        dim = int(record.vector.size)
        if self._dim is None:
            self._dim = dim
        elif dim != self._dim:
            raise ValueError(f"embedding dimension {dim} != index dimension {self._dim}")
        self._records[(record.entry_id, record.variant)] = record


def index_entry(
    entry: MemoryEntry,
    variant: IndexVariant,
    embedder: Providers,
    index: FlatIndex,
) -> IndexRecord:
    """Embed the entry's text for a variant and store it (replacing any old record)."""
    vector = _unit(embedder.embed(index_text(entry, variant)))
    record = IndexRecord(entry_id=entry.entry_id, vector=vector, variant=variant)
    index.add(record)
    return record


def rank(
    question: str,
    candidates: set[str] | None,
    k: int,
    embedder: Providers,
    index: FlatIndex,
    variant: IndexVariant = IndexVariant.FOCAL_ONLY,
) -> list[RankedEntry]:
    """Top-k candidates by cosine similarity; ties broken by ascending entry id.

    ``candidates=None`` ranks over every indexed entry. An empty index (or
    empty candidate set) yields an empty result, not an error.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    records = index.records(variant)
    if candidates is not None:
        records = [r for r in records if r.entry_id in candidates]
    if not records:
        return []
    query_vec = _unit(embedder.embed(question))
    scored = [
        RankedEntry(entry_id=r.entry_id, score=float(query_vec @ r.vector))
        for r in records
    ]
    scored.sort(key=lambda r: (-r.score, r.entry_id))
    return scored[:k]


def retrieve(
    query: Query,
    store: Archive,
    index: FlatIndex,
    embedder: Providers,
) -> list[RankedEntry]:
    """Metadata pre-filter (when enabled) followed by similarity ranking."""
    if query.use_metadata:
        candidates = {e.entry_id for e in store.scan(query.filter)}
    else:
        candidates = None
    variant = (
        IndexVariant.FOCAL_PLUS_SCENE if query.use_scene else IndexVariant.FOCAL_ONLY
    )
    return rank(query.question, candidates, query.top_k, embedder, index, variant)


def collect_patches(entries: list[MemoryEntry], store: Archive) -> tuple[list[str], list[bytes]]:
    """Blob hashes and bytes for the patches carried by the given entries."""
    hashes: list[str] = []
    blobs: list[bytes] = []
    for entry in entries:
        for ref in (entry.ctx_blob, entry.lq_blob):
            if ref is not None:
                hashes.append(ref.sha256)
                blobs.append(store.get_blob(ref))
    return hashes, blobs


def answer(
    query: Query,
    store: Archive,
    index: FlatIndex,
    providers: Providers,
) -> RecallAnswer:
    """Synthesize a grounded answer from the top-ranked entries.

    Hybrid mode reuses the same ranking and only changes the answer stage,
    attaching the ranked entries' stored patches to the synthesis request.
    """
    ranked = retrieve(query, store, index, providers)
    if not ranked:
        return RecallAnswer(
            answer=NO_MEMORY_FOUND, supports=(), mode=query.answer_mode
        )
    entries = [store.get_entry(r.entry_id) for r in ranked]
    images: list[bytes] | None = None
    patch_hashes: tuple[str, ...] = ()
    if query.answer_mode is AnswerMode.HYBRID:
        hashes, blobs = collect_patches(entries, store)
        patch_hashes = tuple(hashes)
        images = blobs or None
    text = providers.synthesize_answer(query.question, entries, images)
    return RecallAnswer(
        answer=text,
        supports=tuple(ranked),
        mode=query.answer_mode,
        patch_hashes=patch_hashes,
    )
