"""gazemem: gaze-guided visual memory archiving and natural-language recall."""

from .archive import Archive, ScanFilter, haversine_m
from .capture import CaptureEvent, UndecodableImageError
from .encoding import (
    BlobRef,
    DETAIL_SWEEP,
    EncodingStrategy,
    MemoryEntry,
    PatchPolicy,
    PatchVariant,
    Provenance,
    compute_storage_bytes,
    encode_capture,
    enforce_sentence_budget,
)
from .geometry import (
    BoundingBox,
    CameraIntrinsics,
    FovealParams,
    PartitionResult,
    PixelPoint,
    enclose,
    locate_focal_region,
    partition,
    sanitize_proposals,
)
from .manifest import EvalRecord, load_manifest, save_manifest
from .providers import JudgeVerdict, MockProviders, RemoteProviders
from .retrieval import (
    AnswerMode,
    FlatIndex,
    IndexVariant,
    Query,
    RankedEntry,
    RecallAnswer,
    answer,
    index_entry,
    rank,
    retrieve,
)

__version__ = "0.1.0"
