"""Provider contracts shared by the remote client and the offline mocks."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Protocol, Sequence, runtime_checkable

import numpy as np

if TYPE_CHECKING:
    from ..encoding import MemoryEntry
    from ..geometry import BoundingBox


class ProviderError(Exception):
    """Base class for model-provider failures."""


class ProviderTransportError(ProviderError):
    """Request never produced a usable response (network, timeout, 5xx)."""


class ProviderParseError(ProviderError):
    """The model responded, but not in the documented grammar."""


class JudgeVerdict(enum.Enum):
    FULL = "full"
    PARTIAL = "partial"
    NONE = "none"


@dataclass(frozen=True)
class ProviderConfig:
    """Remote endpoint settings. Sampling is pinned to temperature 0."""

    endpoint: str
    model: str
    embed_model: str = ""
    temperature: float = 0.0
    timeout_s: float = 60.0
    max_retries: int = 2
    max_parallel: int = 4

    def __post_init__(self) -> None:
        if self.temperature != 0.0:
            raise ValueError("temperature is pinned to 0 for reproducible evaluation")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.max_parallel < 1:
            raise ValueError("max_parallel must be >= 1")


_NORMALIZE_RE = re.compile(r"[^\w\s]+", re.UNICODE)


def normalize_answer(text: str) -> str:
    """Case-fold, strip punctuation, collapse whitespace."""
    return " ".join(_NORMALIZE_RE.sub(" ", text.casefold()).split())


def judge_short_circuit(generated: str, reference: str) -> JudgeVerdict | None:
    """FULL when the answers match after normalization; else defer to a model."""
    if normalize_answer(generated) == normalize_answer(reference):
        return JudgeVerdict.FULL
    return None


@runtime_checkable
class Providers(Protocol):
    """Uniform interface over every model-backed operation."""

    def propose_memory_targets(
        self, image_bytes: bytes, focal: "BoundingBox"
    ) -> list["BoundingBox"]: ...

    def describe_focal(
        self,
        image_bytes: bytes,
        focal: "BoundingBox",
        contextual: "BoundingBox",
        gamma: int,
    ) -> str: ...

    def summarize_background(self, image_bytes: bytes) -> str: ...

    def synthesize_answer(
        self,
        question: str,
        entries: Sequence["MemoryEntry"],
        images: Sequence[bytes] | None = None,
    ) -> str: ...

    def judge_answer(self, generated: str, reference: str) -> JudgeVerdict: ...

    def embed(self, text: str) -> np.ndarray: ...
