"""Deterministic offline providers.

Outputs come from an optional fixture table (JSONL, one record per
(prompt kind, key)); anything not in the table is synthesized purely from
hashes of the inputs, so identical inputs give identical outputs across
process restarts.
"""

from __future__ import annotations

import hashlib
import io
import json
import re
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image

from ..geometry import BoundingBox
from .base import (
    JudgeVerdict,
    ProviderParseError,
    judge_short_circuit,
)
from .parsing import boxes_from_payload
from .prompts import PromptKind

MOCK_EMBED_DIM = 256

UNREADABLE_REGION_TEXT = "unreadable region."
EMPTY_SCENE_TEXT = "empty scene."

_KEY_SEP = "\x1f"
_TOKEN_RE = re.compile(r"\w+", re.UNICODE)


def mock_image_key(image_bytes: bytes) -> str:
    """Key under which image-bound fixtures are looked up."""
    return hashlib.sha256(image_bytes).hexdigest()[:16]


def mock_answer_key(question: str, entry_id: str) -> str:
    return question + _KEY_SEP + entry_id


def mock_judge_key(generated: str, reference: str) -> str:
    return generated + _KEY_SEP + reference


def load_fixtures(path: str | Path) -> dict[tuple[str, str], object]:
    """Read a JSONL fixture table of {kind, key, output} records."""
    table: dict[tuple[str, str], object] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                table[(record["kind"], record["key"])] = record["output"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad fixture record: {exc}") from exc
    return table


def _digest_floats(seed: str, count: int) -> np.ndarray:
    """Deterministic floats in [-1, 1) derived from repeated hashing."""
    out = np.empty(count, dtype=np.float64)
    filled = 0
    block = 0
    while filled < count:
        digest = hashlib.sha256(f"{seed}:{block}".encode()).digest()
        for i in range(0, len(digest) - 1, 2):
            if filled >= count:
                break
            out[filled] = int.from_bytes(digest[i : i + 2], "big") / 32768.0 - 1.0
            filled += 1
        block += 1
    return out


def hash_embedding(text: str, dim: int = MOCK_EMBED_DIM) -> np.ndarray:
    """Bag-of-token hash embedding: shared tokens make texts similar."""
    tokens = _TOKEN_RE.findall(text.casefold())
    if not tokens:
        tokens = [text]
    vec = np.zeros(dim, dtype=np.float64)
    for token in tokens:
        vec += _digest_floats("tok:" + token, dim)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:  # astronomically unlikely; keep the non-zero-norm contract
        vec = _digest_floats("txt:" + text, dim)
        norm = float(np.linalg.norm(vec))
    return vec / norm


def _crop_is_blank(image_bytes: bytes, box: BoundingBox | None) -> bool:
    try:
        image = Image.open(io.BytesIO(image_bytes))
        image.load()
    except OSError:
        return False
    if box is not None:
        image = image.crop((box.x, box.y, box.right, box.bottom))
    extrema = image.getextrema()
    if isinstance(extrema[0], tuple):
        return all(lo == hi for lo, hi in extrema)
    lo, hi = extrema
    return lo == hi


class MockProviders:
    """Bit-deterministic provider set for offline tests and demos."""

    embed_dim = MOCK_EMBED_DIM

    def __init__(self, fixtures: dict[tuple[str, str], object] | None = None):
        self._fixtures = dict(fixtures or {})

    @classmethod
    def from_fixture_file(cls, path: str | Path) -> "MockProviders":
        return cls(load_fixtures(path))

    def _lookup(self, kind: PromptKind, key: str):
        return self._fixtures.get((kind.value, key))

    # -- region proposal ---------------------------------------------------

    def propose_memory_targets(
        self, image_bytes: bytes, focal: BoundingBox
    ) -> list[BoundingBox]:
        canned = self._lookup(PromptKind.REGION_PROPOSE, mock_image_key(image_bytes))
        if canned is not None:
            return boxes_from_payload(canned)
        # Fallback: one synthetic target overlapping the focal box, with
        # hash-derived margins so the contextual box genuinely expands.
        seed = f"propose:{mock_image_key(image_bytes)}:{focal.as_tuple()}"
        m = _digest_floats(seed, 4)
        pad_x = int(abs(m[0]) * focal.w) + 1
        pad_y = int(abs(m[1]) * focal.h) + 1
        return [
            BoundingBox(
                focal.x - pad_x,
                focal.y - pad_y,
                focal.w + pad_x + int(abs(m[2]) * focal.w) + 1,
                focal.h + pad_y + int(abs(m[3]) * focal.h) + 1,
            )
        ]

    # -- descriptions ------------------------------------------------------

    def describe_focal(
        self,
        image_bytes: bytes,
        focal: BoundingBox,
        contextual: BoundingBox,
        gamma: int,
    ) -> str:
        if gamma < 1:
            raise ValueError(f"gamma must be >= 1, got {gamma}")
        canned = self._lookup(PromptKind.FOCAL_DESCRIBE, mock_image_key(image_bytes))
        if canned is not None:
            return str(canned)
        if _crop_is_blank(image_bytes, focal):
            return UNREADABLE_REGION_TEXT
        key = mock_image_key(image_bytes)
        region = f"{focal.as_tuple()} within {contextual.as_tuple()}"
        return " ".join(
            f"Mock focal detail {i + 1} of image {key} at {region}."
            for i in range(gamma)
        )

    def summarize_background(self, image_bytes: bytes) -> str:
        canned = self._lookup(
            PromptKind.BACKGROUND_SUMMARIZE, mock_image_key(image_bytes)
        )
        if canned is not None:
            return str(canned)
        if _crop_is_blank(image_bytes, None):
            return EMPTY_SCENE_TEXT
        key = mock_image_key(image_bytes)
        return f"Mock scene overview of image {key}. Mock surroundings of image {key}."

    # -- answering and judging ----------------------------------------------

    def synthesize_answer(self, question, entries, images=None) -> str:
        if not entries:
            raise ValueError("synthesize_answer needs at least one entry")
        top = entries[0]
        canned = self._lookup(
            PromptKind.ANSWER_SYNTHESIZE, mock_answer_key(question, top.entry_id)
        )
        if canned is not None:
            return str(canned)
        first_sentence = top.focal_description.split(". ")[0].rstrip(".")
        return f"From the stored memory: {first_sentence}."

    def judge_answer(self, generated: str, reference: str) -> JudgeVerdict:
        if not generated or not reference:
            raise ValueError("judge_answer requires non-empty texts")
        verdict = judge_short_circuit(generated, reference)
        if verdict is not None:
            return verdict
        canned = self._lookup(PromptKind.JUDGE, mock_judge_key(generated, reference))
        if canned is not None:
            try:
                return JudgeVerdict(str(canned))
            except ValueError as exc:
                raise ProviderParseError(f"bad judge fixture label: {canned!r}") from exc
        gen_tokens = set(_TOKEN_RE.findall(generated.casefold()))
        ref_tokens = set(_TOKEN_RE.findall(reference.casefold()))
        overlap = len(gen_tokens & ref_tokens) / max(1, len(ref_tokens))
        if overlap >= 0.8:
            return JudgeVerdict.FULL
        if overlap >= 0.3:
            return JudgeVerdict.PARTIAL
        return JudgeVerdict.NONE

    # -- embeddings ----------------------------------------------------------

    def embed(self, text: str) -> np.ndarray:
        if not text:
            raise ValueError("embed requires non-empty text")
        return hash_embedding(text, self.embed_dim)
