"""HTTP client for chat-completions-style vision/language endpoints.

Images travel inline as base64 data URLs. Requests are retried a bounded
number of times, carry a stable idempotency key, and never exceed the
configured number of parallel calls.
"""

from __future__ import annotations

import base64
import hashlib
import io
import json
import os
import threading
import time
from typing import Sequence

import httpx
import numpy as np
from PIL import Image

from ..geometry import BoundingBox
from .base import (
    JudgeVerdict,
    ProviderConfig,
    ProviderParseError,
    ProviderTransportError,
    judge_short_circuit,
)
from .parsing import parse_box_proposals
from .prompts import PromptKind, render

ENDPOINT_ENV = "GAZEMEM_ENDPOINT"
API_KEY_ENV = "GAZEMEM_API_KEY"
MODEL_ENV = "GAZEMEM_MODEL"
EMBED_MODEL_ENV = "GAZEMEM_EMBED_MODEL"

BACKGROUND_SENTENCE_BUDGET = 2
_RETRY_BACKOFF_S = 0.5


def config_from_env() -> ProviderConfig | None:
    """Build a remote config from environment variables, if an endpoint is set."""
    endpoint = os.environ.get(ENDPOINT_ENV)
    if not endpoint:
        return None
    return ProviderConfig(
        endpoint=endpoint.rstrip("/"),
        model=os.environ.get(MODEL_ENV, "default"),
        embed_model=os.environ.get(EMBED_MODEL_ENV, "default"),
    )


def _data_url(jpeg_bytes: bytes) -> str:
    return "data:image/jpeg;base64," + base64.b64encode(jpeg_bytes).decode("ascii")


def _jpeg_crop(image_bytes: bytes, box: BoundingBox | None) -> bytes:
    image = Image.open(io.BytesIO(image_bytes))
    image.load()
    if box is not None:
        image = image.crop((box.x, box.y, box.right, box.bottom))
    buf = io.BytesIO()
    image.convert("RGB").save(buf, format="JPEG", quality=85)
    return buf.getvalue()


class RemoteProviders:
    """Provider set backed by one chat endpoint and one embeddings endpoint."""

    def __init__(self, config: ProviderConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
        self._semaphore = threading.BoundedSemaphore(config.max_parallel)
        headers = {}
        api_key = os.environ.get(API_KEY_ENV)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(
            base_url=config.endpoint,
            headers=headers,
            timeout=config.timeout_s,
            transport=transport,
        )
        self._embed_dim: int | None = None

    def close(self) -> None:
        self._client.close()

    # -- transport ----------------------------------------------------------

    def _post(self, path: str, payload: dict) -> dict:
        body = json.dumps(payload, sort_keys=True).encode()
        key = hashlib.sha256(body).hexdigest()
        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            if attempt:
                time.sleep(_RETRY_BACKOFF_S * attempt)
            try:
                with self._semaphore:
                    response = self._client.post(
                        path,
                        content=body,
                        headers={
                            "Content-Type": "application/json",
                            "Idempotency-Key": key,
                        },
                    )
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = ProviderTransportError(
                    f"{path} returned {response.status_code}"
                )
                continue
            if response.status_code != 200:
                raise ProviderTransportError(
                    f"{path} returned {response.status_code}: {response.text[:200]}"
                )
            return response.json()
        raise ProviderTransportError(
            f"{path} failed after {self.config.max_retries + 1} attempts: {last_error}"
        )

    def _chat(self, prompt: str, images: Sequence[bytes] = ()) -> str:
        content: list[dict] = [{"type": "text", "text": prompt}]
        for jpeg in images:
            content.append(
                {"type": "image_url", "image_url": {"url": _data_url(jpeg)}}
            )
        payload = {
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": [{"role": "user", "content": content}],
        }
        data = self._post("/chat/completions", payload)
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderParseError(f"malformed chat response: {exc}") from exc

    # -- operations -----------------------------------------------------------

    def propose_memory_targets(
        self, image_bytes: bytes, focal: BoundingBox
    ) -> list[BoundingBox]:
        prompt = render(PromptKind.REGION_PROPOSE, focal_box=focal.as_tuple())
        text = self._chat(prompt, [_jpeg_crop(image_bytes, None)])
        return parse_box_proposals(text)

    def describe_focal(
        self,
        image_bytes: bytes,
        focal: BoundingBox,
        contextual: BoundingBox,
        gamma: int,
    ) -> str:
        if gamma < 1:
            raise ValueError(f"gamma must be >= 1, got {gamma}")
        if not contextual.contains(focal):
            raise ValueError("focal box must lie within the contextual box")
        prompt = render(
            PromptKind.FOCAL_DESCRIBE,
            focal_box=focal.as_tuple(),
            contextual_box=contextual.as_tuple(),
            gamma=gamma,
        )
        crops = [_jpeg_crop(image_bytes, focal)]
        if contextual != focal:
            crops.append(_jpeg_crop(image_bytes, contextual))
        return self._chat(prompt, crops)

    def summarize_background(self, image_bytes: bytes) -> str:
        prompt = render(
            PromptKind.BACKGROUND_SUMMARIZE,
            sentence_budget=BACKGROUND_SENTENCE_BUDGET,
        )
        return self._chat(prompt, [_jpeg_crop(image_bytes, None)])

    def synthesize_answer(self, question, entries, images=None) -> str:
        if not entries:
            raise ValueError("synthesize_answer needs at least one entry")
        memories = "\n".join(
            f"[{i + 1}] {entry.describe_for_prompt()}"
            for i, entry in enumerate(entries)
        )
        image_note = " and the attached images" if images else ""
        prompt = render(
            PromptKind.ANSWER_SYNTHESIZE,
            question=question,
            memories=memories,
            image_note=image_note,
        )
        return self._chat(prompt, list(images or ()))

    def judge_answer(self, generated: str, reference: str) -> JudgeVerdict:
        if not generated or not reference:
            raise ValueError("judge_answer requires non-empty texts")
        verdict = judge_short_circuit(generated, reference)
        if verdict is not None:
            return verdict
        prompt = render(PromptKind.JUDGE, generated=generated, reference=reference)
        text = self._chat(prompt).strip().casefold().rstrip(".")
        try:
            return JudgeVerdict(text)
        except ValueError as exc:
            raise ProviderParseError(f"judge did not reply full/partial/none: {text!r}") from exc

    def embed(self, text: str) -> np.ndarray:
        if not text:
            raise ValueError("embed requires non-empty text")
        payload = {"model": self.config.embed_model, "input": [text]}
        data = self._post("/embeddings", payload)
        try:
            vector = np.asarray(data["data"][0]["embedding"], dtype=np.float64)
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderParseError(f"malformed embeddings response: {exc}") from exc
        if vector.ndim != 1 or vector.size == 0 or not np.all(np.isfinite(vector)):
            raise ProviderParseError("embedding is not a finite vector")
        if self._embed_dim is None:
            self._embed_dim = int(vector.size)
        elif vector.size != self._embed_dim:
            raise ProviderParseError(
                f"embedding dimension changed: {vector.size} != {self._embed_dim}"
            )
        return vector
