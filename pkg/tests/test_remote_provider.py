"""Contract tests for the HTTP provider client (no network; mock transport)."""

from __future__ import annotations

import base64
import json
import threading
import time

import httpx
import pytest

from gazemem.encoding import MemoryEntry, PatchPolicy, Provenance, EncodingStrategy, BlobRef
from gazemem.geometry import BoundingBox, PartitionResult
from gazemem.providers import (
    JudgeVerdict,
    ProviderConfig,
    ProviderParseError,
    ProviderTransportError,
    RemoteProviders,
)


def make_entry(entry_id="e1", with_blobs=False) -> MemoryEntry:
    box = BoundingBox(0, 0, 10, 10)
    return MemoryEntry(
        entry_id=entry_id,
        capture_id="c1",
        focal_description="A poster with bold numbers.",
        background_summary="A train platform.",
        timestamp=1_700_000_000,
        gps=None,
        ctx_blob=BlobRef("a" * 64, 123) if with_blobs else None,
        lq_blob=BlobRef("b" * 64, 45) if with_blobs else None,
        boxes=PartitionResult(focal=box, contextual=box),
        provenance=Provenance(
            strategy=EncodingStrategy.CONTEXTUAL, gamma=9, policy=PatchPolicy()
        ),
    )


def chat_response(text: str) -> dict:
    return {"choices": [{"message": {"content": text}}]}


def make_providers(handler, **config_kwargs) -> RemoteProviders:
    config = ProviderConfig(
        endpoint="http://model.test", model="test-model",
        embed_model="test-embed", **config_kwargs,
    )
    return RemoteProviders(config, transport=httpx.MockTransport(handler))


class TestTransport:
    def test_retries_then_succeeds(self):
        calls = []

        def handler(request):
            calls.append(request)
            if len(calls) < 3:
                return httpx.Response(500, text="boom")
            return httpx.Response(200, json=chat_response("full"))

        providers = make_providers(handler, max_retries=2)
        verdict = providers.judge_answer("generated words", "unrelated reference")
        assert verdict in set(JudgeVerdict)
        assert len(calls) == 3

    def test_bounded_retries_raise_transport_error(self):
        def handler(request):
            return httpx.Response(503, text="down")

        providers = make_providers(handler, max_retries=1)
        with pytest.raises(ProviderTransportError):
            providers.summarize_background(_tiny_jpeg())

    def test_idempotency_key_stable_across_retries(self):
        keys = []

        def handler(request):
            keys.append(request.headers["Idempotency-Key"])
            if len(keys) < 2:
                return httpx.Response(500)
            return httpx.Response(200, json=chat_response("ok"))

        providers = make_providers(handler, max_retries=1)
        providers.summarize_background(_tiny_jpeg())
        assert len(set(keys)) == 1

    def test_parallelism_never_exceeds_configured_bound(self):
        in_flight = 0
        peak = 0
        lock = threading.Lock()

        def handler(request):
            nonlocal in_flight, peak
            with lock:
                in_flight += 1
                peak = max(peak, in_flight)
            time.sleep(0.02)
            with lock:
                in_flight -= 1
            return httpx.Response(200, json=chat_response("ok"))

        providers = make_providers(handler, max_parallel=2, max_retries=0)
        threads = [
            threading.Thread(
                target=providers.summarize_background, args=(_tiny_jpeg(),)
            )
            for _ in range(8)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert peak <= 2

    def test_temperature_must_be_zero(self):
        with pytest.raises(ValueError):
            ProviderConfig(endpoint="http://x", model="m", temperature=0.7)


class TestPayloads:
    def test_text_only_synthesis_sends_no_images(self):
        payloads = []

        def handler(request):
            payloads.append(json.loads(request.content))
            return httpx.Response(200, json=chat_response("answer"))

        providers = make_providers(handler)
        providers.synthesize_answer("what was it?", [make_entry()])
        content = payloads[0]["messages"][0]["content"]
        assert [part["type"] for part in content] == ["text"]
        assert payloads[0]["temperature"] == 0.0

    def test_hybrid_synthesis_attaches_each_patch(self):
        payloads = []

        def handler(request):
            payloads.append(json.loads(request.content))
            return httpx.Response(200, json=chat_response("answer"))

        providers = make_providers(handler)
        patches = [b"jpegbytes-ctx", b"jpegbytes-lq"]
        providers.synthesize_answer("what was it?", [make_entry()], patches)
        content = payloads[0]["messages"][0]["content"]
        kinds = [part["type"] for part in content]
        assert kinds == ["text", "image_url", "image_url"]
        sent = [
            part["image_url"]["url"].split(",", 1)[1]
            for part in content
            if part["type"] == "image_url"
        ]
        assert sent == [base64.b64encode(p).decode() for p in patches]

    def test_describe_focal_sends_two_crops_when_boxes_differ(self, photo_bytes):
        payloads = []

        def handler(request):
            payloads.append(json.loads(request.content))
            return httpx.Response(200, json=chat_response("desc"))

        providers = make_providers(handler)
        providers.describe_focal(
            photo_bytes, BoundingBox(10, 10, 50, 50), BoundingBox(0, 0, 100, 100), 5
        )
        content = payloads[0]["messages"][0]["content"]
        assert [p["type"] for p in content] == ["text", "image_url", "image_url"]

    def test_describe_focal_dedupes_identical_boxes(self, photo_bytes):
        payloads = []

        def handler(request):
            payloads.append(json.loads(request.content))
            return httpx.Response(200, json=chat_response("desc"))

        providers = make_providers(handler)
        box = BoundingBox(10, 10, 50, 50)
        providers.describe_focal(photo_bytes, box, box, 5)
        content = payloads[0]["messages"][0]["content"]
        assert [p["type"] for p in content] == ["text", "image_url"]


class TestParsing:
    def test_propose_parses_fenced_block(self, photo_bytes):
        def handler(request):
            return httpx.Response(
                200, json=chat_response("```json\n[[5, 6, 7, 8]]\n```")
            )

        providers = make_providers(handler)
        boxes = providers.propose_memory_targets(photo_bytes, BoundingBox(0, 0, 9, 9))
        assert boxes == [BoundingBox(5, 6, 7, 8)]

    def test_propose_malformed_raises_parse_error(self, photo_bytes):
        def handler(request):
            return httpx.Response(200, json=chat_response("the box is at 5,6"))

        providers = make_providers(handler)
        with pytest.raises(ProviderParseError):
            providers.propose_memory_targets(photo_bytes, BoundingBox(0, 0, 9, 9))

    def test_judge_short_circuit_skips_network(self):
        def handler(request):  # pragma: no cover - must never run
            raise AssertionError("judge should not call the network on exact match")

        providers = make_providers(handler)
        assert providers.judge_answer("Same Answer.", "same answer") is JudgeVerdict.FULL

    def test_judge_unparsable_verdict(self):
        def handler(request):
            return httpx.Response(200, json=chat_response("it depends"))

        providers = make_providers(handler)
        with pytest.raises(ProviderParseError):
            providers.judge_answer("aaa bbb", "ccc ddd")

    def test_embed_parses_vector_and_checks_dimension(self):
        def handler(request):
            body = json.loads(request.content)
            assert body["model"] == "test-embed"
            return httpx.Response(
                200, json={"data": [{"embedding": [0.1, 0.2, 0.3]}]}
            )

        providers = make_providers(handler)
        vec = providers.embed("hello")
        assert vec.shape == (3,)

        def handler2(request):
            return httpx.Response(200, json={"data": [{"embedding": [0.1]}]})

        providers._client._transport = httpx.MockTransport(handler2)
        with pytest.raises(ProviderParseError):
            providers.embed("world")


def _tiny_jpeg() -> bytes:
    import io

    from PIL import Image

    buf = io.BytesIO()
    Image.new("RGB", (4, 4), (10, 20, 30)).save(buf, format="JPEG")
    return buf.getvalue()
