"""Encoding tests: sentence budget, patches, policies, storage accounting."""

from __future__ import annotations

import io

import pytest
from PIL import Image

from gazemem.archive import Archive
from gazemem.encoding import (
    EncodingStrategy,
    PatchPolicy,
    PatchVariant,
    canonical_json,
    compute_entry_id,
    count_sentences,
    encode_capture,
    enforce_sentence_budget,
    make_ctx_patch,
    make_lq_global,
    compute_storage_bytes,
)
from gazemem.geometry import BoundingBox
from gazemem.providers import MockProviders, ProviderTransportError

from conftest import make_blank_bytes, make_capture, make_photo_bytes

ALL_POLICIES = [
    PatchVariant.TEXT_ONLY,
    PatchVariant.CTX_PATCH,
    PatchVariant.LOW_GLOBAL,
    PatchVariant.CTX_AND_LOW_GLOBAL,
]

# (text, sentence count) pairs verified by hand against the boundary rule:
# terminal punctuation followed by whitespace or end-of-text.
TRICKY_SENTENCES = [
    ("It costs 3.50 today.", 1),
    ("One. Two. Three.", 3),
    ("Ends without punctuation", 1),
    ("First! Second? Third... and trailing", 4),
    ("Version 2.5.1 shipped. It works.", 2),
    ("", 0),
    ("   ", 0),
    ("Mr. Smith left.", 2),  # abbreviation dots count; documented limitation
]


class TestSentenceBudget:
    def test_eight_sentences_cut_to_five(self):
        text = " ".join(f"Sentence number {i}." for i in range(1, 9))
        out = enforce_sentence_budget(text, 5)
        assert count_sentences(out) == 5
        assert out == " ".join(f"Sentence number {i}." for i in range(1, 6))

    def test_under_budget_is_identity(self):
        text = "One. Two. Three."
        assert enforce_sentence_budget(text, 5) == text

    @pytest.mark.parametrize("text,expected", TRICKY_SENTENCES)
    def test_counting_matches_hand_computed_corpus(self, text, expected):
        assert count_sentences(text) == expected

    def test_truncation_is_a_prefix_of_the_original(self):
        text = "Alpha beta. Gamma delta! Epsilon? Zeta eta."
        for gamma in range(1, 6):
            out = enforce_sentence_budget(text, gamma)
            assert text.startswith(out)
            assert count_sentences(out) <= gamma

    def test_gamma_must_be_positive(self):
        with pytest.raises(ValueError):
            enforce_sentence_budget("hello.", 0)


class TestPatches:
    def test_ctx_patch_dimensions_match_box(self, photo_bytes):
        image = Image.open(io.BytesIO(photo_bytes))
        box = BoundingBox(40, 30, 200, 150)
        patch = make_ctx_patch(image, box)
        decoded = Image.open(io.BytesIO(patch))
        assert decoded.size == (200, 150)
        assert decoded.format == "JPEG"

    def test_one_pixel_crop_encodes(self, photo_bytes):
        image = Image.open(io.BytesIO(photo_bytes))
        patch = make_ctx_patch(image, BoundingBox(5, 5, 1, 1))
        assert Image.open(io.BytesIO(patch)).size == (1, 1)

    def test_full_image_box_crops_everything(self, photo_bytes):
        image = Image.open(io.BytesIO(photo_bytes))
        patch = make_ctx_patch(image, BoundingBox(0, 0, image.width, image.height))
        assert Image.open(io.BytesIO(patch)).size == image.size

    def test_lq_downscales_longest_side_to_512(self):
        image = Image.open(io.BytesIO(make_photo_bytes(1280, 960, seed=2)))
        lq = make_lq_global(image)
        assert Image.open(io.BytesIO(lq)).size == (512, 384)

    def test_lq_never_upscales(self):
        image = Image.open(io.BytesIO(make_photo_bytes(300, 200, seed=2)))
        lq = make_lq_global(image)
        assert Image.open(io.BytesIO(lq)).size == (300, 200)

    def test_lq_is_smaller_than_full_resolution_crop(self, big_photo_bytes):
        image = Image.open(io.BytesIO(big_photo_bytes))
        full_box = BoundingBox(0, 0, image.width, image.height)
        assert len(make_lq_global(image)) < len(make_ctx_patch(image, full_box))


class TestEncodeCapture:
    @pytest.fixture()
    def archive(self, tmp_path):
        return Archive(tmp_path / "arch")

    def test_contextual_text_only_entry(self, photo_bytes, archive):
        capture = make_capture(photo_bytes)
        entry = encode_capture(
            capture,
            EncodingStrategy.CONTEXTUAL,
            9,
            PatchPolicy(),
            MockProviders(),
            archive,
        )
        assert entry.focal_description
        assert count_sentences(entry.focal_description) <= 9
        assert entry.ctx_blob is None and entry.lq_blob is None
        assert not entry.provenance.degraded
        assert entry.background_summary is None

    def test_encoding_is_deterministic(self, photo_bytes, archive):
        capture = make_capture(photo_bytes)
        args = (EncodingStrategy.CONTEXTUAL, 7, PatchPolicy(), MockProviders(), archive)
        first = encode_capture(capture, *args)
        second = encode_capture(capture, *args)
        assert canonical_json(first.to_record()) == canonical_json(second.to_record())
        assert first.entry_id == second.entry_id

    def test_global_records_focal_box_and_strategy(self, photo_bytes, archive):
        capture = make_capture(photo_bytes)
        entry = encode_capture(
            capture, EncodingStrategy.GLOBAL, 5, PatchPolicy(), MockProviders(), archive
        )
        assert entry.provenance.strategy is EncodingStrategy.GLOBAL
        assert entry.boxes.focal.w > 0

    def test_policy_shape_correspondence(self, photo_bytes, archive):
        capture = make_capture(photo_bytes)
        for variant in ALL_POLICIES:
            entry = encode_capture(
                capture,
                EncodingStrategy.CONTEXTUAL,
                5,
                PatchPolicy(variant=variant),
                MockProviders(),
                archive,
            )
            assert (entry.ctx_blob is not None) == variant.wants_ctx
            assert (entry.lq_blob is not None) == variant.wants_lq

    def test_storage_matches_on_disk_sizes(self, photo_bytes, archive, tmp_path):
        capture = make_capture(photo_bytes)
        entry = encode_capture(
            capture,
            EncodingStrategy.CONTEXTUAL,
            5,
            PatchPolicy(variant=PatchVariant.CTX_AND_LOW_GLOBAL, include_background=True),
            MockProviders(),
            archive,
        )
        archive.put_entry(entry)
        expected = len(entry.focal_description.encode()) + len(
            entry.background_summary.encode()
        )
        for ref in (entry.ctx_blob, entry.lq_blob):
            blob_file = archive.blobs_path / ref.sha256
            expected += blob_file.stat().st_size
        assert compute_storage_bytes(entry, archive) == expected

    def test_storage_delta_equals_blob_bytes(self, photo_bytes, archive):
        capture = make_capture(photo_bytes)
        text_only = encode_capture(
            capture, EncodingStrategy.CONTEXTUAL, 5, PatchPolicy(), MockProviders(), archive
        )
        hybrid = encode_capture(
            capture,
            EncodingStrategy.CONTEXTUAL,
            5,
            PatchPolicy(variant=PatchVariant.CTX_AND_LOW_GLOBAL),
            MockProviders(),
            archive,
        )
        assert hybrid.focal_description == text_only.focal_description
        delta = compute_storage_bytes(hybrid, archive) - compute_storage_bytes(
            text_only, archive
        )
        assert delta == hybrid.ctx_blob.length + hybrid.lq_blob.length

    def test_metadata_excluded_from_storage_metric(self, photo_bytes, archive):
        import dataclasses

        capture = make_capture(photo_bytes)
        entry = encode_capture(
            capture, EncodingStrategy.FOCAL, 5, PatchPolicy(), MockProviders(), archive
        )
        moved = dataclasses.replace(entry, timestamp=entry.timestamp + 999, gps=(1.0, 2.0))
        assert compute_storage_bytes(entry, archive) == compute_storage_bytes(
            moved, archive
        )

    def test_budget_safety_across_strategies_and_gammas(self, photo_bytes, archive):
        capture = make_capture(photo_bytes)
        for strategy in EncodingStrategy:
            for gamma in (1, 3, 13):
                entry = encode_capture(
                    capture,
                    strategy,
                    gamma,
                    PatchPolicy(include_background=True),
                    MockProviders(),
                    archive,
                )
                assert count_sentences(entry.focal_description) <= gamma
                assert count_sentences(entry.background_summary) <= 2

    def test_describe_failure_is_fatal(self, photo_bytes, archive):
        class FailingDescribe(MockProviders):
            def describe_focal(self, *args, **kwargs):
                raise ProviderTransportError("down")

        with pytest.raises(ProviderTransportError):
            encode_capture(
                make_capture(photo_bytes),
                EncodingStrategy.FOCAL,
                5,
                PatchPolicy(),
                FailingDescribe(),
                archive,
            )

    def test_propose_failure_degrades_contextual(self, photo_bytes, archive):
        class FailingPropose(MockProviders):
            def propose_memory_targets(self, *args, **kwargs):
                raise ProviderTransportError("down")

        entry = encode_capture(
            make_capture(photo_bytes),
            EncodingStrategy.CONTEXTUAL,
            5,
            PatchPolicy(),
            FailingPropose(),
            archive,
        )
        assert entry.provenance.degraded
        assert entry.boxes.contextual == entry.boxes.focal

    def test_undecodable_image_raises(self, archive):
        from gazemem.capture import UndecodableImageError
        from gazemem.capture import CaptureEvent
        from gazemem.geometry import CameraIntrinsics, PixelPoint

        capture = CaptureEvent(
            capture_id="bad",
            image_bytes=b"not an image",
            gaze=PixelPoint(1, 1),
            timestamp=0,
            intrinsics=CameraIntrinsics(10, 10, 60, 60),
        )
        with pytest.raises(UndecodableImageError):
            encode_capture(
                capture, EncodingStrategy.FOCAL, 3, PatchPolicy(), MockProviders(), archive
            )

    def test_entry_id_stable_under_reserialization(self, photo_bytes, archive):
        from gazemem.encoding import MemoryEntry

        capture = make_capture(photo_bytes)
        entry = encode_capture(
            capture, EncodingStrategy.CONTEXTUAL, 5, PatchPolicy(), MockProviders(), archive
        )
        rebuilt = MemoryEntry.from_record(entry.to_record())
        assert rebuilt == entry
        assert compute_entry_id(rebuilt.to_record()) == entry.entry_id
