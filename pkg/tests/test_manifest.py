"""Manifest loading, validation, and round-trip tests."""

from __future__ import annotations

import json

import pytest

from gazemem.geometry import BoundingBox, PixelPoint
from gazemem.manifest import (
    EvalRecord,
    ManifestError,
    load_manifest,
    save_manifest,
)

from conftest import make_photo_bytes


def write_image(directory, name="img.png", width=320, height=240, seed=1):
    path = directory / name
    path.write_bytes(make_photo_bytes(width, height, seed=seed))
    return path


def record_obj(image="img.png", **overrides):
    obj = {
        "record_id": "r1",
        "image": image,
        "gaze": [60.0, 50.0],
        "question": "what color?",
        "answer": "red",
        "answer_bbox": [40, 30, 80, 60],
    }
    obj.update(overrides)
    return obj


class TestLoad:
    def test_empty_manifest(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text("")
        result = load_manifest(path)
        assert result.records == []
        assert result.violations == []

    def test_well_formed_record_loads_cleanly(self, tmp_path):
        write_image(tmp_path)
        path = tmp_path / "m.jsonl"
        path.write_text(json.dumps(record_obj()) + "\n")
        result = load_manifest(path)
        assert len(result.records) == 1
        assert result.violations == []
        record = result.records[0]
        assert record.answer_bbox == BoundingBox(40, 30, 80, 60)
        assert record.gaze == PixelPoint(60.0, 50.0)

    def test_gaze_outside_bbox_is_flagged_not_dropped(self, tmp_path):
        write_image(tmp_path)
        path = tmp_path / "m.jsonl"
        path.write_text(json.dumps(record_obj(gaze=[10.0, 10.0])) + "\n")
        result = load_manifest(path)
        assert len(result.records) == 1
        assert any("gaze" in v for v in result.violations)

    def test_bbox_outside_image_is_flagged(self, tmp_path):
        write_image(tmp_path)
        path = tmp_path / "m.jsonl"
        path.write_text(
            json.dumps(record_obj(answer_bbox=[300, 200, 100, 100], gaze=[310.0, 210.0]))
            + "\n"
        )
        result = load_manifest(path)
        assert any("exceeds" in v for v in result.violations)

    def test_missing_image_is_flagged(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text(json.dumps(record_obj(image="missing.png")) + "\n")
        result = load_manifest(path)
        assert any("unreadable" in v for v in result.violations)

    def test_empty_question_is_flagged(self, tmp_path):
        write_image(tmp_path)
        path = tmp_path / "m.jsonl"
        path.write_text(json.dumps(record_obj(question="  ")) + "\n")
        result = load_manifest(path)
        assert any("empty question" in v for v in result.violations)

    def test_malformed_json_line_reports_line_number(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text(json.dumps(record_obj()) + "\n{broken\n")
        with pytest.raises(ManifestError, match="line 2"):
            load_manifest(path)

    def test_missing_field_reports_line_number(self, tmp_path):
        path = tmp_path / "m.jsonl"
        obj = record_obj()
        del obj["question"]
        path.write_text(json.dumps(obj) + "\n")
        with pytest.raises(ManifestError, match="line 1"):
            load_manifest(path)


class TestRoundTrip:
    def test_three_records_survive_save_load(self, tmp_path):
        for i in range(3):
            write_image(tmp_path, name=f"img{i}.png", seed=i)
        records = [
            EvalRecord(
                record_id=f"r{i}",
                image_path=(tmp_path / f"img{i}.png").resolve(),
                gaze=PixelPoint(60.0 + i, 50.0),
                question=f"what is in image {i}?",
                answer=f"thing {i}",
                answer_bbox=BoundingBox(40, 30, 80, 60),
                scene_tags=("indoor",) if i == 0 else (),
            )
            for i in range(3)
        ]
        path = tmp_path / "m.jsonl"
        save_manifest(records, path)
        result = load_manifest(path)
        assert result.violations == []
        assert result.records == records
