"""Evaluation manifests: gaze-annotated images with QA pairs.

A manifest is JSONL, one record per line:

    {"record_id": "r001", "image": "images/r001.png",
     "gaze": [412.0, 300.0], "question": "...", "answer": "...",
     "answer_bbox": [380, 260, 120, 80], "scene_tags": ["kitchen"]}

``image`` paths are resolved relative to the manifest file. Semantic
problems (gaze outside the answer box, box outside the image, empty
question) are reported as violations but do not drop the record;
malformed lines are hard errors carrying the line number.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from PIL import Image

from .geometry import BoundingBox, PixelPoint


class ManifestError(ValueError):
    """A manifest line could not be parsed into a record."""


@dataclass(frozen=True)
class EvalRecord:
    """One evaluation sample: image, gaze, QA pair, answer bounding box."""

    record_id: str
    image_path: Path
    gaze: PixelPoint
    question: str
    answer: str
    answer_bbox: BoundingBox
    scene_tags: tuple[str, ...] = ()

    def to_json_obj(self, base: Path | None = None) -> dict:
        path = self.image_path
        if base is not None:
            try:
                path = path.relative_to(base)
            except ValueError:
                pass
        obj = {
            "record_id": self.record_id,
            "image": str(path),
            "gaze": [self.gaze.x, self.gaze.y],
            "question": self.question,
            "answer": self.answer,
            "answer_bbox": list(self.answer_bbox.as_tuple()),
        }
        if self.scene_tags:
            obj["scene_tags"] = list(self.scene_tags)
        return obj


@dataclass
class ManifestLoadResult:
    records: list[EvalRecord] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)

    def flagged_ids(self) -> set[str]:
        return {v.split(":", 1)[0] for v in self.violations}


def _record_from_obj(obj: dict, base: Path, lineno: int) -> EvalRecord:
    try:
        gaze = obj["gaze"]
        bbox = obj["answer_bbox"]
        return EvalRecord(
            record_id=str(obj["record_id"]),
            image_path=(base / str(obj["image"])).resolve(),
            gaze=PixelPoint(float(gaze[0]), float(gaze[1])),
            question=str(obj["question"]),
            answer=str(obj["answer"]),
            answer_bbox=BoundingBox(int(bbox[0]), int(bbox[1]), int(bbox[2]), int(bbox[3])),
            scene_tags=tuple(str(t) for t in obj.get("scene_tags", ())),
        )
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ManifestError(f"line {lineno}: bad record: {exc}") from exc


def _validate_record(record: EvalRecord, violations: list[str]) -> None:
    if not record.question.strip():
        violations.append(f"{record.record_id}: empty question")
    if not record.answer.strip():
        violations.append(f"{record.record_id}: empty answer")
    bbox = record.answer_bbox
    if not (
        bbox.x <= record.gaze.x < bbox.right and bbox.y <= record.gaze.y < bbox.bottom
    ):
        violations.append(f"{record.record_id}: gaze lies outside the answer box")
    try:
        with Image.open(record.image_path) as image:
            width, height = image.size
    except (FileNotFoundError, OSError):
        violations.append(f"{record.record_id}: image unreadable: {record.image_path}")
        return
    if bbox.clipped(width, height) != bbox:
        violations.append(
            f"{record.record_id}: answer box {bbox.as_tuple()} exceeds the "
            f"{width}x{height} image"
        )


def load_manifest(path: str | Path) -> ManifestLoadResult:
    """Parse and validate a manifest; see the module docstring for the format."""
    path = Path(path)
    base = path.parent
    result = ManifestLoadResult()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"line {lineno}: invalid JSON: {exc}") from exc
            record = _record_from_obj(obj, base, lineno)
            _validate_record(record, result.violations)
            result.records.append(record)
    return result


def save_manifest(records: list[EvalRecord], path: str | Path) -> None:
    path = Path(path)
    base = path.parent
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_json_obj(base), sort_keys=True) + "\n")


def load_image_bytes(record: EvalRecord) -> bytes:
    return Path(record.image_path).read_bytes()


def image_size(record: EvalRecord) -> tuple[int, int]:
    with Image.open(record.image_path) as image:
        return image.size
