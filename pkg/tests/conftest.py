"""Shared fixtures: synthetic photographic images and manifest corpora."""

from __future__ import annotations

import io
import json
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from gazemem.geometry import BoundingBox, CameraIntrinsics, PixelPoint
from gazemem.capture import CaptureEvent
from gazemem.manifest import EvalRecord, save_manifest

DEFAULT_FOV_H = 85.0
DEFAULT_FOV_V = 68.0


def make_photo_array(width: int, height: int, seed: int) -> np.ndarray:
    """Gradient + texture + noise: compresses like a photograph, not a flat fill."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width]
    base = 128 + 60 * np.sin(xx / 37.0) + 50 * np.cos(yy / 23.0)
    noise = rng.normal(0, 28, size=(height, width, 3))
    img = base[..., None] + noise
    img[..., 0] += 20 * np.sin(xx / 11.0)
    img[..., 2] += 20 * np.cos(yy / 13.0)
    return np.clip(img, 0, 255).astype(np.uint8)


def make_photo_bytes(width: int = 640, height: int = 480, seed: int = 0, fmt: str = "PNG") -> bytes:
    arr = make_photo_array(width, height, seed)
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format=fmt)
    return buf.getvalue()


def make_blank_bytes(width: int = 64, height: int = 64, value: int = 200) -> bytes:
    buf = io.BytesIO()
    Image.new("RGB", (width, height), (value, value, value)).save(buf, format="PNG")
    return buf.getvalue()


def make_capture(
    image_bytes: bytes,
    gaze: tuple[float, float] = (320.0, 240.0),
    capture_id: str = "cap-0",
    timestamp: int = 1_700_000_000,
    gps: tuple[float, float] | None = None,
    fov_h: float = DEFAULT_FOV_H,
    fov_v: float = DEFAULT_FOV_V,
) -> CaptureEvent:
    with Image.open(io.BytesIO(image_bytes)) as im:
        width, height = im.size
    return CaptureEvent(
        capture_id=capture_id,
        image_bytes=image_bytes,
        gaze=PixelPoint(*gaze),
        timestamp=timestamp,
        intrinsics=CameraIntrinsics(width, height, fov_h, fov_v),
        gps=gps,
    )


@pytest.fixture(scope="session")
def photo_bytes() -> bytes:
    return make_photo_bytes(640, 480, seed=7)


@pytest.fixture(scope="session")
def big_photo_bytes() -> bytes:
    return make_photo_bytes(1280, 960, seed=11)


@pytest.fixture(scope="session")
def blank_bytes() -> bytes:
    return make_blank_bytes()


def build_manifest(
    directory: Path, count: int, width: int = 640, height: int = 480, seed: int = 100
) -> Path:
    """Write ``count`` synthetic records (images + JSONL manifest) into a dir."""
    images_dir = directory / "images"
    images_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for i in range(count):
        name = f"r{i:03d}"
        data = make_photo_bytes(width, height, seed=seed + i)
        (images_dir / f"{name}.png").write_bytes(data)
        bx = 40 + (i * 13) % (width - 240)
        by = 40 + (i * 29) % (height - 200)
        records.append(
            EvalRecord(
                record_id=name,
                image_path=(images_dir / f"{name}.png").resolve(),
                gaze=PixelPoint(bx + 60.0, by + 40.0),
                question=f"what does sample {name} show near marker {i}?",
                answer=f"sample {name} shows marker {i}",
                answer_bbox=BoundingBox(bx, by, 160, 120),
            )
        )
    path = directory / "manifest.jsonl"
    save_manifest(records, path)
    return path


@pytest.fixture(scope="session")
def manifest_50(tmp_path_factory) -> Path:
    return build_manifest(tmp_path_factory.mktemp("manifest50"), 50)


@pytest.fixture(scope="session")
def manifest_8(tmp_path_factory) -> Path:
    return build_manifest(tmp_path_factory.mktemp("manifest8"), 8)
