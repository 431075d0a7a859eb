"""Fixation-centered region geometry.

Computes the focal box from camera intrinsics and the foveal coverage
angle, cleans up model-proposed target boxes, and expands the focal box
to the minimal contextual box enclosing them.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)

DEFAULT_FOVEAL_ANGLE_DEG = 17.0


class ConfigurationError(ValueError):
    """Invalid camera or foveal-coverage configuration."""


def round_half_away(value: float) -> int:
    """Round to the nearest integer, ties away from zero."""
    if value >= 0:
        return int(math.floor(value + 0.5))
    return -int(math.floor(-value + 0.5))


@dataclass(frozen=True)
class PixelPoint:
    """A point in image pixel coordinates (x right, y down)."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"pixel point must be finite, got ({self.x}, {self.y})")

    def clamped(self, width: int, height: int) -> "PixelPoint":
        """Nearest in-bounds pixel. Tracker noise must not abort a capture."""
        return PixelPoint(
            min(max(self.x, 0.0), width - 1),
            min(max(self.y, 0.0), height - 1),
        )


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned pixel rectangle; covers [x, x+w) x [y, y+h)."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self) -> None:
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"box must have positive size, got {self.w}x{self.h}")

    @property
    def right(self) -> int:
        return self.x + self.w

    @property
    def bottom(self) -> int:
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    def contains(self, other: "BoundingBox") -> bool:
        return (
            self.x <= other.x
            and self.y <= other.y
            and other.right <= self.right
            and other.bottom <= self.bottom
        )

    def clipped(self, width: int, height: int) -> "BoundingBox | None":
        """Intersection with [0, width) x [0, height); None if no area remains."""
        x0 = max(self.x, 0)
        y0 = max(self.y, 0)
        x1 = min(self.right, width)
        y1 = min(self.bottom, height)
        if x1 <= x0 or y1 <= y0:
            return None
        return BoundingBox(x0, y0, x1 - x0, y1 - y0)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x, self.y, self.w, self.h)

    @classmethod
    def from_tuple(cls, t) -> "BoundingBox":
        x, y, w, h = t
        return cls(int(x), int(y), int(w), int(h))


@dataclass(frozen=True)
class CameraIntrinsics:
    """Image resolution and camera field of view in degrees."""

    width: int
    height: int
    fov_h: float
    fov_v: float

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ConfigurationError(
                f"image size must be at least 1x1, got {self.width}x{self.height}"
            )
        if not (0.0 < self.fov_h < 180.0) or not (0.0 < self.fov_v < 180.0):
            raise ConfigurationError(
                f"field of view must be in (0, 180) degrees, got "
                f"{self.fov_h} x {self.fov_v}"
            )

    @property
    def full_box(self) -> BoundingBox:
        return BoundingBox(0, 0, self.width, self.height)


@dataclass(frozen=True)
class FovealParams:
    """Effective coverage angle of high-acuity central vision, degrees."""

    coverage_angle: float = DEFAULT_FOVEAL_ANGLE_DEG


@dataclass(frozen=True)
class PartitionResult:
    """Focal and contextual boxes for one capture.

    ``degraded`` is set when the region proposer failed and the
    contextual box fell back to the focal box.
    """

    focal: BoundingBox
    contextual: BoundingBox
    proposals: tuple[BoundingBox, ...] = ()
    degraded: bool = False


def locate_focal_region(
    gaze: PixelPoint,
    intrinsics: CameraIntrinsics,
    foveal: FovealParams = FovealParams(),
) -> BoundingBox:
    """Fixation-centered box sized by projecting the coverage angle.

    Box size is ``round(width * angle / fov_h) x round(height * angle / fov_v)``
    (half-away-from-zero), centered on the gaze pixel, then clipped to the
    image: the center stays put and overhang is trimmed.
    """
    angle = foveal.coverage_angle
    if angle <= 0:
        raise ConfigurationError(f"coverage angle must be positive, got {angle}")
    if angle > min(intrinsics.fov_h, intrinsics.fov_v):
        raise ConfigurationError(
            f"coverage angle {angle} exceeds camera field of view "
            f"{intrinsics.fov_h} x {intrinsics.fov_v}"
        )
    # A tiny angle can round to zero pixels; a focal region is never empty.
    w = max(1, round_half_away(intrinsics.width * angle / intrinsics.fov_h))
    h = max(1, round_half_away(intrinsics.height * angle / intrinsics.fov_v))
    cx = round_half_away(gaze.x)
    cy = round_half_away(gaze.y)
    box = BoundingBox(cx - w // 2, cy - h // 2, w, h)
    clipped = box.clipped(intrinsics.width, intrinsics.height)
    if clipped is None:
        raise ConfigurationError(
            f"gaze ({gaze.x}, {gaze.y}) lies outside the "
            f"{intrinsics.width}x{intrinsics.height} image; clamp it first"
        )
    return clipped


def enclose(proposals: list[BoundingBox] | tuple[BoundingBox, ...], focal: BoundingBox) -> BoundingBox:
    """Minimal axis-aligned rectangle containing the focal box and every proposal."""
    x0, y0, x1, y1 = focal.x, focal.y, focal.right, focal.bottom
    for box in proposals:
        x0 = min(x0, box.x)
        y0 = min(y0, box.y)
        x1 = max(x1, box.right)
        y1 = max(y1, box.bottom)
    return BoundingBox(x0, y0, x1 - x0, y1 - y0)


def sanitize_proposals(
    raw: list[BoundingBox] | tuple[BoundingBox, ...],
    intrinsics: CameraIntrinsics,
) -> list[BoundingBox]:
    """Clip proposals to image bounds and drop those with no remaining area."""
    out: list[BoundingBox] = []
    for box in raw:
        clipped = box.clipped(intrinsics.width, intrinsics.height)
        if clipped is not None:
            out.append(clipped)
    return out


def partition(capture, proposer, foveal: FovealParams = FovealParams()) -> PartitionResult:
    """Focal localization plus proposer-driven contextual expansion.

    A proposer failure (transport or unparsable output) degrades the result
    to ``contextual == focal`` rather than losing the capture.
    """
    from .providers.base import ProviderError  # local import avoids a cycle

    intrinsics = capture.intrinsics
    gaze = capture.gaze.clamped(intrinsics.width, intrinsics.height)
    focal = locate_focal_region(gaze, intrinsics, foveal)
    try:
        raw = proposer.propose_memory_targets(capture.image_bytes, focal)
    except ProviderError as exc:
        logger.warning("region proposal failed, contextual falls back to focal: %s", exc)
        return PartitionResult(focal=focal, contextual=focal, proposals=(), degraded=True)
    proposals = sanitize_proposals(raw, intrinsics)
    contextual = enclose(proposals, focal)
    return PartitionResult(
        focal=focal,
        contextual=contextual,
        proposals=tuple(proposals),
        degraded=False,
    )
