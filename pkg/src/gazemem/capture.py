"""Capture events: one logged moment from the glasses (or a file stand-in)."""

from __future__ import annotations

import io
from dataclasses import dataclass

from PIL import Image, UnidentifiedImageError

from .geometry import CameraIntrinsics, PixelPoint


class UndecodableImageError(ValueError):
    """Capture image bytes could not be decoded as a raster image."""


@dataclass(frozen=True)
class CaptureEvent:
    """One logged moment: image, gaze point, timestamp, optional GPS.

    ``timestamp`` is UTC epoch seconds. ``gps`` is (latitude, longitude)
    in degrees, or None when the device had no fix.
    """

    capture_id: str
    image_bytes: bytes
    gaze: PixelPoint
    timestamp: int
    intrinsics: CameraIntrinsics
    gps: tuple[float, float] | None = None

    def decode_image(self) -> Image.Image:
        """Decode and sanity-check the raster against the intrinsics."""
        try:
            image = Image.open(io.BytesIO(self.image_bytes))
            image.load()
        except (UnidentifiedImageError, OSError) as exc:
            raise UndecodableImageError(f"capture {self.capture_id}: {exc}") from exc
        if image.size != (self.intrinsics.width, self.intrinsics.height):
            raise UndecodableImageError(
                f"capture {self.capture_id}: image is {image.size[0]}x{image.size[1]} "
                f"but intrinsics say {self.intrinsics.width}x{self.intrinsics.height}"
            )
        return image
