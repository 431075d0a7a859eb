"""Response grammar for region proposals.

The model must emit a fenced JSON array of [x, y, w, h] integer boxes;
anything else is a parse error, which callers turn into the
contextual-equals-focal fallback.
"""

from __future__ import annotations

import json
import re

from ..geometry import BoundingBox
from .base import ProviderParseError

_FENCE_RE = re.compile(r"```(?:json)?\s*(.*?)```", re.DOTALL)


def boxes_from_payload(payload: object) -> list[BoundingBox]:
    """Validate an already-decoded payload against the box grammar."""
    if not isinstance(payload, list):
        raise ProviderParseError(
            f"expected a JSON array of boxes, got {type(payload).__name__}"
        )
    boxes: list[BoundingBox] = []
    for item in payload:
        if (
            not isinstance(item, (list, tuple))
            or len(item) != 4
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in item)
        ):
            raise ProviderParseError(
                f"box must be four integers [x, y, w, h], got {item!r}"
            )
        x, y, w, h = item
        if w <= 0 or h <= 0:
            raise ProviderParseError(f"box must have positive size, got {item!r}")
        boxes.append(BoundingBox(x, y, w, h))
    return boxes


def parse_box_proposals(text: str) -> list[BoundingBox]:
    """Extract and validate the fenced JSON box array from model output."""
    match = _FENCE_RE.search(text)
    if match is None:
        raise ProviderParseError("no fenced JSON block in proposal response")
    try:
        payload = json.loads(match.group(1))
    except json.JSONDecodeError as exc:
        raise ProviderParseError(f"fenced block is not valid JSON: {exc}") from exc
    return boxes_from_payload(payload)
