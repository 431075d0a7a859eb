"""Durable, append-only archive of memory entries and content-addressed blobs.

Layout under the archive root:

    journal.jsonl   one canonical JSON entry record per line
    blobs/<sha256>  raw blob bytes, filename is the content hash

Writes go through a single lock; readers work off the in-memory snapshot
loaded from the journal. A truncated final journal line (interrupted
write) is skipped with a warning; corruption anywhere earlier raises.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .encoding import BlobRef, JPEG_MEDIA_TYPE, MemoryEntry, canonical_json

logger = logging.getLogger(__name__)

JOURNAL_NAME = "journal.jsonl"
BLOBS_DIR = "blobs"
EARTH_RADIUS_M = 6_371_000.0


class ArchiveError(Exception):
    pass


class EntryNotFoundError(ArchiveError, KeyError):
    pass


class BlobNotFoundError(ArchiveError, KeyError):
    pass


class BlobCorruptionError(ArchiveError):
    pass


class ArchiveCorruptionError(ArchiveError):
    pass


def haversine_m(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in meters on a 6,371,000 m sphere."""
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = math.radians(lat2 - lat1)
    dlam = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(math.sqrt(a))


@dataclass(frozen=True)
class ScanFilter:
    """Conjunction of optional predicates over entries.

    Time window bounds are inclusive epoch seconds; the geo predicate keeps
    entries whose GPS lies within ``radius_m`` of (lat, lon) by haversine.
    """

    t0: int | None = None
    t1: int | None = None
    geo: tuple[float, float, float] | None = None  # lat, lon, radius_m
    strategy: str | None = None
    gamma: int | None = None

    def __post_init__(self) -> None:
        if self.t0 is not None and self.t1 is not None and self.t0 > self.t1:
            raise ValueError(f"time window is reversed: {self.t0} > {self.t1}")
        if self.geo is not None and self.geo[2] < 0:
            raise ValueError(f"geo radius must be >= 0, got {self.geo[2]}")

    def is_empty(self) -> bool:
        return (
            self.t0 is None
            and self.t1 is None
            and self.geo is None
            and self.strategy is None
            and self.gamma is None
        )

    def matches(self, entry: MemoryEntry) -> bool:
        if self.t0 is not None and entry.timestamp < self.t0:
            return False
        if self.t1 is not None and entry.timestamp > self.t1:
            return False
        if self.geo is not None:
            if entry.gps is None:
                return False
            lat, lon, radius = self.geo
            if haversine_m(lat, lon, entry.gps[0], entry.gps[1]) > radius:
                return False
        if self.strategy is not None and entry.provenance.strategy.value != self.strategy:
            return False
        if self.gamma is not None and entry.provenance.gamma != self.gamma:
            return False
        return True


@dataclass
class VerificationReport:
    entries_checked: int = 0
    blobs_checked: int = 0
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


class Archive:
    """Single-writer, many-reader store rooted at a directory."""

    def __init__(self, root: str | Path, create: bool = True):
        self.root = Path(root)
        self.journal_path = self.root / JOURNAL_NAME
        self.blobs_path = self.root / BLOBS_DIR
        if create:
            self.blobs_path.mkdir(parents=True, exist_ok=True)
        elif not self.root.is_dir():
            raise ArchiveError(f"archive root {self.root} does not exist")
        self._lock = threading.Lock()
        self._entries: list[MemoryEntry] = []
        self._by_id: dict[str, MemoryEntry] = {}
        self._load()

    def _load(self) -> None:
        if not self.journal_path.exists():
            return
        raw = self.journal_path.read_bytes()
        pieces = raw.split(b"\n")
        # A well-formed journal ends with a newline, so the last split piece
        # is empty; a non-empty unparsable last piece is a torn final write.
        for i, piece in enumerate(pieces):
            if not piece.strip():
                continue
            try:
                entry = MemoryEntry.from_record(json.loads(piece.decode("utf-8")))
            except (
                json.JSONDecodeError,
                UnicodeDecodeError,
                KeyError,
                ValueError,
                TypeError,
            ) as exc:
                if i == len(pieces) - 1:
                    logger.warning(
                        "skipping truncated final journal line in %s: %s",
                        self.journal_path,
                        exc,
                    )
                    # Drop the torn tail so later appends start on a clean line.
                    with open(self.journal_path, "r+b") as fh:
                        fh.truncate(len(raw) - len(piece))
                    continue
                raise ArchiveCorruptionError(
                    f"{self.journal_path}: corrupt journal line {i + 1}: {exc}"
                ) from exc
            self._entries.append(entry)
            self._by_id[entry.entry_id] = entry

    # -- entries -----------------------------------------------------------

    def put_entry(self, entry: MemoryEntry) -> str:
        """Append an entry; re-putting an existing id is a no-op."""
        with self._lock:
            if entry.entry_id in self._by_id:
                return entry.entry_id
            line = canonical_json(entry.to_record()) + "\n"
            with open(self.journal_path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
            self._entries.append(entry)
            self._by_id[entry.entry_id] = entry
            return entry.entry_id

    def get_entry(self, entry_id: str) -> MemoryEntry:
        try:
            return self._by_id[entry_id]
        except KeyError:
            raise EntryNotFoundError(entry_id) from None

    def has_entry(self, entry_id: str) -> bool:
        return entry_id in self._by_id

    def entries(self) -> list[MemoryEntry]:
        """All entries in journal (insertion) order."""
        with self._lock:
            return list(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def scan(self, flt: ScanFilter | None = None) -> list[MemoryEntry]:
        """Entries satisfying every present predicate, in journal order."""
        snapshot = self.entries()
        if flt is None or flt.is_empty():
            return snapshot
        return [entry for entry in snapshot if flt.matches(entry)]

    # -- blobs --------------------------------------------------------------

    def put_blob(self, data: bytes, media_type: str = JPEG_MEDIA_TYPE) -> BlobRef:
        digest = hashlib.sha256(data).hexdigest()
        path = self.blobs_path / digest
        if not path.exists():
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(data)
            tmp.replace(path)
        return BlobRef(sha256=digest, length=len(data), media_type=media_type)

    def get_blob(self, ref: BlobRef | str) -> bytes:
        digest = ref if isinstance(ref, str) else ref.sha256
        path = self.blobs_path / digest
        if not path.exists():
            raise BlobNotFoundError(digest)
        data = path.read_bytes()
        if hashlib.sha256(data).hexdigest() != digest:
            raise BlobCorruptionError(f"blob {digest} does not match its hash")
        return data

    def has_blob(self, digest: str) -> bool:
        return (self.blobs_path / digest).exists()

    def blob_size(self, ref: BlobRef | str) -> int:
        digest = ref if isinstance(ref, str) else ref.sha256
        path = self.blobs_path / digest
        if not path.exists():
            raise BlobNotFoundError(digest)
        return path.stat().st_size

    # -- integrity -----------------------------------------------------------

    def verify(self) -> VerificationReport:
        """Walk every entry and blob: ids recompute, refs resolve, hashes check."""
        from .encoding import compute_entry_id

        report = VerificationReport()
        seen_blobs: set[str] = set()
        for entry in self.entries():
            report.entries_checked += 1
            recomputed = compute_entry_id(entry.to_record())
            if recomputed != entry.entry_id:
                report.problems.append(
                    f"entry {entry.entry_id}: content hash mismatch ({recomputed})"
                )
            for ref in (entry.ctx_blob, entry.lq_blob):
                if ref is None:
                    continue
                seen_blobs.add(ref.sha256)
                try:
                    data = self.get_blob(ref)
                except BlobNotFoundError:
                    report.problems.append(
                        f"entry {entry.entry_id}: dangling blob ref {ref.sha256}"
                    )
                    continue
                except BlobCorruptionError:
                    report.problems.append(
                        f"entry {entry.entry_id}: blob {ref.sha256} fails its hash"
                    )
                    continue
                if len(data) != ref.length:
                    report.problems.append(
                        f"entry {entry.entry_id}: blob {ref.sha256} length "
                        f"{len(data)} != recorded {ref.length}"
                    )
        report.blobs_checked = len(seen_blobs)
        return report
