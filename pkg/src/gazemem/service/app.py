"""HTTP surface: capture ingestion, archive browsing, and recall queries."""

from __future__ import annotations

import hashlib
import io
import logging
import math
import threading

from fastapi import FastAPI, File, Form, HTTPException, Response, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from PIL import Image as PILImage

from ..archive import Archive, BlobNotFoundError, EntryNotFoundError, ScanFilter
from ..capture import CaptureEvent, UndecodableImageError
from ..config import ServiceConfig
from ..encoding import EncodingError, encode_capture
from ..geometry import CameraIntrinsics, ConfigurationError, FovealParams, PixelPoint
from ..providers import ProviderError, Providers
from ..retrieval import AnswerMode, FlatIndex, IndexVariant, Query, answer, index_entry
from .schemas import (
    AnswerResponse,
    BoxModel,
    CaptureResponse,
    EntriesPage,
    EntryModel,
    HealthResponse,
    QueryRequest,
    VerifyResponse,
)

logger = logging.getLogger(__name__)


class ServiceState:
    """Archive, index, and providers shared across requests.

    Ingestion is serialized by a lock (single-writer archive contract);
    queries read consistent snapshots.
    """

    def __init__(self, config: ServiceConfig, providers: Providers | None = None):
        self.config = config
        self.providers = providers if providers is not None else config.build_providers()
        self.archive = Archive(config.archive_root)
        self.index = FlatIndex()
        self.ingest_lock = threading.Lock()
        for entry in self.archive.entries():
            self._index(entry)

    def _index(self, entry) -> None:
        index_entry(entry, IndexVariant.FOCAL_ONLY, self.providers, self.index)
        index_entry(entry, IndexVariant.FOCAL_PLUS_SCENE, self.providers, self.index)

    def ingest(self, capture: CaptureEvent) -> tuple[str, bool]:
        with self.ingest_lock:
            entry = encode_capture(
                capture,
                self.config.encode.strategy,
                self.config.encode.gamma,
                self.config.encode.policy,
                self.providers,
                self.archive,
                FovealParams(self.config.foveal_angle),
            )
            known = self.archive.has_entry(entry.entry_id)
            if not known:
                self.archive.put_entry(entry)
                self._index(entry)
            return entry.entry_id, entry.provenance.degraded


def _scan_filter(
    t0: int | None,
    t1: int | None,
    lat: float | None,
    lon: float | None,
    radius_m: float | None,
    strategy: str | None,
    gamma: int | None,
) -> ScanFilter:
    geo = None
    if lat is not None or lon is not None or radius_m is not None:
        if lat is None or lon is None or radius_m is None:
            raise HTTPException(
                status_code=400,
                detail="geo filter needs lat, lon, and radius_m together",
            )
        geo = (lat, lon, radius_m)
    try:
        return ScanFilter(t0=t0, t1=t1, geo=geo, strategy=strategy, gamma=gamma)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def create_app(config: ServiceConfig, providers: Providers | None = None) -> FastAPI:
    state = ServiceState(config, providers)
    app = FastAPI(title="gazemem", version="0.1.0")
    app.state.service = state

    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.post("/captures", response_model=CaptureResponse)
    async def post_capture(
        image: UploadFile = File(...),
        gaze_x: float = Form(...),
        gaze_y: float = Form(...),
        timestamp: int = Form(...),
        lat: float | None = Form(None),
        lon: float | None = Form(None),
        fov_h: float | None = Form(None),
        fov_v: float | None = Form(None),
    ):
        data = await image.read()
        if not math.isfinite(gaze_x) or not math.isfinite(gaze_y):
            raise HTTPException(status_code=400, detail="gaze must be finite")
        if (lat is None) != (lon is None):
            raise HTTPException(status_code=400, detail="lat and lon go together")
        try:
            decoded = PILImage.open(io.BytesIO(data))
            decoded.load()
        except Exception as exc:
            raise HTTPException(status_code=400, detail=f"undecodable image: {exc}") from exc
        intrinsics = CameraIntrinsics(
            decoded.width,
            decoded.height,
            fov_h if fov_h is not None else state.config.fov_h,
            fov_v if fov_v is not None else state.config.fov_v,
        )
        capture = CaptureEvent(
            capture_id=f"upload-{hashlib.sha256(data).hexdigest()[:16]}-{timestamp}",
            image_bytes=data,
            gaze=PixelPoint(gaze_x, gaze_y),
            timestamp=timestamp,
            intrinsics=intrinsics,
            gps=(lat, lon) if lat is not None and lon is not None else None,
        )
        try:
            entry_id, degraded = state.ingest(capture)
        except (UndecodableImageError, ConfigurationError, EncodingError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except ProviderError as exc:
            raise HTTPException(status_code=502, detail=f"provider failure: {exc}") from exc
        entry = state.archive.get_entry(entry_id)
        return CaptureResponse(
            entry_id=entry_id,
            focal=BoxModel.from_box(entry.boxes.focal),
            contextual=BoxModel.from_box(entry.boxes.contextual),
            degraded=degraded,
        )

    @app.get("/entries", response_model=EntriesPage)
    def get_entries(
        t0: int | None = None,
        t1: int | None = None,
        lat: float | None = None,
        lon: float | None = None,
        radius_m: float | None = None,
        strategy: str | None = None,
        gamma: int | None = None,
        offset: int = 0,
        limit: int = 50,
    ):
        if offset < 0 or limit < 1:
            raise HTTPException(status_code=400, detail="offset >= 0 and limit >= 1")
        flt = _scan_filter(t0, t1, lat, lon, radius_m, strategy, gamma)
        matched = state.archive.scan(flt)
        page = matched[offset : offset + limit]
        return EntriesPage(
            items=[EntryModel.from_entry(e) for e in page],
            total=len(matched),
            offset=offset,
            limit=limit,
        )

    @app.get("/entries/{entry_id}", response_model=EntryModel)
    def get_entry(entry_id: str):
        try:
            return EntryModel.from_entry(state.archive.get_entry(entry_id))
        except EntryNotFoundError:
            raise HTTPException(status_code=404, detail=f"no entry {entry_id}") from None

    @app.get("/blobs/{digest}")
    def get_blob(digest: str):
        try:
            data = state.archive.get_blob(digest)
        except BlobNotFoundError:
            raise HTTPException(status_code=404, detail=f"no blob {digest}") from None
        return Response(content=data, media_type="image/jpeg")

    @app.post("/query", response_model=AnswerResponse)
    def post_query(request: QueryRequest):
        try:
            mode = AnswerMode(request.answer_mode)
        except ValueError:
            raise HTTPException(
                status_code=400,
                detail=f"answer_mode must be one of {[m.value for m in AnswerMode]}",
            ) from None
        flt = _scan_filter(
            request.t0,
            request.t1,
            request.lat,
            request.lon,
            request.radius_m,
            request.strategy,
            request.gamma,
        )
        query = Query(
            question=request.question,
            top_k=request.top_k,
            use_scene=request.use_scene,
            use_metadata=request.use_metadata,
            filter=flt,
            answer_mode=mode,
        )
        try:
            result = answer(query, state.archive, state.index, state.providers)
        except ProviderError as exc:
            raise HTTPException(status_code=502, detail=f"provider failure: {exc}") from exc
        return AnswerResponse.from_answer(result)

    @app.get("/healthz", response_model=HealthResponse)
    def healthz():
        reachable = True
        try:
            state.providers.embed("health probe")
        except Exception:
            reachable = False
        return HealthResponse(
            status="ok",
            entries=len(state.archive),
            provider=type(state.providers).__name__,
            provider_reachable=reachable,
        )

    @app.get("/verify", response_model=VerifyResponse)
    def verify():
        report = state.archive.verify()
        return VerifyResponse(
            ok=report.ok,
            entries_checked=report.entries_checked,
            blobs_checked=report.blobs_checked,
            problems=report.problems,
        )

    if config.ui_dist is not None and config.ui_dist.is_dir():
        app.mount("/ui", StaticFiles(directory=config.ui_dist, html=True), name="ui")

    return app
