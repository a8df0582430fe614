"""HTTP+JSON service driving the interactive viewer.

Sessions hold one uploaded frame, its pipeline result, and the traced
segments. The store is in-memory; each session processes one request at a
time while distinct sessions may run concurrently.
"""

from __future__ import annotations

import base64
import io
import json
import tempfile
import threading
import uuid
from pathlib import Path
from typing import Dict, Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from PIL import Image

from . import errors
from .pipeline import (STAGE_ORDER, PipelineConfig, SessionState, render_stage,
                       run_pipeline, trace_segment)
from .raster import load_image


class _Store:
    def __init__(self):
        self._lock = threading.Lock()
        self._sessions: Dict[str, SessionState] = {}
        self._locks: Dict[str, threading.Lock] = {}
        self._configs: Dict[str, PipelineConfig] = {}

    def create(self, image, config: PipelineConfig,
               pixel_spacing_mm: Optional[float]) -> str:
        sid = uuid.uuid4().hex
        with self._lock:
            self._sessions[sid] = SessionState(sid, image,
                                               pixel_spacing_mm=pixel_spacing_mm)
            self._locks[sid] = threading.Lock()
            self._configs[sid] = config
        return sid

    def get(self, sid: str):
        with self._lock:
            session = self._sessions.get(sid)
            lock = self._locks.get(sid)
            config = self._configs.get(sid)
        return session, lock, config

    def delete(self, sid: str) -> bool:
        with self._lock:
            existed = sid in self._sessions
            self._sessions.pop(sid, None)
            self._locks.pop(sid, None)
            self._configs.pop(sid, None)
        return existed


def _error(status: int, code: str, message: str, stage: str = None) -> JSONResponse:
    body = {"error": code, "message": message}
    if stage:
        body["stage"] = stage
    return JSONResponse(status_code=status, content=body)


def _decode_image(payload: dict):
    raw = base64.b64decode(payload["image"])
    if raw[:2] == b"P5" or raw[:8] == b"\x89PNG\r\n\x1a\n":
        suffix = ".pgm" if raw[:2] == b"P5" else ".png"
        with tempfile.NamedTemporaryFile(suffix=suffix, delete=False) as f:
            f.write(raw)
            tmp = Path(f.name)
        try:
            return load_image(tmp)
        finally:
            tmp.unlink(missing_ok=True)
    raise errors.CorruptFile("payload is neither PGM (P5) nor PNG")


def create_app(frontend_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="angiotrace")
    store = _Store()

    @app.post("/sessions")
    async def create_session(request: Request):
        try:
            payload = await request.json()
        except json.JSONDecodeError:
            return _error(400, "bad_request", "body must be JSON")
        if "image" not in payload:
            return _error(400, "bad_request", "missing 'image' (base64 PGM/PNG)")
        try:
            image = _decode_image(payload)
        except (errors.AngiotraceError, ValueError) as exc:
            return _error(400, "bad_image", str(exc))
        config = PipelineConfig()
        if payload.get("config"):
            try:
                cfg = dict(payload["config"])
                kwargs = {}
                from . import filtering, topology, tracking
                if "frangi" in cfg:
                    kwargs["frangi"] = filtering.FrangiParams(**cfg.pop("frangi"))
                if "prune" in cfg:
                    kwargs["prune"] = topology.PruneParams(**cfg.pop("prune"))
                if "weights" in cfg:
                    kwargs["weights"] = tracking.CostWeights(**cfg.pop("weights"))
                kwargs.update(cfg)
                config = PipelineConfig(**kwargs)
            except (TypeError, ValueError, errors.AngiotraceError) as exc:
                return _error(400, "bad_config", str(exc))
        spacing = payload.get("pixel_spacing_mm")
        sid = store.create(image, config, spacing)
        return {"session_id": sid}

    @app.post("/sessions/{sid}/run")
    def run(sid: str):
        session, lock, config = store.get(sid)
        if session is None:
            return _error(404, "unknown_session", f"no session {sid}")
        with lock:
            try:
                session.result = run_pipeline(session.image, config)
            except errors.StageError as exc:
                return _error(422, "stage_error", str(exc.cause), stage=exc.stage)
            return {
                "stages": list(STAGE_ORDER),
                "timings_ms": session.result.timings_ms,
                "node_count": len(session.result.graph.nodes),
                "threshold": session.result.threshold,
            }

    @app.get("/sessions/{sid}/stage/{name}.png")
    def stage_png(sid: str, name: str):
        session, lock, _ = store.get(sid)
        if session is None:
            return _error(404, "unknown_session", f"no session {sid}")
        with lock:
            if session.result is None:
                return _error(409, "not_run", "run the pipeline first")
            try:
                rgb = render_stage(session.image, session.result, name)
            except KeyError:
                return _error(404, "unknown_stage", f"no stage {name!r}")
        buf = io.BytesIO()
        Image.fromarray(rgb, mode="RGB").save(buf, format="PNG")
        return Response(content=buf.getvalue(), media_type="image/png")

    @app.post("/sessions/{sid}/trace")
    async def trace(sid: str, request: Request):
        session, lock, _ = store.get(sid)
        if session is None:
            return _error(404, "unknown_session", f"no session {sid}")
        try:
            payload = await request.json()
            start = tuple(int(v) for v in payload["start"])
            end = tuple(int(v) for v in payload["end"])
            assert len(start) == 2 and len(end) == 2
        except Exception:
            return _error(400, "bad_request", "body must be {start:[x,y], end:[x,y]}")
        with lock:
            if session.result is None:
                return _error(409, "not_run", "run the pipeline first")
            try:
                record = trace_segment(session, start, end)
            except errors.NoPath as exc:
                return _error(422, "no_path", str(exc))
            except errors.EmptyGraph as exc:
                return _error(422, "empty_graph", str(exc))
        return record

    @app.get("/sessions/{sid}/segments")
    def segments(sid: str):
        session, lock, _ = store.get(sid)
        if session is None:
            return _error(404, "unknown_session", f"no session {sid}")
        with lock:
            return {"segments": list(session.segments)}

    @app.delete("/sessions/{sid}")
    def delete(sid: str):
        if not store.delete(sid):
            return _error(404, "unknown_session", f"no session {sid}")
        return {"deleted": sid}

    if frontend_dir and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="viewer")

    return app
