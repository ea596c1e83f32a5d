"""HTTP service for interactive measurement sessions.

Sessions are held in memory, keyed by opaque ids; per-session operations
are serialized with a lock while distinct sessions proceed concurrently.
The measure endpoint reports a non-classical flag whenever the sampled
outcome contradicts an earlier recorded outcome for the same position.
"""

from __future__ import annotations

import itertools
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .errors import NullEvent, QPermError
from .sessions import MeasurementSession, new_session, sample_measurement
from .specs import DEFAULT_CACHE, HopfCache, build_state, resolve_group_spec, sig12, slice_payload
from . import states as st


class CreateSessionRequest(BaseModel):
    group: dict | str
    state: dict | str = {"kind": "haar"}
    seed: int = 0


class MeasureRequest(BaseModel):
    position: int


class SessionStore:
    """In-memory session registry with per-session locks."""

    def __init__(self):
        self._lock = threading.Lock()
        self._sessions: dict[str, tuple[MeasurementSession, threading.Lock]] = {}
        self._counter = itertools.count(1)

    def create(self, session: MeasurementSession) -> str:
        with self._lock:
            sid = f"s{next(self._counter):06d}"
            session.id = sid
            self._sessions[sid] = (session, threading.Lock())
            return sid

    def get(self, sid: str):
        with self._lock:
            entry = self._sessions.get(sid)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown session {sid!r}")
        return entry

    def delete(self, sid: str) -> bool:
        with self._lock:
            return self._sessions.pop(sid, None) is not None


def _history_payload(session: MeasurementSession):
    return [
        {"position": j + 1, "outcome": i + 1, "probability": sig12(p)}
        for j, i, p in session.history
    ]


def _fixed_point_payload(session: MeasurementSession):
    try:
        _, dist = st.fixed_points_of(session.current)
    except QPermError:
        return {}
    return {f"{sig12(lam):g}": sig12(w) for lam, w in dist.items()}


def create_app(cache: HopfCache | None = None, static_dir: str | None = None) -> FastAPI:
    cache = cache or DEFAULT_CACHE
    app = FastAPI(title="qpermlab", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )
    store = SessionStore()
    app.state.store = store

    def _build_session(request: CreateSessionRequest) -> MeasurementSession:
        try:
            group = cache.get(resolve_group_spec(request.group))
            phi = build_state(group, request.state)
        except QPermError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return new_session(group, phi, int(request.seed))

    @app.post("/api/session")
    def create_session(request: CreateSessionRequest):
        session = _build_session(request)
        sid = store.create(session)
        return {"id": sid, "n": session.group.n, "slice": slice_payload(session.current)}

    @app.get("/api/session/{sid}")
    def get_session(sid: str):
        session, lock = store.get(sid)
        with lock:
            return {
                "id": sid,
                "n": session.group.n,
                "slice": slice_payload(session.current),
                "history": _history_payload(session),
                "fixedPointDistribution": _fixed_point_payload(session),
            }

    @app.post("/api/session/{sid}/measure")
    def measure(sid: str, request: MeasureRequest):
        session, lock = store.get(sid)
        position = request.position - 1
        if not 0 <= position < session.group.n:
            raise HTTPException(status_code=400,
                                detail=f"position must be in 1..{session.group.n}")
        with lock:
            earlier = [i for j, i, _ in session.history if j == position]
            try:
                outcome, prob = sample_measurement(session, position)
            except NullEvent as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
            except QPermError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            flag = any(prev != outcome for prev in earlier)
            return {
                "outcome": outcome + 1,
                "probability": sig12(prob),
                "slice": slice_payload(session.current),
                "nonClassicalFlag": flag,
            }

    @app.post("/api/session/{sid}/reset")
    def reset(sid: str):
        session, lock = store.get(sid)
        with lock:
            session.reset()
            return {"id": sid, "n": session.group.n, "slice": slice_payload(session.current)}

    @app.delete("/api/session/{sid}")
    def delete(sid: str):
        if not store.delete(sid):
            raise HTTPException(status_code=404, detail=f"unknown session {sid!r}")
        return {"ok": True}

    if static_dir is None:
        default_static = Path.cwd() / "frontend" / "dist"
        static_dir = str(default_static) if default_static.is_dir() else None
    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")
    return app


def serve(port: int, static_dir: str | None = None, host: str = "127.0.0.1"):
    import uvicorn

    uvicorn.run(create_app(static_dir=static_dir), host=host, port=port, log_level="warning")
