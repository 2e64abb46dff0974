"""HTTP session API consumed by the dashboard and by scripted clients.

One JSON document per session under the data directory (ARED_DATA_DIR or
--data); every mutation is persisted before the response leaves, so the
on-disk log always replays to the live state. Per-session operations are
serialized behind a lock; distinct sessions proceed concurrently.
"""

from __future__ import annotations

import os
import threading
from typing import Optional

import numpy as np
from fastapi import Depends, FastAPI, Header, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import controller, session_io, svr
from .controller import SessionState
from .core import Provenance, Sample
from .errors import AredError, CorruptDocument, DrawExhausted, IoFailure, WrongState


class SessionStore:
    """Disk-backed map of live sessions with per-session locks."""

    def __init__(self, data_dir: str):
        self.data_dir = data_dir
        os.makedirs(data_dir, exist_ok=True)
        self._sessions: dict[str, SessionState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _path(self, session_id: str) -> str:
        return os.path.join(self.data_dir, f"{session_id}.json")

    def create(self, state: SessionState) -> str:
        with self._registry_lock:
            session_id = f"s{len(os.listdir(self.data_dir)) + 1:04d}-{os.urandom(4).hex()}"
            self._sessions[session_id] = state
            self._locks[session_id] = threading.Lock()
        session_io.save_session(state, self._path(session_id))
        return session_id

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            if session_id not in self._locks:
                self._locks[session_id] = threading.Lock()
            return self._locks[session_id]

    def get(self, session_id: str) -> SessionState:
        with self._registry_lock:
            if session_id in self._sessions:
                return self._sessions[session_id]
        path = self._path(session_id)
        if not os.path.exists(path):
            raise KeyError(session_id)
        state = session_io.load_session(path)
        with self._registry_lock:
            self._sessions.setdefault(session_id, state)
        return self._sessions[session_id]

    def persist(self, session_id: str) -> None:
        session_io.save_session(self._sessions[session_id], self._path(session_id))

    def ids(self) -> list[str]:
        names = [f[:-5] for f in os.listdir(self.data_dir) if f.endswith(".json")]
        return sorted(set(names) | set(self._sessions))


# ---------------------------------------------------------------------------
# request/response bodies

class VariableRangeBody(BaseModel):
    name: str
    low: float
    high: float


class DomainBody(BaseModel):
    ivs: list[VariableRangeBody]
    dv_name: str


class InitialSampleBody(BaseModel):
    coords: list[float]
    value: float


class CreateSessionBody(BaseModel):
    domain: DomainBody
    initial_samples: list[InitialSampleBody]
    rng_seed: int = 0
    overrides: dict = Field(default_factory=dict)


class ResultBody(BaseModel):
    value: float


def _state_summary(session_id: str, state: SessionState) -> dict:
    cfg = state.config
    return {
        "id": session_id,
        "status": state.status.value,
        "domain": {
            "ivs": [
                {"name": r.name, "low": r.low, "high": r.high}
                for r in cfg.domain.ivs
            ],
            "dv_name": cfg.domain.dv_name,
        },
        "archive": [
            {
                "coords": list(s.coords),
                "value": s.value,
                "provenance": s.provenance.value,
                "sequence_index": s.sequence_index,
            }
            for s in state.archive
        ],
        "v": state.v,
        "consecutive_passes": state.consecutive_passes,
        "stopping_run_length": cfg.stopping_run_length,
        "pending": None if state.pending is None else {
            "coords": list(state.pending.coords),
            "provenance": state.pending.provenance.value,
            "sequence_index": state.pending.sequence_index,
            "predicted": controller.predicted_value(state, state.pending.coords),
            "audit": {
                "distance": state.pending_audit.nearest_distance,
                "threshold": state.pending_audit.threshold,
            },
        },
        "feedback": None if state.last_feedback() is None else {
            "coords": list(state.last_feedback().coords),
            "triggering_ape": state.last_feedback().triggering_ape,
            "sigma_fraction": 0.10,
        },
        "iterations": len(state.error_history),
        "has_model": state.model is not None,
    }


def _error(code: int, name: str, detail: str) -> HTTPException:
    return HTTPException(status_code=code, detail={"error": name, "detail": detail})


def create_app(
    data_dir: Optional[str] = None,
    token: Optional[str] = None,
    static_dir: Optional[str] = None,
) -> FastAPI:
    data_dir = data_dir or os.environ.get("ARED_DATA_DIR") or "./ared-sessions"
    store = SessionStore(data_dir)
    app = FastAPI(title="ared session service")
    app.state.store = store

    def check_token(x_ared_token: Optional[str] = Header(default=None)):
        if token is not None and x_ared_token != token:
            raise _error(401, "Unauthorized", "missing or wrong X-ARED-Token header")

    def get_state(session_id: str) -> SessionState:
        try:
            return store.get(session_id)
        except KeyError:
            raise _error(404, "UnknownSession", f"no session {session_id!r}")
        except (CorruptDocument, IoFailure) as err:
            raise _error(500, type(err).__name__, str(err))

    @app.post("/sessions", status_code=201, dependencies=[Depends(check_token)])
    def create_session(body: CreateSessionBody):
        from .core import (
            ConstraintParams,
            Domain,
            FeedbackPolicy,
            SessionConfig,
            SvrConfig,
            VariableRange,
        )

        domain = Domain(
            ivs=[VariableRange(r.name, r.low, r.high) for r in body.domain.ivs],
            dv_name=body.domain.dv_name,
        )
        # JSON overrides arrive as plain objects; coerce the structured ones
        coercers = {
            "draw_params": ConstraintParams,
            "feedback_params": ConstraintParams,
            "feedback_policy": FeedbackPolicy,
            "svr_config": SvrConfig,
        }
        overrides = {
            k: coercers[k](**v) if k in coercers and isinstance(v, dict) else v
            for k, v in body.overrides.items()
        }
        try:
            config = SessionConfig.for_domain(domain, body.rng_seed, **overrides)
            initial = [
                Sample(s.coords, s.value, Provenance.INITIAL, i)
                for i, s in enumerate(body.initial_samples)
            ]
            state = controller.start_session(config, initial)
        except (AredError, TypeError, ValueError) as err:
            raise _error(422, type(err).__name__, str(err))
        session_id = store.create(state)
        return {"id": session_id}

    @app.get("/sessions", dependencies=[Depends(check_token)])
    def list_sessions():
        return {"sessions": store.ids()}

    @app.get("/sessions/{session_id}", dependencies=[Depends(check_token)])
    def get_session(session_id: str):
        state = get_state(session_id)
        with store.lock(session_id):
            return _state_summary(session_id, state)

    @app.post("/sessions/{session_id}/proposal", dependencies=[Depends(check_token)])
    def propose(session_id: str):
        state = get_state(session_id)
        with store.lock(session_id):
            try:
                sample = controller.propose_next(state)
            except WrongState as err:
                raise _error(409, "WrongState", str(err))
            except DrawExhausted as err:
                raise _error(409, "DrawExhausted", str(err))
            store.persist(session_id)
            return {
                "coords": list(sample.coords),
                "provenance": sample.provenance.value,
                "sequence_index": sample.sequence_index,
                "predicted": controller.predicted_value(state, sample.coords),
                "audit": {
                    "distance": state.pending_audit.nearest_distance,
                    "threshold": state.pending_audit.threshold,
                },
            }

    @app.post("/sessions/{session_id}/result", dependencies=[Depends(check_token)])
    def record(session_id: str, body: ResultBody):
        state = get_state(session_id)
        with store.lock(session_id):
            try:
                record = controller.record_result(state, body.value)
            except (WrongState,) as err:
                raise _error(409, "WrongState", str(err))
            except AredError as err:
                raise _error(422, type(err).__name__, str(err))
            store.persist(session_id)
            return {
                "status": state.status.value,
                "report": {
                    "mae": record.report.mae,
                    "mape": record.report.mape,
                    "r": record.report.r,
                },
                "eligible": record.eligible,
                "passed": record.passed,
                "consecutive_passes": state.consecutive_passes,
                "feedback": None if record.feedback is None else {
                    "coords": list(record.feedback.coords),
                    "triggering_ape": record.feedback.triggering_ape,
                },
            }

    @app.get("/sessions/{session_id}/surface", dependencies=[Depends(check_token)])
    def surface(session_id: str, resolution: int = 0, axis_x: int = 0, axis_y: int = 1):
        state = get_state(session_id)
        with store.lock(session_id):
            domain = state.config.domain
            if state.model is None:
                raise _error(409, "WrongState", "no model fitted yet")
            if domain.n == 1:
                g = resolution or 101
                g = max(2, min(g, 501))
                r = domain.ivs[0]
                xs = np.linspace(r.low, r.high, g)
                preds = svr.predict_batch(state.model, xs.reshape(-1, 1))
                payload = {
                    "kind": "curve",
                    "xs": xs.tolist(),
                    "predictions": preds.tolist(),
                }
            else:
                # two chosen axes sweep, remaining axes sliced at midpoint
                if not (0 <= axis_x < domain.n and 0 <= axis_y < domain.n
                        and axis_x != axis_y):
                    raise _error(422, "BadAxes",
                                 f"axis pair ({axis_x},{axis_y}) invalid for "
                                 f"{domain.n} variables")
                g = resolution or 41
                g = max(2, min(g, 201))
                rx, ry = domain.ivs[axis_x], domain.ivs[axis_y]
                xs = np.linspace(rx.low, rx.high, g)
                ys = np.linspace(ry.low, ry.high, g)
                mids = [(r.low + r.high) / 2.0 for r in domain.ivs]
                rows = []
                for yv in ys:
                    for xv in xs:
                        row = list(mids)
                        row[axis_x] = xv
                        row[axis_y] = yv
                        rows.append(row)
                preds = svr.predict_batch(state.model, np.array(rows))
                payload = {
                    "kind": "grid",
                    "xs": xs.tolist(),
                    "ys": ys.tolist(),
                    "z": preds.reshape(g, g).tolist(),
                    "axis_x": axis_x,
                    "axis_y": axis_y,
                }
            payload["archive"] = [
                {
                    "coords": list(s.coords),
                    "value": s.value,
                    "provenance": s.provenance.value,
                    "sequence_index": s.sequence_index,
                }
                for s in state.archive
            ]
            return payload

    @app.get("/sessions/{session_id}/history", dependencies=[Depends(check_token)])
    def history(session_id: str):
        state = get_state(session_id)
        with store.lock(session_id):
            return {
                "iterations": [
                    {
                        "archive_size": rec.archive_size,
                        "mae": rec.report.mae,
                        "mape": rec.report.mape,
                        "r": rec.report.r,
                        "eligible": rec.eligible,
                        "passed": rec.passed,
                        "feedback": rec.feedback is not None,
                    }
                    for rec in state.error_history
                ]
            }

    @app.post("/sessions/{session_id}/export", dependencies=[Depends(check_token)])
    def export(session_id: str, force: bool = False):
        state = get_state(session_id)
        with store.lock(session_id):
            try:
                artifact = controller.export_model(state, force=force)
            except AredError as err:
                raise _error(409, type(err).__name__, str(err))
            return session_io.artifact_to_doc(artifact)

    if static_dir and os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="dashboard")

    return app


def default_static_dir() -> Optional[str]:
    """The built dashboard, when it sits next to the package checkout."""
    here = os.path.dirname(os.path.abspath(__file__))
    for candidate in (
        os.path.join(here, "..", "..", "frontend", "dist"),
        os.path.join(os.getcwd(), "frontend", "dist"),
    ):
        candidate = os.path.normpath(candidate)
        if os.path.isdir(candidate):
            return candidate
    return None
