"""JSON-over-HTTP wrapper around the session store.

Five endpoints: create a session, submit a ballot, compute, and read the
results and influence documents. The UI polls the two GET endpoints; there
is no push channel.
"""

from __future__ import annotations

from typing import Any, Mapping, Union

from fastapi import FastAPI, Query
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from .errors import (
    BallotError,
    InvalidRegistry,
    NotComputed,
    PPVError,
    SessionError,
    SolverError,
    UnknownSession,
)
from .session import ComputeOptions, SessionStore

Weight = Union[float, int, str]


class NodeSpec(BaseModel):
    id: str
    kind: str
    name: str = ""
    members: list[str] | None = None


class CreateSessionRequest(BaseModel):
    nodes: list[NodeSpec]
    session_id: str | None = None


class BallotRequest(BaseModel):
    source: str
    allocations: dict[str, Weight]


class ComputeRequest(BaseModel):
    tol: float = 1e-12
    max_squarings: int = Field(default=64, ge=1)
    intermediary_strategy: str = "equal-split"
    intermediary_weights: dict[str, dict[str, Weight]] | None = None
    include_ld_comparison: bool = False
    allow_abstentions: bool = True


def _status_for(exc: PPVError) -> int:
    if isinstance(exc, UnknownSession):
        return 404
    if isinstance(exc, NotComputed):
        return 409
    if isinstance(exc, (BallotError, InvalidRegistry, SessionError, SolverError)):
        return 422
    return 400


def create_app(store: SessionStore | None = None) -> FastAPI:
    store = store if store is not None else SessionStore()
    app = FastAPI(title="ppv session service")
    app.state.store = store

    @app.exception_handler(PPVError)
    async def _ppv_error(_, exc: PPVError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.post("/sessions", status_code=201)
    def create_session(request: CreateSessionRequest) -> dict[str, str]:
        nodes: list[Mapping[str, Any]] = []
        for node in request.nodes:
            entry: dict[str, Any] = {"id": node.id, "kind": node.kind, "name": node.name}
            if node.members is not None:
                entry["members"] = node.members
            nodes.append(entry)
        session_id = store.create_session(nodes, session_id=request.session_id)
        return {"session_id": session_id}

    @app.post("/sessions/{session_id}/ballots")
    def submit_ballot(session_id: str, request: BallotRequest) -> dict[str, Any]:
        return store.submit_ballot(session_id, request.source, request.allocations)

    @app.post("/sessions/{session_id}/compute")
    def compute(session_id: str, request: ComputeRequest | None = None) -> dict[str, Any]:
        request = request or ComputeRequest()
        options = ComputeOptions(
            tol=request.tol,
            max_squarings=request.max_squarings,
            intermediary_strategy=request.intermediary_strategy,
            intermediary_weights=(
                {k: {m: float(w) for m, w in v.items()} for k, v in request.intermediary_weights.items()}
                if request.intermediary_weights
                else None
            ),
            include_ld_comparison=request.include_ld_comparison,
            allow_abstentions=request.allow_abstentions,
        )
        return store.compute(session_id, options)

    @app.get("/sessions/{session_id}/results")
    def get_results(session_id: str, format: str = Query(default="json")):
        if format == "csv":
            return PlainTextResponse(store.export(session_id, "csv", "results"))
        return JSONResponse(content=store.get_results(session_id))

    @app.get("/sessions/{session_id}/influence")
    def get_influence(session_id: str, format: str = Query(default="json")):
        if format == "csv":
            return PlainTextResponse(store.export(session_id, "csv", "influence"))
        return JSONResponse(content=store.get_influence(session_id))

    return app
