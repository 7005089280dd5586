"""HTTP surface of the controller service.

Endpoints:
    GET  /state                     current context document
    POST /command                   run a command, returns the proposal
    GET  /proposals?limit=N         history, newest first
    GET  /proposals/{id}            one proposal
    POST /proposals/{id}/approve    apply a pending proposal
    POST /proposals/{id}/reject     discard a pending proposal
    GET  /events?since=N            event log records with seq > N
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..context import context_to_document
from ..prompting import EmptyCommandError
from .config import ServiceConfig
from .controller import Controller, NotFoundError, NotPendingError, Proposal

__all__ = ["create_app"]


class CommandRequest(BaseModel):
    text: str = Field(description="Natural-language command for the home")


class ChangeModel(BaseModel):
    room: str
    device_type: str
    device: str
    property: str
    old: Any = None
    new: Any = None


class DroppedFieldModel(BaseModel):
    path: str
    kind: str


class ChangeSetModel(BaseModel):
    changes: list[ChangeModel]
    dropped: list[DroppedFieldModel]


class ProposalModel(BaseModel):
    id: str
    command: str
    changeset: ChangeSetModel
    latency: float
    status: str
    created_at: str
    error: str | None = None

    @classmethod
    def from_proposal(cls, proposal: Proposal) -> "ProposalModel":
        return cls.model_validate(proposal.to_document())


class EventModel(BaseModel):
    seq: int
    timestamp: str
    kind: str
    payload: dict[str, Any]


class ServiceInfoModel(BaseModel):
    mode: str
    backend_kind: str
    proposals: int
    events: int


def create_app(controller: Controller) -> FastAPI:
    app = FastAPI(title="hearth controller", version="0.1.0")
    app.state.controller = controller

    @app.get("/state")
    def get_state() -> dict[str, Any]:
        return context_to_document(controller.get_state())

    @app.post("/command", response_model=ProposalModel)
    def post_command(request: CommandRequest) -> ProposalModel:
        try:
            proposal = controller.handle_command(request.text)
        except EmptyCommandError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return ProposalModel.from_proposal(proposal)

    @app.get("/proposals", response_model=list[ProposalModel])
    def get_proposals(limit: int | None = None) -> list[ProposalModel]:
        return [ProposalModel.from_proposal(p) for p in controller.get_history(limit)]

    @app.get("/proposals/{proposal_id}", response_model=ProposalModel)
    def get_proposal(proposal_id: str) -> ProposalModel:
        try:
            return ProposalModel.from_proposal(controller.get_proposal(proposal_id))
        except NotFoundError:
            raise HTTPException(status_code=404, detail=f"no proposal {proposal_id}")

    def _resolve(proposal_id: str, decision: str) -> ProposalModel:
        try:
            return ProposalModel.from_proposal(
                controller.resolve_proposal(proposal_id, decision)
            )
        except NotFoundError:
            raise HTTPException(status_code=404, detail=f"no proposal {proposal_id}")
        except NotPendingError as exc:
            raise HTTPException(status_code=409, detail=str(exc))

    @app.post("/proposals/{proposal_id}/approve", response_model=ProposalModel)
    def approve_proposal(proposal_id: str) -> ProposalModel:
        return _resolve(proposal_id, "approve")

    @app.post("/proposals/{proposal_id}/reject", response_model=ProposalModel)
    def reject_proposal(proposal_id: str) -> ProposalModel:
        return _resolve(proposal_id, "reject")

    @app.get("/events", response_model=list[EventModel])
    def get_events(since: int = 0) -> list[EventModel]:
        return [
            EventModel.model_validate(record.to_document())
            for record in controller.events.since(since)
        ]

    @app.get("/info", response_model=ServiceInfoModel)
    def get_info() -> ServiceInfoModel:
        return ServiceInfoModel(
            mode=controller.config.mode,
            backend_kind=controller.config.backend.kind,
            proposals=len(controller.get_history()),
            events=len(controller.events),
        )

    static_dir = controller.config.static_dir
    if static_dir and Path(static_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def create_app_from_config(path: str | Path) -> FastAPI:
    return create_app(Controller.from_config(ServiceConfig.from_file(path)))
