"""The HTTP session service: environments over a network, tree-shaped.

JSON bodies use snake_case keys; errors carry {code, message}. GET
endpoints never mutate session state.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from optgym.datasets import default_registry
from optgym.errors import (
    BackendUnavailableError,
    OptGymError,
    OutOfRangeActionError,
    SessionExpiredError,
    SpawnFailureError,
    StartTimeoutError,
    UnknownBenchmarkError,
    UnknownEnvironmentError,
)
from optgym.registry import environment_ids
from optgym.rest.sessions import NodeNotFound, SessionCapError, SessionManager

STATUS_BY_ERROR = {
    UnknownEnvironmentError: 400,
    UnknownBenchmarkError: 400,
    OutOfRangeActionError: 400,
    NodeNotFound: 404,
    SessionExpiredError: 410,
    SessionCapError: 429,
    BackendUnavailableError: 503,
    SpawnFailureError: 503,
    StartTimeoutError: 503,
}


class CreateSessionBody(BaseModel):
    env: str
    benchmark: str


class StepBody(BaseModel):
    action: int | str


def create_app(
    datasets=None,
    session_cap: int = 1000,
    ttl_seconds: float = 30 * 60,
    static_dir: str | None = None,
    make_kwargs: dict | None = None,
) -> FastAPI:
    app = FastAPI(title="optgym session service")
    manager = SessionManager(
        datasets=datasets or default_registry(),
        session_cap=session_cap,
        ttl_seconds=ttl_seconds,
        make_kwargs=make_kwargs,
    )
    app.state.manager = manager

    @app.exception_handler(OptGymError)
    async def optgym_error(request: Request, exc: OptGymError):
        status = 500
        for cls, code in STATUS_BY_ERROR.items():
            if isinstance(exc, cls):
                status = code
                break
        return JSONResponse(
            status_code=status, content={"code": exc.code, "message": exc.message}
        )

    @app.get("/api/v1/datasets")
    def list_datasets():
        out = []
        for env_id in environment_ids():
            for ds in manager.datasets.list(env_id):
                out.append(
                    {
                        "name": ds.name,
                        "description": ds.description,
                        "size": ds.size,
                        "environments": list(ds.environments),
                    }
                )
        unique = {d["name"]: d for d in out}
        return {"datasets": sorted(unique.values(), key=lambda d: d["name"])}

    @app.get("/api/v1/environments")
    def list_environments():
        return {"environments": environment_ids()}

    @app.post("/api/v1/sessions")
    def create_session(body: CreateSessionBody):
        session = manager.create(body.env, body.benchmark)
        env = session.env
        return {
            "session_id": session.id,
            "action_space": env.action_space.to_dict(),
            "observation_spaces": [d.to_dict() for d in env.observation_spaces],
            "reward_spaces": [d.to_dict() for d in env.reward_spaces],
            "root_node": session.nodes[session.root].to_dict(),
            "benchmark": session.benchmark,
            "env": session.env_spec_id,
        }

    @app.delete("/api/v1/sessions/{session_id}")
    def delete_session(session_id: str):
        manager.delete(session_id)
        return {"deleted": session_id}

    @app.post("/api/v1/sessions/{session_id}/nodes/{node_id}/step")
    def step(session_id: str, node_id: int, body: StepBody):
        session = manager.get(session_id)
        child = session.step_from(node_id, body.action)
        return {"node": child.to_dict()}

    @app.get("/api/v1/sessions/{session_id}/tree")
    def tree(session_id: str):
        return manager.get(session_id).tree_dict()

    @app.get("/api/v1/sessions/{session_id}/nodes/{node_id}/series")
    def series(session_id: str, node_id: int, metric: str = "instcount"):
        session = manager.get(session_id)
        return {"metric": metric, "values": session.series(node_id, metric)}

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=Path(static_dir), html=True), name="ui")

    return app
