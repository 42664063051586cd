"""HTTP wiring: FastAPI app over the session handlers and file stores."""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import sessions as handlers
from .schemas import (
    AnswerRequest,
    AnswerResponse,
    CreateSessionRequest,
    EvaluateResponse,
    LexiconModel,
    LexiconPutRequest,
    PoolingRequest,
    PoolingResponse,
    QuestionResponse,
    SessionView,
)
from .sessions import (
    QuestionConflictError,
    SessionValidationError,
    UnknownSessionError,
    VersionConflictError,
)
from .store import DataStore


def create_app(data_dir: Optional[str] = None) -> FastAPI:
    store = DataStore.from_env(data_dir)
    app = FastAPI(title="verba", version="0.1.0")
    app.state.store = store
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(UnknownSessionError)
    async def _unknown(request: Request, exc: UnknownSessionError):
        return JSONResponse(status_code=404, content={"detail": f"unknown session {exc.args[0]!r}"})

    @app.exception_handler(VersionConflictError)
    async def _stale_version(request: Request, exc: VersionConflictError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(QuestionConflictError)
    async def _stale_question(request: Request, exc: QuestionConflictError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(SessionValidationError)
    async def _invalid(request: Request, exc: SessionValidationError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/sessions", response_model=SessionView, status_code=201)
    def create_session(request: CreateSessionRequest):
        state = handlers.create_session(store, request.model_dump())
        return handlers.session_view(state)

    @app.get("/sessions/{sid}", response_model=SessionView)
    def get_session(sid: str):
        return handlers.session_view(handlers.load_session(store, sid))

    @app.get("/sessions/{sid}/question", response_model=QuestionResponse)
    def get_question(sid: str):
        return {"question": handlers.next_question(store, sid)}

    @app.post("/sessions/{sid}/answers", response_model=AnswerResponse)
    def post_answer(sid: str, request: AnswerRequest):
        state = handlers.answer(store, sid, request.model_dump())
        return {
            "session": handlers.session_view(state),
            "question": handlers.next_question(store, sid),
        }

    @app.post("/sessions/{sid}/evaluate", response_model=EvaluateResponse)
    def post_evaluate(sid: str):
        result = handlers.evaluate_session(store, sid)
        result["session"] = handlers.session_view(result["session"])
        return result

    @app.get("/lexicons/{owner}", response_model=LexiconModel)
    def get_lexicon(owner: str):
        data = handlers.get_lexicon(store, owner)
        if data is None:
            raise HTTPException(status_code=404, detail=f"no lexicon stored for {owner!r}")
        return data

    @app.put("/lexicons/{owner}", response_model=LexiconModel)
    def put_lexicon(owner: str, request: LexiconPutRequest):
        return handlers.put_lexicon(store, owner, request.model_dump())

    @app.post("/pooling/check", response_model=PoolingResponse)
    def pooling_check(request: PoolingRequest):
        return handlers.check_pooling(request.model_dump())

    return app
