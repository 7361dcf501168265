"""HTTP front end for a study: session assignment, audio streaming, response
collection, and live results.

Endpoints (all JSON unless noted):
  GET  /study/{study_id}/session?rater={rid}[&k=N] -> assigned questions with
       blinded captions, an answered flag, and the audio URL
  GET  /audio/{sample_id} -> audio file from the configured clip directory
  POST /study/{study_id}/responses -> {rater_id, question_id, q1_choice, q2_choice}
  GET  /study/{study_id}/results -> aggregate win/tie/lose JSON
Errors carry a machine-readable {"code": ...} body.
"""

from __future__ import annotations

import os
from datetime import datetime, timezone

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..errors import ValidationError
from .core import (
    DuplicateResponse,
    InsufficientQuestions,
    NotAssigned,
    RatingResponse,
    StudyStore,
    UnknownQuestion,
)

AUDIO_EXTENSIONS = (".wav", ".mp3", ".ogg", ".flac", ".m4a")


class ResponseBody(BaseModel):
    rater_id: str
    question_id: str
    q1_choice: str
    q2_choice: str


def _error(status: int, code: str, message: str) -> HTTPException:
    return HTTPException(status_code=status, detail={"code": code, "message": message})


def create_app(
    store: StudyStore,
    audio_dir: str | None = None,
    static_dir: str | None = None,
    session_size: int = 20,
) -> FastAPI:
    app = FastAPI(title="tagcap A-vs-B study service")

    @app.get("/study/{study_id}/session")
    def get_session(study_id: str, rater: str = Query(...), k: int | None = Query(None)):
        size = k if k is not None else min(session_size, len(store.questions))
        try:
            qids = store.assign_session(rater, size)
        except InsufficientQuestions as exc:
            raise _error(409, "insufficient_questions", str(exc))
        questions = []
        for qid in qids:
            q = store.question(qid)
            # Blinded payload: no ground-truth position, no method name.
            questions.append(
                {
                    "question_id": q.question_id,
                    "sample_id": q.sample_id,
                    "caption_a": q.caption_a,
                    "caption_b": q.caption_b,
                    "audio_url": f"/audio/{q.sample_id}",
                    "answered": store.is_answered(rater, qid),
                }
            )
        return {"study_id": study_id, "rater_id": rater, "questions": questions}

    @app.get("/audio/{sample_id}")
    def get_audio(sample_id: str):
        if audio_dir is None:
            raise _error(404, "no_audio_dir", "service started without an audio directory")
        if "/" in sample_id or ".." in sample_id:
            raise _error(400, "bad_sample_id", "invalid sample id")
        for ext in AUDIO_EXTENSIONS:
            path = os.path.join(audio_dir, sample_id + ext)
            if os.path.exists(path):
                return FileResponse(path)
        raise _error(404, "audio_not_found", f"no clip for sample {sample_id!r}")

    @app.post("/study/{study_id}/responses")
    def post_response(study_id: str, body: ResponseBody):
        try:
            resp = RatingResponse(
                rater_id=body.rater_id,
                question_id=body.question_id,
                q1_choice=body.q1_choice,
                q2_choice=body.q2_choice,
                submitted_at=datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
            )
            store.record_response(resp)
        except UnknownQuestion as exc:
            raise _error(404, "unknown_question", str(exc))
        except NotAssigned as exc:
            raise _error(403, "not_assigned", str(exc))
        except DuplicateResponse as exc:
            raise _error(409, "duplicate_response", str(exc))
        except ValidationError as exc:
            raise _error(400, "invalid_response", str(exc))
        return {"status": "ok"}

    @app.get("/study/{study_id}/results")
    def get_results(study_id: str):
        return store.aggregate().to_jsonable()

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
