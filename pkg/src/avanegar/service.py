"""HTTP API over a corpus store.

Wire rule: no response ever carries a task's truth, complexity or class.
Clients infer what to render from the options list alone (options present
means choose-or-type, options absent means type only). Lines are served
with each task word shown in its displayed form, which is not necessarily
the correct one.
"""

from __future__ import annotations

import threading
from collections import defaultdict
from importlib import resources
from pathlib import Path

from fastapi import FastAPI, HTTPException, Header, Request, Response
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from .analytics import collect_item_stats, export_csv
from .distance import CostConfig
from .phonemes import TokenizeError, tokenize_ipa
from .store import (
    AlignedLine,
    CorpusStore,
    PARTICIPATION_MODES,
    UnknownEntityError,
)
from .tasks import Task

AUDIO_MEDIA_TYPES = {
    ".mp3": "audio/mpeg",
    ".opus": "audio/opus",
    ".ogg": "audio/ogg",
    ".wav": "audio/wav",
}


class ProfileBody(BaseModel):
    l1_language: str | None = None
    l2_languages: list[str] = []
    age: int | None = None
    gender: str | None = None
    education: str | None = None
    nationality: str | None = None


class SessionBody(BaseModel):
    profile_id: str


class ResponseBody(BaseModel):
    task_id: str
    option_index: int | None = None
    ipa: str | None = None


def task_view(task: Task) -> dict:
    # Deliberately omits truth, complexity and task_class.
    return {
        "task_id": task.id,
        "line_id": task.word_ref.line_id,
        "word_index": task.word_ref.word_index,
        "start_ms": task.audio_span.start_ms,
        "end_ms": task.audio_span.end_ms,
        "displayed": task.displayed.source_text,
        "options": [o.source_text for o in task.options],
    }


def line_view(line: AlignedLine, tasks: dict[str, Task]) -> dict:
    displayed_by_word = {
        t.word_ref.word_index: t.displayed.source_text
        for t in tasks.values()
        if t.word_ref.line_id == line.line_id
    }
    words = [
        {
            "index": w.index,
            "source_token": w.source_token,
            "ipa_token": displayed_by_word.get(w.index, w.ipa_token),
            "start_ms": w.start_ms,
            "end_ms": w.end_ms,
            "has_task": w.index in displayed_by_word,
        }
        for w in line.words
    ]
    return {
        "line_id": line.line_id,
        "source_text": line.source_text,
        "ipa_text": " ".join(w["ipa_token"] for w in words),
        "audio_ref": line.audio_ref,
        "words": words,
    }


def default_intro_text() -> str:
    return resources.files(__package__).joinpath("data", "intro.md").read_text(encoding="utf-8")


def ordered_task_ids(store: CorpusStore) -> list[str]:
    """All active tasks, easiest first: complexity ascending, ties by id."""
    return [t.id for t in sorted(store.tasks.values(), key=lambda t: (t.complexity, t.id))]


def create_app(
    store: CorpusStore,
    *,
    assets_dir: str | Path | None = None,
    ui_dir: str | Path | None = None,
    cost_config: CostConfig = CostConfig(),
    pilot_compat: bool = False,
    intro_text: str | None = None,
) -> FastAPI:
    """Build the API over one store.

    ``pilot_compat`` restores the lax first-deployment behaviour: profiles
    may omit the mandatory fields and the export includes unfinished
    sessions. ``ui_dir`` optionally mounts a built browser client at /.
    """
    app = FastAPI(title="avanegar", docs_url=None, redoc_url=None)
    assets = Path(assets_dir) if assets_dir is not None else None
    intro = intro_text if intro_text is not None else default_intro_text()
    session_locks: defaultdict[str, threading.Lock] = defaultdict(threading.Lock)

    @app.post("/api/profiles", status_code=201)
    def create_profile(body: ProfileBody):
        try:
            profile = store.create_profile(
                l1_language=body.l1_language,
                l2_languages=body.l2_languages,
                age=body.age,
                gender=body.gender,
                education=body.education,
                nationality=body.nationality,
                require_minimum=not pilot_compat,
            )
        except ValueError as e:
            raise HTTPException(status_code=422, detail=str(e))
        return {"profile_id": profile.profile_id, "eligible": profile.eligible}

    @app.post("/api/sessions", status_code=201)
    def create_session(
        body: SessionBody,
        x_participation_mode: str | None = Header(default=None),
    ):
        mode = x_participation_mode or "online"
        if mode not in PARTICIPATION_MODES:
            raise HTTPException(status_code=422, detail=f"unknown participation mode {mode!r}")
        try:
            session = store.create_session(body.profile_id, ordered_task_ids(store), mode)
        except UnknownEntityError as e:
            raise HTTPException(status_code=404, detail=str(e))
        return {
            "session_id": session.session_id,
            "profile_id": session.profile_id,
            "total_tasks": len(session.task_queue),
        }

    @app.get("/api/sessions/{session_id}/next")
    def next_task(session_id: str):
        try:
            task_id = store.current_task_id(session_id)
        except UnknownEntityError as e:
            raise HTTPException(status_code=404, detail=str(e))
        if task_id is None:
            return {"complete": True, "remaining": 0}
        remaining = len(store.sessions[session_id].task_queue) - store.session_cursor(session_id)
        return {"complete": False, "remaining": remaining, "task": task_view(store.tasks[task_id])}

    @app.post("/api/sessions/{session_id}/responses", status_code=201)
    def submit(
        session_id: str,
        body: ResponseBody,
        x_participation_mode: str | None = Header(default=None),
    ):
        if session_id not in store.sessions:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        with session_locks[session_id]:
            current = store.current_task_id(session_id)
            if current is None:
                raise HTTPException(status_code=409, detail="session already complete")
            if body.task_id != current:
                raise HTTPException(
                    status_code=409,
                    detail=f"submitted task {body.task_id!r} is not the current task {current!r}",
                )
            task = store.tasks[current]
            if (body.option_index is None) == (body.ipa is None):
                raise HTTPException(
                    status_code=422, detail="provide exactly one of option_index or ipa"
                )
            if body.option_index is not None:
                if not 0 <= body.option_index < len(task.options):
                    raise HTTPException(
                        status_code=422,
                        detail=f"option_index {body.option_index} out of range "
                        f"(task has {len(task.options)} options)",
                    )
                payload = {"option_index": body.option_index}
            else:
                try:
                    tokenize_ipa(body.ipa, store.inventory)
                except TokenizeError as e:
                    raise HTTPException(
                        status_code=422,
                        detail={
                            "message": str(e),
                            "position": e.position,
                            "symbol": e.symbol,
                        },
                    )
                payload = {"ipa": body.ipa}
            mode = x_participation_mode
            if mode is not None and mode not in PARTICIPATION_MODES:
                raise HTTPException(status_code=422, detail=f"unknown participation mode {mode!r}")
            seq_no = store.record_response(session_id, current, payload, mode)
            remaining = len(store.sessions[session_id].task_queue) - store.session_cursor(session_id)
        return {"seq_no": seq_no, "remaining": remaining, "complete": remaining == 0}

    @app.get("/api/lines")
    def lines():
        return [line_view(line, store.tasks) for _, line in sorted(store.lines.items())]

    @app.get("/api/lines/{line_id}")
    def line(line_id: str):
        found = store.lines.get(line_id)
        if found is None:
            raise HTTPException(status_code=404, detail=f"unknown line {line_id!r}")
        return line_view(found, store.tasks)

    @app.get("/api/intro")
    def intro_doc():
        return {"text": intro}

    @app.get("/api/inventory")
    def inventory():
        return {
            "symbols": list(store.inventory.symbols),
            "short_vowels": [p.symbol for p in store.inventory.short_vowels],
        }

    @app.get("/api/audio/{audio_ref}")
    def audio(audio_ref: str, request: Request):
        if assets is None:
            raise HTTPException(status_code=404, detail="no audio assets configured")
        if Path(audio_ref).name != audio_ref:
            raise HTTPException(status_code=404, detail="bad audio reference")
        path = assets / audio_ref
        if not path.is_file():
            raise HTTPException(status_code=404, detail=f"unknown audio {audio_ref!r}")
        data = path.read_bytes()
        media_type = AUDIO_MEDIA_TYPES.get(path.suffix.lower(), "application/octet-stream")
        range_header = request.headers.get("range")
        headers = {"Accept-Ranges": "bytes"}
        if range_header:
            start, end = _parse_range(range_header, len(data))
            headers["Content-Range"] = f"bytes {start}-{end}/{len(data)}"
            return Response(
                content=data[start : end + 1],
                status_code=206,
                media_type=media_type,
                headers=headers,
            )
        return Response(content=data, media_type=media_type, headers=headers)

    @app.get("/api/export.csv")
    def export():
        items = collect_item_stats(
            store,
            cost_config,
            completed_sessions_only=not pilot_compat,
        )
        return PlainTextResponse(export_csv(items), media_type="text/csv")

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        # Mounted last, so /api/* keeps precedence.
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _parse_range(header: str, size: int) -> tuple[int, int]:
    """Single-range `bytes=a-b` parser; open ends follow the usual rules."""
    try:
        unit, _, spec = header.partition("=")
        if unit.strip() != "bytes" or "," in spec:
            raise ValueError
        start_s, _, end_s = spec.strip().partition("-")
        if start_s == "":
            # suffix form: last N bytes
            length = int(end_s)
            if length <= 0:
                raise ValueError
            return max(size - length, 0), size - 1
        start = int(start_s)
        end = int(end_s) if end_s else size - 1
        if start > end or start >= size:
            raise ValueError
        return start, min(end, size - 1)
    except ValueError:
        raise HTTPException(status_code=416, detail=f"unsatisfiable range {header!r}")
