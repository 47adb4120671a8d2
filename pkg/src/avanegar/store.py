"""Audio-aligned corpus, profiles, sessions and the append-only response log.

State is a pure fold over an append-only event log (a JSON-lines file, or
an in-memory list for throwaway stores). Reopening a store replays the
log, so replay equals state by construction. Appends are serialized by a
lock and flushed to disk before a receipt is returned.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

from .phonemes import PhonemeInventory, TokenizeError, tokenize_ipa
from .tasks import Task, task_from_doc, task_to_doc

PARTICIPATION_MODES = ("on_site", "online")

#: First languages that make a profile ineligible for the study proper.
INELIGIBLE_L1 = ("persian", "farsi")

#: Fields a profile must carry when the mandatory-minimum rule is enforced.
REQUIRED_PROFILE_FIELDS = ("l1_language", "age", "education")


class IngestError(ValueError):
    """An alignment document violates the corpus contract."""


class UnknownEntityError(ValueError):
    """A referenced profile, session, task or line does not exist."""


@dataclass(frozen=True)
class WordAlignment:
    index: int
    source_token: str
    ipa_token: str
    start_ms: int
    end_ms: int


@dataclass(frozen=True)
class AlignedLine:
    line_id: str
    source_text: str
    ipa_text: str
    audio_ref: str
    words: tuple[WordAlignment, ...]


@dataclass(frozen=True)
class UserProfile:
    profile_id: str
    l1_language: str | None = None
    l2_languages: tuple[str, ...] = ()
    age: int | None = None
    gender: str | None = None
    education: str | None = None
    nationality: str | None = None
    eligible: bool = True


@dataclass(frozen=True)
class Session:
    session_id: str
    profile_id: str
    created_at: str
    task_queue: tuple[str, ...]
    participation_mode: str = "online"


@dataclass(frozen=True)
class ResponseRecord:
    seq_no: int
    session_id: str
    profile_id: str
    task_id: str
    payload: dict
    received_at: str
    participation_mode: str = "online"


def validate_alignment_doc(doc, inventory: PhonemeInventory) -> list[AlignedLine]:
    """Parse and validate an alignment document (a JSON array of lines)."""
    if not isinstance(doc, list):
        raise IngestError("alignment document must be a JSON array of line objects")
    lines: list[AlignedLine] = []
    seen_ids: set[str] = set()
    for line_doc in doc:
        if not isinstance(line_doc, dict):
            raise IngestError(f"line entry is not an object: {line_doc!r}")
        missing = [k for k in ("line_id", "source_text", "ipa_text", "audio_ref", "words") if k not in line_doc]
        if missing:
            raise IngestError(f"line {line_doc.get('line_id')!r}: missing keys {missing}")
        line_id = line_doc["line_id"]
        if line_id in seen_ids:
            raise IngestError(f"duplicate line_id {line_id!r} in document")
        seen_ids.add(line_id)
        if not line_doc["words"]:
            raise IngestError(f"line {line_id!r}: words must be non-empty")

        words = []
        prev_end = None
        for pos, wdoc in enumerate(line_doc["words"]):
            wmissing = [k for k in ("index", "source_token", "ipa_token", "start_ms", "end_ms") if k not in wdoc]
            if wmissing:
                raise IngestError(f"line {line_id!r} word {pos}: missing keys {wmissing}")
            if wdoc["index"] != pos:
                raise IngestError(
                    f"line {line_id!r} word {pos}: index {wdoc['index']} out of order"
                )
            start, end = wdoc["start_ms"], wdoc["end_ms"]
            if not start < end:
                raise IngestError(
                    f"line {line_id!r} word {pos}: start_ms {start} must be < end_ms {end}"
                )
            if prev_end is not None and start < prev_end:
                raise IngestError(
                    f"line {line_id!r} word {pos}: window starts at {start} before "
                    f"previous word ends at {prev_end}"
                )
            prev_end = end
            try:
                tokenize_ipa(wdoc["ipa_token"], inventory)
            except TokenizeError as e:
                raise IngestError(
                    f"line {line_id!r} word {pos}: bad IPA token: {e}"
                ) from e
            words.append(
                WordAlignment(pos, wdoc["source_token"], wdoc["ipa_token"], start, end)
            )

        joined = " ".join(w.ipa_token for w in words)
        if joined != line_doc["ipa_text"]:
            raise IngestError(
                f"line {line_id!r}: ipa_text does not equal the space-joined word tokens"
            )
        lines.append(
            AlignedLine(
                line_id,
                line_doc["source_text"],
                line_doc["ipa_text"],
                line_doc["audio_ref"],
                tuple(words),
            )
        )
    return lines


class CorpusStore:
    """Event-sourced store over one inventory.

    Single writer (serialized appends), unlimited concurrent readers.
    """

    def __init__(self, inventory: PhonemeInventory, path: str | Path | None = None):
        self.inventory = inventory
        self._path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._lines: dict[str, AlignedLine] = {}
        self._tasks: dict[str, Task] = {}
        self._profiles: dict[str, UserProfile] = {}
        self._sessions: dict[str, Session] = {}
        self._responses: list[ResponseRecord] = []
        if self._path is not None and self._path.exists():
            with open(self._path, encoding="utf-8") as f:
                for raw in f:
                    raw = raw.strip()
                    if raw:
                        self._apply(json.loads(raw))

    # -- log plumbing --------------------------------------------------------

    def _append(self, event: dict) -> None:
        # Callers hold self._lock. Durable before visible.
        if self._path is not None:
            self._path.parent.mkdir(parents=True, exist_ok=True)
            with open(self._path, "a", encoding="utf-8") as f:
                f.write(json.dumps(event, ensure_ascii=False) + "\n")
                f.flush()
                os.fsync(f.fileno())
        self._apply(event)

    def _apply(self, event: dict) -> None:
        kind = event["type"]
        if kind == "line":
            d = event["doc"]
            self._lines[d["line_id"]] = AlignedLine(
                d["line_id"],
                d["source_text"],
                d["ipa_text"],
                d["audio_ref"],
                tuple(WordAlignment(**w) for w in d["words"]),
            )
        elif kind == "tasks":
            for d in event["docs"]:
                self._tasks[d["id"]] = task_from_doc(d, self.inventory)
        elif kind == "profile":
            d = event["doc"]
            d = dict(d, l2_languages=tuple(d.get("l2_languages") or ()))
            self._profiles[d["profile_id"]] = UserProfile(**d)
        elif kind == "session":
            d = event["doc"]
            d = dict(d, task_queue=tuple(d["task_queue"]))
            self._sessions[d["session_id"]] = Session(**d)
        elif kind == "response":
            self._responses.append(ResponseRecord(**event["doc"]))
        else:
            raise ValueError(f"unknown event type {kind!r} in log")

    # -- read side -----------------------------------------------------------

    @property
    def lines(self) -> dict[str, AlignedLine]:
        return self._lines

    @property
    def tasks(self) -> dict[str, Task]:
        return self._tasks

    @property
    def profiles(self) -> dict[str, UserProfile]:
        return self._profiles

    @property
    def sessions(self) -> dict[str, Session]:
        return self._sessions

    @property
    def responses(self) -> tuple[ResponseRecord, ...]:
        return tuple(self._responses)

    def session_cursor(self, session_id: str) -> int:
        """How many tasks of its queue a session has answered."""
        if session_id not in self._sessions:
            raise UnknownEntityError(f"unknown session {session_id!r}")
        return sum(1 for r in self._responses if r.session_id == session_id)

    def current_task_id(self, session_id: str) -> str | None:
        session = self._sessions.get(session_id)
        if session is None:
            raise UnknownEntityError(f"unknown session {session_id!r}")
        cursor = self.session_cursor(session_id)
        if cursor >= len(session.task_queue):
            return None
        return session.task_queue[cursor]

    def resolve_payload(self, task: Task, payload: dict):
        """Turn a stored payload into the phoneme sequence the user gave."""
        if "option_index" in payload and payload["option_index"] is not None:
            return task.options[payload["option_index"]]
        return tokenize_ipa(payload["ipa"], self.inventory)

    def state_snapshot(self) -> dict:
        """Comparable view of the full state (for replay-equals-state checks)."""
        return {
            "lines": {k: asdict(v) for k, v in sorted(self._lines.items())},
            "tasks": {k: task_to_doc(v) for k, v in sorted(self._tasks.items())},
            "profiles": {k: asdict(v) for k, v in sorted(self._profiles.items())},
            "sessions": {k: asdict(v) for k, v in sorted(self._sessions.items())},
            "responses": [asdict(r) for r in self._responses],
        }

    # -- write side ----------------------------------------------------------

    def ingest_alignment(self, doc) -> list[AlignedLine]:
        """Validate and persist an alignment document's lines."""
        lines = validate_alignment_doc(doc, self.inventory)
        with self._lock:
            for line in lines:
                if line.line_id in self._lines:
                    raise IngestError(f"line {line.line_id!r} already ingested")
            for line in lines:
                self._append(
                    {
                        "type": "line",
                        "doc": {
                            "line_id": line.line_id,
                            "source_text": line.source_text,
                            "ipa_text": line.ipa_text,
                            "audio_ref": line.audio_ref,
                            "words": [asdict(w) for w in line.words],
                        },
                    }
                )
        return lines

    def add_tasks(self, tasks: Iterable[Task]) -> None:
        tasks = list(tasks)
        with self._lock:
            for t in tasks:
                if t.id in self._tasks:
                    raise IngestError(f"task {t.id!r} already stored")
            self._append({"type": "tasks", "docs": [task_to_doc(t) for t in tasks]})

    def create_profile(
        self,
        *,
        profile_id: str | None = None,
        l1_language: str | None = None,
        l2_languages: Iterable[str] = (),
        age: int | None = None,
        gender: str | None = None,
        education: str | None = None,
        nationality: str | None = None,
        require_minimum: bool = False,
    ) -> UserProfile:
        """Persist a profile; Persian-L1 profiles are flagged, not rejected."""
        if require_minimum:
            provided = {"l1_language": l1_language, "age": age, "education": education}
            missing = [k for k in REQUIRED_PROFILE_FIELDS if provided.get(k) is None]
            if missing:
                raise ValueError(f"profile is missing mandatory fields: {', '.join(missing)}")
        eligible = (l1_language or "").strip().lower() not in INELIGIBLE_L1
        profile = UserProfile(
            profile_id=profile_id or uuid.uuid4().hex,
            l1_language=l1_language,
            l2_languages=tuple(l2_languages),
            age=age,
            gender=gender,
            education=education,
            nationality=nationality,
            eligible=eligible,
        )
        with self._lock:
            if profile.profile_id in self._profiles:
                raise IngestError(f"profile {profile.profile_id!r} already exists")
            self._append({"type": "profile", "doc": asdict(profile)})
        return profile

    def create_session(
        self,
        profile_id: str,
        task_queue: Iterable[str],
        participation_mode: str = "online",
    ) -> Session:
        if participation_mode not in PARTICIPATION_MODES:
            raise ValueError(f"unknown participation mode {participation_mode!r}")
        if profile_id not in self._profiles:
            raise UnknownEntityError(f"unknown profile {profile_id!r}")
        queue = tuple(task_queue)
        unknown = [t for t in queue if t not in self._tasks]
        if unknown:
            raise UnknownEntityError(f"queue references unknown tasks: {unknown}")
        session = Session(
            session_id=uuid.uuid4().hex,
            profile_id=profile_id,
            created_at=datetime.now(timezone.utc).isoformat(),
            task_queue=queue,
            participation_mode=participation_mode,
        )
        with self._lock:
            self._append(
                {"type": "session", "doc": dict(asdict(session), task_queue=list(queue))}
            )
        return session

    def record_response(
        self,
        session_id: str,
        task_id: str,
        payload: dict,
        participation_mode: str | None = None,
    ) -> int:
        """Append a response; returns its sequence number (1-based, gapless).

        Append-only: resubmissions become new records, nothing is deduped.
        """
        session = self._sessions.get(session_id)
        if session is None:
            raise UnknownEntityError(f"unknown session {session_id!r}")
        if task_id not in self._tasks:
            raise UnknownEntityError(f"unknown task {task_id!r}")
        with self._lock:
            record = ResponseRecord(
                seq_no=len(self._responses) + 1,
                session_id=session_id,
                profile_id=session.profile_id,
                task_id=task_id,
                payload=payload,
                received_at=datetime.now(timezone.utc).isoformat(),
                participation_mode=participation_mode or session.participation_mode,
            )
            self._append({"type": "response", "doc": asdict(record)})
            return record.seq_no
