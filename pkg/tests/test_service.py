"""HTTP API behaviour, including the no-truth-on-the-wire rule."""

import pytest
from fastapi.testclient import TestClient

from avanegar import CorpusStore
from avanegar.service import create_app, ordered_task_ids
from avanegar.tasks import TaskPlan, build_tasks

FORBIDDEN_KEYS = {"truth", "complexity", "task_class"}

PROFILE = {"l1_language": "German", "age": 28, "education": "BSc"}


@pytest.fixture
def rig(inv, corpus_doc, tmp_path):
    store = CorpusStore(inv)
    store.ingest_alignment(corpus_doc)
    tasks = build_tasks(
        store.lines.values(), inv, plan=TaskPlan(seed=3, n_disambiguation=5, n_correction=2)
    )
    store.add_tasks(tasks)
    assets = tmp_path / "assets"
    assets.mkdir()
    (assets / "hafez-g3-l1.mp3").write_bytes(bytes(range(256)) * 4)
    app = create_app(store, assets_dir=assets)
    return store, {t.id: t for t in tasks}, TestClient(app)


def start_session(client):
    profile = client.post("/api/profiles", json=PROFILE).json()
    session = client.post("/api/sessions", json={"profile_id": profile["profile_id"]}).json()
    return profile, session


def scan_for_forbidden_keys(payload, path="$"):
    found = []
    if isinstance(payload, dict):
        for key, value in payload.items():
            if key in FORBIDDEN_KEYS:
                found.append(f"{path}.{key}")
            found.extend(scan_for_forbidden_keys(value, f"{path}.{key}"))
    elif isinstance(payload, list):
        for i, value in enumerate(payload):
            found.extend(scan_for_forbidden_keys(value, f"{path}[{i}]"))
    return found


# --- profiles ----------------------------------------------------------------

def test_profile_created_with_minimum(rig):
    _, _, client = rig
    resp = client.post("/api/profiles", json=PROFILE)
    assert resp.status_code == 201
    body = resp.json()
    assert body["eligible"] is True
    assert body["profile_id"]


def test_profile_missing_fields_rejected_by_default(rig):
    _, _, client = rig
    resp = client.post("/api/profiles", json={"l1_language": "German"})
    assert resp.status_code == 422
    assert "age" in resp.json()["detail"] and "education" in resp.json()["detail"]


def test_pilot_compat_accepts_bare_profiles(inv, corpus_doc):
    store = CorpusStore(inv)
    store.ingest_alignment(corpus_doc)
    client = TestClient(create_app(store, pilot_compat=True))
    resp = client.post("/api/profiles", json={})
    assert resp.status_code == 201


def test_persian_l1_flagged_ineligible(rig):
    _, _, client = rig
    resp = client.post("/api/profiles", json={**PROFILE, "l1_language": "Persian"})
    assert resp.status_code == 201
    assert resp.json()["eligible"] is False


# --- sessions ----------------------------------------------------------------

def test_session_unknown_profile_404(rig):
    _, _, client = rig
    assert client.post("/api/sessions", json={"profile_id": "ghost"}).status_code == 404


def test_session_queue_covers_all_tasks(rig):
    store, tasks, client = rig
    _, session = start_session(client)
    assert session["total_tasks"] == len(tasks)


def test_session_without_tasks_starts_empty_and_complete(inv, corpus_doc):
    store = CorpusStore(inv)
    store.ingest_alignment(corpus_doc)
    client = TestClient(create_app(store))
    _, session = start_session(client)
    assert session["total_tasks"] == 0
    nxt = client.get(f"/api/sessions/{session['session_id']}/next")
    assert nxt.json() == {"complete": True, "remaining": 0}


def test_queue_ordered_by_complexity_ascending(rig):
    store, tasks, client = rig
    order = ordered_task_ids(store)
    complexities = [tasks[t].complexity for t in order]
    assert complexities == sorted(complexities)
    # ties fall back to the id so the order is total
    assert order == sorted(order, key=lambda t: (tasks[t].complexity, t))


def test_next_returns_easiest_task_without_advancing(rig):
    store, tasks, client = rig
    _, session = start_session(client)
    url = f"/api/sessions/{session['session_id']}/next"
    first = client.get(url).json()
    assert first["complete"] is False
    assert first["task"]["task_id"] == ordered_task_ids(store)[0]
    assert client.get(url).json() == first  # peeking twice is idempotent


def test_session_replay_same_order(rig):
    store, tasks, client = rig
    _, s1 = start_session(client)
    _, s2 = start_session(client)
    q1 = store.sessions[s1["session_id"]].task_queue
    q2 = store.sessions[s2["session_id"]].task_queue
    assert q1 == q2


# --- submit ------------------------------------------------------------------

def walk_session(client, session_id, answer):
    """Drive a session to completion with `answer(task_view) -> payload`."""
    receipts = []
    while True:
        nxt = client.get(f"/api/sessions/{session_id}/next").json()
        if nxt["complete"]:
            return receipts
        payload = answer(nxt["task"])
        resp = client.post(f"/api/sessions/{session_id}/responses",
                           json={"task_id": nxt["task"]["task_id"], **payload})
        assert resp.status_code == 201, resp.text
        receipts.append(resp.json())


def test_submit_option_advances_cursor(rig):
    store, tasks, client = rig
    _, session = start_session(client)
    sid = session["session_id"]
    nxt = client.get(f"/api/sessions/{sid}/next").json()
    task_id = nxt["task"]["task_id"]
    payload = {"option_index": 0} if nxt["task"]["options"] else {"ipa": nxt["task"]["displayed"]}
    resp = client.post(f"/api/sessions/{sid}/responses", json={"task_id": task_id, **payload})
    assert resp.status_code == 201
    body = resp.json()
    assert body["seq_no"] == 1
    assert body["remaining"] == session["total_tasks"] - 1
    after = client.get(f"/api/sessions/{sid}/next").json()
    assert after["task"]["task_id"] != task_id


def test_submit_typed_ipa_stored_as_given(rig):
    store, tasks, client = rig
    _, session = start_session(client)
    sid = session["session_id"]
    nxt = client.get(f"/api/sessions/{sid}/next").json()
    resp = client.post(
        f"/api/sessions/{sid}/responses",
        json={"task_id": nxt["task"]["task_id"], "ipa": "dæl"},
    )
    assert resp.status_code == 201
    assert store.responses[-1].payload == {"ipa": "dæl"}


def test_submit_stale_task_conflicts(rig):
    store, tasks, client = rig
    _, session = start_session(client)
    sid = session["session_id"]
    queue = store.sessions[sid].task_queue
    resp = client.post(f"/api/sessions/{sid}/responses",
                       json={"task_id": queue[1], "option_index": 0})
    assert resp.status_code == 409


def test_submit_bad_ipa_reports_position(rig):
    _, _, client = rig
    _, session = start_session(client)
    sid = session["session_id"]
    nxt = client.get(f"/api/sessions/{sid}/next").json()
    resp = client.post(
        f"/api/sessions/{sid}/responses",
        json={"task_id": nxt["task"]["task_id"], "ipa": "dæZl"},
    )
    assert resp.status_code == 422
    detail = resp.json()["detail"]
    assert detail["position"] == 2
    assert detail["symbol"] == "Z"


def test_submit_requires_exactly_one_answer_form(rig):
    _, _, client = rig
    _, session = start_session(client)
    sid = session["session_id"]
    nxt = client.get(f"/api/sessions/{sid}/next").json()
    tid = nxt["task"]["task_id"]
    assert client.post(f"/api/sessions/{sid}/responses", json={"task_id": tid}).status_code == 422
    assert client.post(
        f"/api/sessions/{sid}/responses",
        json={"task_id": tid, "option_index": 0, "ipa": "dæl"},
    ).status_code == 422


def test_completing_all_tasks_reaches_complete_marker(rig):
    store, tasks, client = rig
    _, session = start_session(client)
    receipts = walk_session(
        client, session["session_id"],
        lambda view: {"option_index": 0} if view["options"] else {"ipa": view["displayed"]},
    )
    assert len(receipts) == session["total_tasks"]
    assert receipts[-1]["complete"] is True
    final = client.get(f"/api/sessions/{session['session_id']}/next").json()
    assert final == {"complete": True, "remaining": 0}
    # submitting past the end conflicts
    resp = client.post(
        f"/api/sessions/{session['session_id']}/responses",
        json={"task_id": receipts and store.sessions[session["session_id"]].task_queue[0], "option_index": 0},
    )
    assert resp.status_code == 409


def test_participation_mode_header(rig):
    store, _, client = rig
    profile = client.post("/api/profiles", json=PROFILE).json()
    session = client.post(
        "/api/sessions",
        json={"profile_id": profile["profile_id"]},
        headers={"X-Participation-Mode": "on_site"},
    ).json()
    sid = session["session_id"]
    nxt = client.get(f"/api/sessions/{sid}/next").json()
    client.post(f"/api/sessions/{sid}/responses",
                json={"task_id": nxt["task"]["task_id"], "ipa": "dæl"})
    assert store.responses[-1].participation_mode == "on_site"


# --- lines and audio -----------------------------------------------------------

def test_line_view_shows_displayed_forms(rig):
    store, tasks, client = rig
    body = client.get("/api/lines").json()
    assert len(body) == 6
    by_id = {l["line_id"]: l for l in body}
    for task in tasks.values():
        line = by_id[task.word_ref.line_id]
        word = line["words"][task.word_ref.word_index]
        assert word["ipa_token"] == task.displayed.source_text
        assert word["has_task"] is True
    for line in body:
        assert line["ipa_text"] == " ".join(w["ipa_token"] for w in line["words"])


def test_single_line_fetch_and_404(rig):
    _, _, client = rig
    assert client.get("/api/lines/hafez-g3-l1").status_code == 200
    assert client.get("/api/lines/nope").status_code == 404


def test_audio_full_and_range_requests(rig):
    _, _, client = rig
    full = client.get("/api/audio/hafez-g3-l1.mp3")
    assert full.status_code == 200
    assert full.headers["accept-ranges"] == "bytes"
    assert len(full.content) == 1024

    part = client.get("/api/audio/hafez-g3-l1.mp3", headers={"Range": "bytes=10-19"})
    assert part.status_code == 206
    assert part.headers["content-range"] == "bytes 10-19/1024"
    assert part.content == bytes(range(256))[10:20]

    tail = client.get("/api/audio/hafez-g3-l1.mp3", headers={"Range": "bytes=-16"})
    assert tail.status_code == 206
    assert tail.headers["content-range"] == "bytes 1008-1023/1024"

    open_end = client.get("/api/audio/hafez-g3-l1.mp3", headers={"Range": "bytes=1000-"})
    assert open_end.status_code == 206
    assert len(open_end.content) == 24

    assert client.get("/api/audio/missing.mp3").status_code == 404
    bad = client.get("/api/audio/hafez-g3-l1.mp3", headers={"Range": "bytes=2048-3000"})
    assert bad.status_code == 416


# --- hygiene and export ---------------------------------------------------------

def test_no_endpoint_leaks_truth_complexity_or_class(rig):
    store, tasks, client = rig
    profile, session = start_session(client)
    sid = session["session_id"]
    nxt = client.get(f"/api/sessions/{sid}/next").json()
    submit = client.post(
        f"/api/sessions/{sid}/responses",
        json={"task_id": nxt["task"]["task_id"], "ipa": "dæl"},
    ).json()
    payloads = {
        "profile": profile,
        "session": session,
        "next": nxt,
        "submit": submit,
        "lines": client.get("/api/lines").json(),
        "line": client.get("/api/lines/hafez-g3-l2").json(),
        "intro": client.get("/api/intro").json(),
        "inventory": client.get("/api/inventory").json(),
    }
    for name, payload in payloads.items():
        assert scan_for_forbidden_keys(payload) == [], name


def test_export_csv_header_and_media_type(rig):
    store, tasks, client = rig
    _, session = start_session(client)
    walk_session(
        client, session["session_id"],
        lambda view: {"option_index": 0} if view["options"] else {"ipa": view["displayed"]},
    )
    resp = client.get("/api/export.csv")
    assert resp.status_code == 200
    assert resp.headers["content-type"].startswith("text/csv")
    lines = resp.text.strip().splitlines()
    assert lines[0] == "task_id,pwld,word_length,existence_code,n_responses,n_incorrect,error_rate,weight"
    assert len(lines) == 1 + len(tasks)


def test_ui_mount_serves_client_without_shadowing_api(inv, corpus_doc, tmp_path):
    ui = tmp_path / "dist"
    ui.mkdir()
    (ui / "index.html").write_text("<!doctype html><title>avanegar</title>", encoding="utf-8")
    store = CorpusStore(inv)
    store.ingest_alignment(corpus_doc)
    client = TestClient(create_app(store, ui_dir=ui))
    assert client.get("/").status_code == 200
    assert "avanegar" in client.get("/").text
    assert client.get("/api/lines").status_code == 200


def test_export_skips_unfinished_sessions_by_default(rig):
    store, tasks, client = rig
    _, session = start_session(client)
    sid = session["session_id"]
    nxt = client.get(f"/api/sessions/{sid}/next").json()
    client.post(f"/api/sessions/{sid}/responses",
                json={"task_id": nxt["task"]["task_id"], "ipa": "dæl"})
    resp = client.get("/api/export.csv")
    assert resp.text.strip().splitlines() == [
        "task_id,pwld,word_length,existence_code,n_responses,n_incorrect,error_rate,weight"
    ]
