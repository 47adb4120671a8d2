"""Event-sourced store: ingestion, profiles, sessions, append-only responses."""

import copy
import json
import threading

import pytest

from avanegar import CorpusStore
from avanegar.store import IngestError, UnknownEntityError
from avanegar.tasks import TaskPlan, build_tasks


@pytest.fixture
def store(inv):
    return CorpusStore(inv)


@pytest.fixture
def loaded(inv, corpus_doc):
    store = CorpusStore(inv)
    store.ingest_alignment(corpus_doc)
    tasks = build_tasks(
        store.lines.values(), inv, plan=TaskPlan(seed=1, n_disambiguation=4, n_correction=1)
    )
    store.add_tasks(tasks)
    return store, tasks


# --- ingestion ---------------------------------------------------------------

def test_ingest_six_line_corpus(store, corpus_doc):
    lines = store.ingest_alignment(corpus_doc)
    assert len(lines) == 6
    assert len(store.lines) == 6
    for line in lines:
        assert " ".join(w.ipa_token for w in line.words) == line.ipa_text


def test_ingest_rejects_zero_length_window(store, corpus_doc):
    doc = copy.deepcopy(corpus_doc)
    word = doc[0]["words"][2]
    word["end_ms"] = word["start_ms"]
    with pytest.raises(IngestError, match="word 2.*start_ms"):
        store.ingest_alignment(doc)


def test_ingest_rejects_out_of_order_windows(store, corpus_doc):
    doc = copy.deepcopy(corpus_doc)
    doc[1]["words"][3]["start_ms"] = doc[1]["words"][2]["end_ms"] - 100
    with pytest.raises(IngestError, match="word 3.*before"):
        store.ingest_alignment(doc)


def test_ingest_rejects_unknown_ipa_symbol(store, corpus_doc):
    doc = copy.deepcopy(corpus_doc)
    doc[2]["words"][0]["ipa_token"] = "bZde"
    with pytest.raises(IngestError, match="word 0.*index 1"):
        store.ingest_alignment(doc)


def test_ingest_rejects_ipa_text_mismatch(store, corpus_doc):
    doc = copy.deepcopy(corpus_doc)
    doc[0]["ipa_text"] = doc[0]["ipa_text"] + "x"
    with pytest.raises(IngestError, match="space-joined"):
        store.ingest_alignment(doc)


def test_ingest_rejects_duplicate_line(store, corpus_doc):
    store.ingest_alignment(corpus_doc)
    with pytest.raises(IngestError, match="already ingested"):
        store.ingest_alignment([corpus_doc[0]])


# --- profiles ----------------------------------------------------------------

def test_profile_l1_german_is_eligible(store):
    profile = store.create_profile(l1_language="German")
    assert profile.eligible


@pytest.mark.parametrize("l1", ["Persian", "persian", "Farsi", " FARSI "])
def test_persian_l1_stored_but_flagged(store, l1):
    profile = store.create_profile(l1_language=l1)
    assert not profile.eligible
    assert store.profiles[profile.profile_id] == profile


def test_mandatory_minimum_lists_missing_fields(store):
    with pytest.raises(ValueError, match="l1_language, age, education"):
        store.create_profile(require_minimum=True)
    profile = store.create_profile(
        l1_language="French", age=30, education="BA", require_minimum=True
    )
    assert profile.eligible


# --- sessions and responses ----------------------------------------------------

def test_first_response_gets_seq_no_one(loaded):
    store, tasks = loaded
    profile = store.create_profile(l1_language="English")
    session = store.create_session(profile.profile_id, [t.id for t in tasks])
    seq_no = store.record_response(session.session_id, tasks[0].id, {"option_index": 0})
    assert seq_no == 1
    assert store.session_cursor(session.session_id) == 1


def test_resubmission_appends_new_record(loaded):
    store, tasks = loaded
    profile = store.create_profile()
    session = store.create_session(profile.profile_id, [t.id for t in tasks])
    first = store.record_response(session.session_id, tasks[0].id, {"ipa": "dæl"})
    second = store.record_response(session.session_id, tasks[0].id, {"ipa": "dæl"})
    assert (first, second) == (1, 2)
    assert len(store.responses) == 2


def test_record_response_round_trips_payload(loaded):
    store, tasks = loaded
    profile = store.create_profile()
    session = store.create_session(profile.profile_id, [t.id for t in tasks])
    payload = {"ipa": "sæmærɣænd"}
    seq_no = store.record_response(session.session_id, tasks[0].id, payload)
    stored = next(r for r in store.responses if r.seq_no == seq_no)
    assert stored.payload == payload
    assert stored.profile_id == profile.profile_id
    assert stored.participation_mode == "online"


def test_unknown_session_and_task_rejected(loaded):
    store, tasks = loaded
    profile = store.create_profile()
    session = store.create_session(profile.profile_id, [t.id for t in tasks])
    with pytest.raises(UnknownEntityError, match="session"):
        store.record_response("nope", tasks[0].id, {"option_index": 0})
    with pytest.raises(UnknownEntityError, match="task"):
        store.record_response(session.session_id, "nope", {"option_index": 0})


def test_session_requires_known_profile(loaded):
    store, tasks = loaded
    with pytest.raises(UnknownEntityError, match="profile"):
        store.create_session("ghost", [t.id for t in tasks])


def test_sessions_have_independent_cursors(loaded):
    store, tasks = loaded
    profile = store.create_profile()
    s1 = store.create_session(profile.profile_id, [t.id for t in tasks])
    s2 = store.create_session(profile.profile_id, [t.id for t in tasks])
    store.record_response(s1.session_id, tasks[0].id, {"ipa": "dæl"})
    assert store.session_cursor(s1.session_id) == 1
    assert store.session_cursor(s2.session_id) == 0


def test_concurrent_writers_get_gapless_distinct_seq_nos(loaded):
    store, tasks = loaded
    profile = store.create_profile()
    session = store.create_session(profile.profile_id, [t.id for t in tasks])
    received = []
    lock = threading.Lock()

    def submit(n):
        for _ in range(n):
            seq = store.record_response(session.session_id, tasks[0].id, {"option_index": 0})
            with lock:
                received.append(seq)

    threads = [threading.Thread(target=submit, args=(25,)) for _ in range(2)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(received) == list(range(1, 51))
    assert [r.seq_no for r in store.responses] == list(range(1, 51))


# --- persistence --------------------------------------------------------------

def test_replay_equals_state(inv, corpus_doc, tmp_path):
    path = tmp_path / "events.jsonl"
    store = CorpusStore(inv, path)
    store.ingest_alignment(corpus_doc)
    tasks = build_tasks(
        store.lines.values(), inv, plan=TaskPlan(seed=2, n_disambiguation=3, n_correction=1)
    )
    store.add_tasks(tasks)
    profile = store.create_profile(l1_language="Russian", age=40, education="MSc")
    session = store.create_session(profile.profile_id, [t.id for t in tasks], "on_site")
    store.record_response(session.session_id, tasks[0].id, {"option_index": 1})
    store.record_response(session.session_id, tasks[1].id, {"ipa": "dæl"})

    replayed = CorpusStore(inv, path)
    assert replayed.state_snapshot() == store.state_snapshot()
    # the log itself is plain JSON lines
    events = [json.loads(l) for l in path.read_text("utf-8").splitlines()]
    assert [e["type"] for e in events].count("response") == 2


def test_fresh_path_starts_empty(inv, tmp_path):
    store = CorpusStore(inv, tmp_path / "sub" / "events.jsonl")
    assert not store.lines and not store.responses
