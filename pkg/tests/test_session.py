import json

import pytest

from ppv import (
    InvalidRegistry,
    MissingBallot,
    NoConvergence,
    NotComputed,
    UnknownSession,
    UnknownSource,
    ZeroMassBallot,
)
from ppv.exports import canonical_json, registry_to_node_list
from ppv.session import ComputeOptions, SessionStore, replay_events
from ppv.synthetic import workshop_session


WORKSHOP_NODES = None


def workshop_nodes():
    global WORKSHOP_NODES
    if WORKSHOP_NODES is None:
        registry, _ = workshop_session(seed=2023)
        WORKSHOP_NODES = registry_to_node_list(registry)
    return WORKSHOP_NODES


def trip_nodes():
    return [
        {"id": "alice", "kind": "voter", "name": "Alice"},
        {"id": "bob", "kind": "voter", "name": "Bob"},
        {"id": "asia", "kind": "intermediary", "members": ["seoul", "hanoi"]},
        {"id": "seoul", "kind": "policy", "name": "Seoul"},
        {"id": "hanoi", "kind": "policy", "name": "Hanoi"},
    ]


def test_create_workshop_shaped_session(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(workshop_nodes())
    session = store.get_session(sid)
    assert len(session.registry.voters) == 69
    assert len(session.registry.intermediaries) == 14  # 10 teams + 4 categories
    assert len(session.registry.policies) == 20
    assert session.status == "open"


def test_create_rejects_empty_policy_list(tmp_path):
    store = SessionStore(tmp_path)
    with pytest.raises(InvalidRegistry):
        store.create_session([{"id": "v", "kind": "voter"}])


def test_create_rejects_duplicate_ids(tmp_path):
    store = SessionStore(tmp_path)
    with pytest.raises(InvalidRegistry):
        store.create_session(
            [
                {"id": "x", "kind": "voter"},
                {"id": "x", "kind": "policy"},
            ]
        )


def test_submit_normalizes_slider_ratings(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes())
    ack = store.submit_ballot(sid, "alice", {"seoul": 3, "hanoi": 2})
    assert ack["allocations"] == {"seoul": 0.6, "hanoi": 0.4}


def test_submit_accepts_decimal_strings(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes())
    ack = store.submit_ballot(sid, "alice", {"seoul": "0.25", "hanoi": "0.75"})
    assert ack["allocations"] == {"seoul": 0.25, "hanoi": 0.75}


def test_resubmission_replaces_but_log_keeps_both(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes())
    store.submit_ballot(sid, "alice", {"seoul": 1})
    store.submit_ballot(sid, "alice", {"hanoi": 1})
    session = store.get_session(sid)
    assert session.ballots["alice"].allocations == {"hanoi": 1.0}
    ballot_events = [e for e in store.events(sid) if e.kind == "BallotSubmitted"]
    assert len(ballot_events) == 2


def test_policy_source_rejected_as_unknown_source(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes())
    with pytest.raises(UnknownSource):
        store.submit_ballot(sid, "seoul", {"hanoi": 1.0})
    with pytest.raises(UnknownSource):
        store.submit_ballot(sid, "ghost", {"hanoi": 1.0})


def test_zero_mass_submission_rejected(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes())
    with pytest.raises(ZeroMassBallot):
        store.submit_ballot(sid, "alice", {"seoul": 0})


def test_unknown_session(tmp_path):
    store = SessionStore(tmp_path)
    with pytest.raises(UnknownSession):
        store.submit_ballot("nope", "alice", {"seoul": 1})


def test_compute_full_session_and_status_flow(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes())
    store.submit_ballot(sid, "alice", {"seoul": 3, "bob": 1})
    store.submit_ballot(sid, "bob", {"asia": 1, "hanoi": 1})
    snapshot = store.compute(sid, ComputeOptions(include_ld_comparison=True))
    assert store.get_session(sid).status == "computed"
    total = sum(snapshot["policy_votes"].values())
    assert total == pytest.approx(2.0, abs=1e-9)
    assert snapshot["ld_comparison"] is not None
    # new ballot reopens the session and clears the snapshot
    store.submit_ballot(sid, "alice", {"hanoi": 1})
    assert store.get_session(sid).status == "open"
    with pytest.raises(NotComputed):
        store.get_results(sid)


def test_compute_workshop_conserves_69_votes(tmp_path, workshop):
    registry, ballots = workshop
    store = SessionStore(tmp_path)
    sid = store.create_session(registry_to_node_list(registry))
    for ballot in ballots:
        store.submit_ballot(sid, ballot.source, dict(ballot.allocations))
    snapshot = store.compute(sid)
    total = sum(snapshot["policy_votes"].values()) + sum(snapshot["undelivered"].values())
    assert total == pytest.approx(69.0, abs=1e-9)


def test_closed_cycle_reported_in_snapshot(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(
        [
            {"id": "a", "kind": "voter"},
            {"id": "b", "kind": "voter"},
            {"id": "p", "kind": "policy"},
        ]
    )
    store.submit_ballot(sid, "a", {"b": 1})
    store.submit_ballot(sid, "b", {"a": 1})
    snapshot = store.compute(sid)
    assert set(snapshot["undelivered"]) == {"a", "b"}
    assert set(snapshot["validation"]["unreachable_voters"]) == {"a", "b"}
    assert snapshot["influence"]["excluded"] == ["a", "b"]


def test_abstention_excluded_from_denominator(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes())
    store.submit_ballot(sid, "alice", {"seoul": 1})
    snapshot = store.compute(sid)  # bob abstains
    assert snapshot["diagnostics"]["absent_voters"] == ["bob"]
    assert snapshot["tally"]["voters_counted"] == 1
    assert sum(snapshot["policy_votes"].values()) == pytest.approx(1.0, abs=1e-9)


def test_abstention_prunes_delegations_to_absent_voter(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes())
    store.submit_ballot(sid, "alice", {"seoul": 1, "bob": 1})
    snapshot = store.compute(sid)
    assert snapshot["diagnostics"]["pruned_targets"] == {"alice": ["bob"]}
    assert snapshot["policy_votes"]["seoul"] == pytest.approx(1.0, abs=1e-9)


def test_abstention_can_be_disallowed(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes())
    store.submit_ballot(sid, "alice", {"seoul": 1})
    with pytest.raises(MissingBallot):
        store.compute(sid, ComputeOptions(allow_abstentions=False))


def test_normalized_resubmission_changes_nothing(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes())
    first = store.submit_ballot(sid, "alice", {"seoul": 3, "hanoi": 2})
    second = store.submit_ballot(sid, "alice", first["allocations"])
    assert first == second


# --- event log and replay ---------------------------------------------------------

def test_event_sequence_strictly_increasing(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes())
    store.submit_ballot(sid, "alice", {"seoul": 1})
    store.submit_ballot(sid, "bob", {"hanoi": 1})
    store.compute(sid)
    sequences = [e.sequence for e in store.events(sid)]
    assert sequences == sorted(sequences)
    assert len(set(sequences)) == len(sequences)


def test_replay_reproduces_snapshot_byte_for_byte(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes(), session_id="replayme")
    store.submit_ballot(sid, "alice", {"seoul": 5, "bob": 2})
    store.submit_ballot(sid, "bob", {"asia": 3, "hanoi": 4})
    snapshot = store.compute(sid, ComputeOptions(include_ld_comparison=True))
    stored_bytes = (tmp_path / "replayme.snapshot.json").read_text(encoding="utf-8")

    fresh = SessionStore(tmp_path)  # replays the log from disk
    replayed = fresh.get_results(sid)
    assert canonical_json(replayed) + "\n" == stored_bytes
    assert canonical_json(replayed) == canonical_json(snapshot)


def test_replay_events_reconstructs_state(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes())
    store.submit_ballot(sid, "alice", {"seoul": 1})
    store.submit_ballot(sid, "alice", {"hanoi": 1})
    session = replay_events(store.events(sid))
    assert session.ballots["alice"].allocations == {"hanoi": 1.0}
    assert session.status == "open"


def test_event_log_is_json_lines(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes(), session_id="rawlog")
    store.submit_ballot(sid, "alice", {"seoul": 1})
    lines = (tmp_path / "rawlog.events.jsonl").read_text().strip().splitlines()
    kinds = [json.loads(line)["kind"] for line in lines]
    assert kinds == ["SessionCreated", "BallotSubmitted"]


def test_add_node_event(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes())
    store.add_node(sid, {"id": "charlie", "kind": "voter", "name": "Charlie"})
    assert "charlie" in store.get_session(sid).registry
    fresh = SessionStore(tmp_path)
    assert "charlie" in fresh.get_session(sid).registry


# --- exports -------------------------------------------------------------------------

def test_export_before_compute_raises(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes())
    with pytest.raises(NotComputed):
        store.export(sid, "json")


def test_export_byte_stable_and_format_parity(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes())
    store.submit_ballot(sid, "alice", {"seoul": 3, "hanoi": 1})
    store.submit_ballot(sid, "bob", {"hanoi": 1})
    store.compute(sid)
    json_a = store.export(sid, "json")
    json_b = store.export(sid, "json")
    assert json_a == json_b
    doc = json.loads(json_a)
    csv_text = store.export(sid, "csv", table="results")
    # same numbers in both formats
    for line in csv_text.strip().splitlines()[1:]:
        _, policy_id, _, votes = line.split(",")
        assert float(votes) == doc["policy_votes"][policy_id]


def test_influence_export_sorted_descending(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(trip_nodes())
    store.submit_ballot(sid, "alice", {"seoul": 1, "bob": 1})
    store.submit_ballot(sid, "bob", {"hanoi": 1})
    store.compute(sid)
    influence = store.get_influence(sid)
    scores = [influence["scores"][nid] for nid in influence["ranking"]]
    assert scores == sorted(scores, reverse=True)
    csv_lines = store.export(sid, "csv", table="influence").strip().splitlines()[1:]
    csv_scores = [float(line.split(",")[4]) for line in csv_lines]
    assert csv_scores == scores


def test_odd_cycle_failure_names_stranded_nodes(tmp_path):
    store = SessionStore(tmp_path)
    sid = store.create_session(
        [
            {"id": "a", "kind": "voter"},
            {"id": "b", "kind": "voter"},
            {"id": "c", "kind": "voter"},
            {"id": "p", "kind": "policy"},
        ]
    )
    store.submit_ballot(sid, "a", {"b": 1})
    store.submit_ballot(sid, "b", {"c": 1})
    store.submit_ballot(sid, "c", {"a": 1})
    with pytest.raises(NoConvergence) as excinfo:
        store.compute(sid)
    assert set(excinfo.value.stranded) == {"a", "b", "c"}
    assert "a" in str(excinfo.value)
