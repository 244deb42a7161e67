#!/usr/bin/env python3
"""The live-session workflow, without the HTTP layer.

A session is an append-only event log: created with its node universe,
fed slider ballots (raw ratings, normalized on arrival, last write wins),
then computed. Replaying the log from disk reproduces the snapshot
byte-for-byte, so a session directory is a self-contained, auditable
record of the vote.
"""

import tempfile
from pathlib import Path

from ppv.exports import canonical_json, registry_to_node_list
from ppv.session import ComputeOptions, SessionStore
from ppv.synthetic import family_trip_session

registry, ballots = family_trip_session()

with tempfile.TemporaryDirectory() as tmp:
    store = SessionStore(tmp)
    sid = store.create_session(registry_to_node_list(registry), session_id="trip")

    # slider ratings arrive unnormalized; the ack echoes the stored weights
    ack = store.submit_ballot(sid, "alice", {"seoul": 6, "asia": 2, "barcelona": 2})
    print("ack for alice:", ack["allocations"])

    for ballot in ballots[1:]:
        store.submit_ballot(sid, ballot.source, dict(ballot.allocations))

    # changed her mind: resubmission replaces the ballot, the log keeps both
    store.submit_ballot(sid, "alice", {"seoul": 3, "hanoi": 1})

    snapshot = store.compute(sid, ComputeOptions(include_ld_comparison=True))
    print("votes:", {k: round(v, 3) for k, v in snapshot["policy_votes"].items()})
    print("status:", store.get_session(sid).status)

    print("\nevent log:")
    for event in store.events(sid):
        print(f"  #{event.sequence} {event.kind}")

    # a fresh store finds the log on disk and replays it
    fresh = SessionStore(tmp)
    replayed = fresh.get_results("trip")
    identical = canonical_json(replayed) == canonical_json(snapshot)
    print("\nreplay reproduces the snapshot byte-for-byte:", identical)

    print("\nfiles on disk:")
    for path in sorted(Path(tmp).iterdir()):
        print(f"  {path.name} ({path.stat().st_size} bytes)")
