#!/usr/bin/env python3
"""Capture service responses as frontend test fixtures.

Runs the real session service in-process and records exact response bytes,
so the vitest suite checks the client against the service's actual wire
behavior without needing a live server. Regenerate after changing the
service:

    python frontend/scripts/generate_fixtures.py
"""

import json
import random
from pathlib import Path

from fastapi.testclient import TestClient

from ppv.exports import registry_to_node_list
from ppv.service import create_app
from ppv.session import SessionStore
from ppv.synthetic import workshop_session

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def generate_normalization_parity(client: TestClient, nodes, session_id: str) -> dict:
    rng = random.Random(20230415)
    voter_ids = [n["id"] for n in nodes if n["kind"] == "voter"]
    target_ids = [n["id"] for n in nodes]
    cases = []
    for case_index in range(100):
        source = voter_ids[case_index % len(voter_ids)]
        candidates = [t for t in target_ids if t != source]
        count = rng.randint(1, 15)
        picked = rng.sample(candidates, count)
        ratings = {t: rng.randint(0, 100) for t in picked}
        if all(v == 0 for v in ratings.values()):
            ratings[picked[0]] = rng.randint(1, 100)
        if case_index % 10 == 0:
            ratings = {picked[0]: rng.randint(1, 100)}  # single-slider: weight 1.0
        response = client.post(
            f"/sessions/{session_id}/ballots",
            json={"source": source, "allocations": ratings},
        )
        assert response.status_code == 200, response.text
        cases.append(
            {
                "source": source,
                "ratings": ratings,
                "ack_text": response.text,
                "ack": response.json(),
            }
        )
    return {"cases": cases}


def generate_session_roundtrip(client: TestClient, nodes, session_id: str) -> dict:
    ratings = {"prop01": 6, "cat1": 2, "team01": 1, "v02": 1}
    first = client.post(
        f"/sessions/{session_id}/ballots",
        json={"source": "v01", "allocations": ratings},
    )
    assert first.status_code == 200, first.text
    resubmit = client.post(
        f"/sessions/{session_id}/ballots",
        json={"source": "v01", "allocations": first.json()["allocations"]},
    )
    assert resubmit.status_code == 200, resubmit.text

    compute = client.post(
        f"/sessions/{session_id}/compute", json={"include_ld_comparison": True}
    )
    assert compute.status_code == 200, compute.text
    results = client.get(f"/sessions/{session_id}/results")
    assert results.status_code == 200

    return {
        "nodes": nodes,
        "submitted_ratings": ratings,
        "ack_text": first.text,
        "ack": first.json(),
        "resubmit_ack_text": resubmit.text,
        "results": results.json(),
    }


def main() -> None:
    registry, ballots = workshop_session(seed=2023)
    nodes = registry_to_node_list(registry)

    store = SessionStore()  # in-memory
    client = TestClient(create_app(store))

    created = client.post("/sessions", json={"nodes": nodes, "session_id": "fixture"})
    assert created.status_code == 201, created.text

    # seed every voter so compute() has a full session
    for ballot in ballots:
        response = client.post(
            "/sessions/fixture/ballots",
            json={"source": ballot.source, "allocations": dict(ballot.allocations)},
        )
        assert response.status_code == 200, response.text

    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    parity = generate_normalization_parity(client, nodes, "fixture")
    (FIXTURE_DIR / "normalization_parity.json").write_text(
        json.dumps(parity, indent=1), encoding="utf-8"
    )

    roundtrip = generate_session_roundtrip(client, nodes, "fixture")
    (FIXTURE_DIR / "session_roundtrip.json").write_text(
        json.dumps(roundtrip, indent=1), encoding="utf-8"
    )
    print(f"wrote fixtures to {FIXTURE_DIR}")


if __name__ == "__main__":
    main()
