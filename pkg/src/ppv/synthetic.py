"""Seeded synthetic sessions for demos, benchmarks, and verification.

All generators are deterministic in their seed and guarantee that every
transient node can reach a policy, so both solver routes apply.
"""

from __future__ import annotations

import numpy as np

from .ballots import Ballot
from .matrix import EqualSplit, build_matrix, nodes_reaching_policies
from .registry import Node, NodeKind, NodeRegistry


def _ensure_reachability(
    registry: NodeRegistry,
    ballots: list[Ballot],
    rng: np.random.Generator,
) -> list[Ballot]:
    """Patch stranded ballots with a direct policy edge until all mass drains."""
    policy_ids = [n.id for n in registry.policies]
    by_source = {b.source: b for b in ballots}
    for _ in range(len(registry) + 1):
        vm = build_matrix(registry, list(by_source.values()), EqualSplit())
        reached = nodes_reaching_policies(vm.entries, vm.block)
        stranded = [
            registry.ids[t]
            for t in vm.block.transient
            if not reached[t] and registry.ids[t] in by_source
        ]
        if not all(reached[t] for t in vm.block.transient):
            if not stranded:
                break  # stranded nodes have no ballot of their own to patch
            for node_id in stranded:
                old = by_source[node_id]
                target = policy_ids[int(rng.integers(0, len(policy_ids)))]
                patched = dict(old.allocations)
                patched[target] = patched.get(target, 0.0) + max(old.total, 1.0) * 0.25
                by_source[node_id] = Ballot(node_id, patched)
            continue
        return list(by_source.values())
    return list(by_source.values())


def random_session(
    seed: int,
    min_nodes: int = 3,
    max_nodes: int = 200,
    explicit_intermediary_rate: float = 0.2,
) -> tuple[NodeRegistry, list[Ballot]]:
    """Random fully-reachable session: voters, optional intermediaries, policies.

    Node counts, membership, and fractional ballots are all drawn from the
    seeded generator; ballots are patched afterwards so that every voter
    and every ballot-casting intermediary reaches some policy.
    """
    rng = np.random.default_rng(seed)
    total = int(rng.integers(min_nodes, max_nodes + 1))
    n_policies = 1 + int(rng.integers(0, max(1, total // 3)))
    n_policies = min(n_policies, total - 1)
    remaining = total - n_policies
    n_voters = 1 + int(rng.integers(0, remaining))
    n_inters = remaining - n_voters

    voters = [f"v{k:03d}" for k in range(n_voters)]
    inters = [f"g{k:03d}" for k in range(n_inters)]
    policies = [f"p{k:03d}" for k in range(n_policies)]

    membership: dict[str, list[str]] = {}
    for k, gid in enumerate(inters):
        # members may be voters, policies, or later intermediaries (no cycles)
        pool = voters + policies + inters[k + 1 :]
        count = int(rng.integers(1, min(5, len(pool)) + 1))
        picks = rng.choice(len(pool), size=count, replace=False)
        membership[gid] = [pool[i] for i in sorted(picks)]

    nodes = (
        [Node(v, NodeKind.VOTER) for v in voters]
        + [Node(g, NodeKind.INTERMEDIARY) for g in inters]
        + [Node(p, NodeKind.POLICY) for p in policies]
    )
    registry = NodeRegistry(nodes, membership)

    all_ids = voters + inters + policies
    ballots: list[Ballot] = []
    for v in voters:
        candidates = [t for t in all_ids if t != v]
        count = int(rng.integers(1, min(6, len(candidates)) + 1))
        picks = rng.choice(len(candidates), size=count, replace=False)
        weights = 0.05 + rng.random(count)
        ballots.append(
            Ballot(v, {candidates[i]: float(w) for i, w in zip(sorted(picks), weights)})
        )
    for g in inters:
        if rng.random() < explicit_intermediary_rate:
            candidates = [t for t in all_ids if t != g]
            count = int(rng.integers(1, min(4, len(candidates)) + 1))
            picks = rng.choice(len(candidates), size=count, replace=False)
            weights = 0.05 + rng.random(count)
            ballots.append(
                Ballot(g, {candidates[i]: float(w) for i, w in zip(sorted(picks), weights)})
            )

    ballots = _ensure_reachability(registry, ballots, rng)
    return registry, ballots


def workshop_session(seed: int = 2023) -> tuple[NodeRegistry, list[Ballot]]:
    """Synthetic workshop-scale session: 69 voters in 10 teams rating 20
    proposals grouped into 4 categories.

    Slider-style integer ratings (0..10) over proposals, categories, teams,
    and peers, all drawn from the seed; the session shape is fixed, the
    ballots are synthetic.
    """
    rng = np.random.default_rng(seed)
    voters = [f"v{k:02d}" for k in range(1, 70)]
    teams = [f"team{k:02d}" for k in range(1, 11)]
    categories = [f"cat{k}" for k in range(1, 5)]
    proposals = [f"prop{k:02d}" for k in range(1, 21)]

    membership: dict[str, list[str]] = {}
    cursor = 0
    for k, team in enumerate(teams):
        size = 7 if k < 9 else 6
        membership[team] = voters[cursor : cursor + size]
        cursor += size
    for k, cat in enumerate(categories):
        membership[cat] = proposals[5 * k : 5 * (k + 1)]

    nodes = (
        [Node(v, NodeKind.VOTER, f"Participant {v[1:]}") for v in voters]
        + [Node(t, NodeKind.INTERMEDIARY, f"Team {t[4:]}") for t in teams]
        + [Node(c, NodeKind.INTERMEDIARY, f"Category {c[3:]}") for c in categories]
        + [Node(p, NodeKind.POLICY, f"Proposal {p[4:]}") for p in proposals]
    )
    registry = NodeRegistry(nodes, membership)

    ballots: list[Ballot] = []
    for v in voters:
        ratings: dict[str, float] = {}
        for prop in proposals:
            if rng.random() < 0.45:
                ratings[prop] = float(rng.integers(1, 11))
        for cat in categories:
            if rng.random() < 0.30:
                ratings[cat] = float(rng.integers(1, 11))
        for team in teams:
            if rng.random() < 0.20:
                ratings[team] = float(rng.integers(1, 11))
        for peer in voters:
            if peer != v and rng.random() < 0.04:
                ratings[peer] = float(rng.integers(1, 11))
        if not any(t in ratings for t in proposals):
            # keep the whole-vote reduction total: every ballot needs at
            # least one non-intermediary target
            ratings[proposals[int(rng.integers(0, len(proposals)))]] = float(rng.integers(1, 11))
        ballots.append(Ballot(v, ratings))

    ballots = _ensure_reachability(registry, ballots, rng)
    return registry, ballots


def family_trip_session() -> tuple[NodeRegistry, list[Ballot]]:
    """Small fixed session: four relatives, a parents group, three
    destinations, and an 'asia' category over two of them."""
    nodes = [
        Node("alice", NodeKind.VOTER, "Alice"),
        Node("bob", NodeKind.VOTER, "Bob"),
        Node("charlie", NodeKind.VOTER, "Charlie"),
        Node("daniel", NodeKind.VOTER, "Daniel"),
        Node("parents", NodeKind.INTERMEDIARY, "Parents"),
        Node("asia", NodeKind.INTERMEDIARY, "Asia"),
        Node("seoul", NodeKind.POLICY, "Seoul"),
        Node("hanoi", NodeKind.POLICY, "Hanoi"),
        Node("barcelona", NodeKind.POLICY, "Barcelona"),
    ]
    membership = {
        "parents": ["alice", "bob"],
        "asia": ["seoul", "hanoi"],
    }
    registry = NodeRegistry(nodes, membership)
    ballots = [
        Ballot("alice", {"seoul": 0.6, "asia": 0.2, "barcelona": 0.2}),
        Ballot("bob", {"hanoi": 0.5, "daniel": 0.3, "alice": 0.2}),
        Ballot("charlie", {"parents": 0.5, "barcelona": 0.3, "asia": 0.2}),
        Ballot("daniel", {"seoul": 0.4, "hanoi": 0.3, "charlie": 0.3}),
    ]
    return registry, ballots
