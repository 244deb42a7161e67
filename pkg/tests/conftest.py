import pytest

from ppv import Ballot, Node, NodeKind, NodeRegistry
from ppv.synthetic import family_trip_session, random_session, workshop_session


@pytest.fixture(scope="session")
def family_trip():
    return family_trip_session()


@pytest.fixture(scope="session")
def workshop():
    return workshop_session(seed=2023)


@pytest.fixture
def two_voter_session():
    """Two voters delegating half to each other, half to their own policy."""
    registry = NodeRegistry(
        [
            Node("a", NodeKind.VOTER),
            Node("b", NodeKind.VOTER),
            Node("p1", NodeKind.POLICY),
            Node("p2", NodeKind.POLICY),
        ]
    )
    ballots = [
        Ballot("a", {"b": 0.5, "p1": 0.5}),
        Ballot("b", {"a": 0.5, "p2": 0.5}),
    ]
    return registry, ballots


@pytest.fixture
def direct_vote_session():
    """One voter, one policy, full direct vote."""
    registry = NodeRegistry([Node("v", NodeKind.VOTER), Node("p", NodeKind.POLICY)])
    return registry, [Ballot("v", {"p": 1.0})]


def support_reaches_policy(registry, ballots, strategy_members=True):
    """Independent reachability oracle: plain breadth-first search over the
    ballot/membership support graph, no matrix involved."""
    out_edges = {}
    for b in ballots:
        out_edges[b.source] = {t for t, w in b.allocations.items() if w > 0.0}
    if strategy_members:
        for inter in registry.intermediaries:
            out_edges.setdefault(inter.id, set(registry.members_of(inter.id)))
    policy_ids = {p.id for p in registry.policies}
    reaches = set(policy_ids)
    changed = True
    while changed:
        changed = False
        for node, targets in out_edges.items():
            if node not in reaches and targets & reaches:
                reaches.add(node)
                changed = True
    return reaches


@pytest.fixture
def reachability_oracle():
    return support_reaches_policy


def make_random_session(seed, min_nodes=3, max_nodes=60):
    return random_session(seed, min_nodes=min_nodes, max_nodes=max_nodes)


@pytest.fixture
def random_sessions():
    return make_random_session
