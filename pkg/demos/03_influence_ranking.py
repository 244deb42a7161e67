#!/usr/bin/env python3
"""Who actually moved this vote?

The net proxy vote counts all the mass that flowed through a node over the
whole propagation, normalized by the node's self-return mass so delegation
cycles cannot inflate it. The floor is 1.0: your own vote, nothing
delegated to you. Categories and teams usually dominate, because whole
blocks of voters route mass through them.
"""

from ppv import build_matrix, influence_report, net_proxy_vote, net_proxy_vote_rank_one
from ppv.synthetic import workshop_session

registry, ballots = workshop_session(seed=2023)
vote_matrix = build_matrix(registry, ballots)
report = influence_report(vote_matrix, registry)

print("top 15 nodes by influence:")
print(f"{'rank':>4}  {'name':<16} {'score':>7}  type")
for rank, node_id in enumerate(report.ranking[:15], start=1):
    node = registry.node(node_id)
    print(f"{rank:>4}  {node.name:<16} {report.scores[node_id]:7.3f}  {node.kind.value}")

floor = [n for n, s in report.scores.items() if abs(s - 1.0) <= 1e-12]
print(f"\n{len(floor)} nodes at the floor 1.0 (nobody delegated to them)")

# Two independent routes to the same score: the fundamental matrix of the
# transient block, and the rank-one column-zeroing trick.
sample = report.ranking[0]
a = net_proxy_vote(vote_matrix, sample)
b = net_proxy_vote_rank_one(vote_matrix, sample)
print(f"\n{registry.node(sample).name}: fundamental route {a:.12f}, rank-one route {b:.12f}")
