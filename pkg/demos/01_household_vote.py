#!/usr/bin/env python3
"""A tiny household vote, end to end.

Four relatives pick a trip destination. Votes are fractional: Alice rates
Seoul highest but spreads the rest, Bob trusts Daniel and Alice with half
of his vote, Charlie leans on the parents group, and the 'asia' category
stands for two of the three destinations.
"""

import numpy as np

from ppv import build_matrix, limit_by_squaring, tally, validate
from ppv.synthetic import family_trip_session

registry, ballots = family_trip_session()

print(registry)
for ballot in ballots:
    print(f"  {ballot.source:8s} -> {ballot.allocations}")

# Assemble the column-stochastic matrix. Each column is one node's outgoing
# vote distribution; intermediary columns split equally over their members.
vote_matrix = build_matrix(registry, ballots)
print("\ncolumn sums:", np.round(vote_matrix.entries.sum(axis=0), 12))

report = validate(vote_matrix, registry)
print("valid:", report.ok)

# Propagate by repeated squaring until the distribution settles.
limit = limit_by_squaring(vote_matrix)
print(f"converged after {limit.iterations_used} squarings, residual {limit.residual:.2e}")

result = tally(limit, registry)
print("\nfinal votes (4 voters in total):")
for policy_id, votes in result.ranking():
    print(f"  {registry.node(policy_id).name:10s} {votes:.4f}")
print("delivered:", round(result.total_delivered, 12))
