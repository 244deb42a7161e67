#!/usr/bin/env python3
"""A workshop-scale budget session.

69 participants sit in 10 teams and rate 20 proposals grouped into 4
categories. Ratings come from sliders, so ballots arrive as raw integers
and are normalized per voter. One person, one vote: the tally always adds
up to the number of ballot-holding voters, however tangled the delegation.
"""

import time

from ppv import build_matrix, limit_by_fundamental, limit_by_squaring, tally
from ppv.synthetic import workshop_session

registry, ballots = workshop_session(seed=2023)
print(registry)

start = time.perf_counter()
vote_matrix = build_matrix(registry, ballots)
limit = limit_by_squaring(vote_matrix)
result = tally(limit, registry)
elapsed = time.perf_counter() - start

print(f"\nsolved in {elapsed * 1000:.1f} ms "
      f"({limit.iterations_used} squarings, residual {limit.residual:.1e})")
print(f"votes delivered: {result.total_delivered:.9f} "
      f"(+ {sum(result.undelivered.values()):.1e} undelivered)")

print("\ntop 10 proposals:")
for rank, (policy_id, votes) in enumerate(result.ranking()[:10], start=1):
    print(f"  {rank:2d}. {registry.node(policy_id).name:14s} {votes:.2f}")

# Cross-check with the independent absorbing-chain identity.
import numpy as np

alt = limit_by_fundamental(vote_matrix)
print("\ncross-method gap:", np.max(np.abs(limit.entries - alt.entries)))
