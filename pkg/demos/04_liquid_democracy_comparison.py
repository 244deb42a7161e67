#!/usr/bin/env python3
"""Fractional delegation vs classic whole-vote delegation.

The same ballots run through two pipelines. The whole-vote reduction drops
category/team targets and gives each voter's entire vote to their
top-rated surviving target (ties split equally). Fractional voting spreads
mass, so its per-policy scores bunch together; winner-take-all ballots
concentrate it. The dispersion gap is reported, not asserted: it depends
on the ballots.
"""

from ppv import compare_with_ld
from ppv.synthetic import workshop_session

registry, ballots = workshop_session(seed=2023)
comparison = compare_with_ld(ballots, registry)

print(f"{'proposal':<14} {'frac':>6} {'rank':>4} {'whole':>6} {'rank':>4} {'Δrank':>6} {'Δscore':>7}")
for row in comparison.rows:
    print(
        f"{row.name:<14} {row.ppv_score:6.2f} {row.ppv_rank:>4} "
        f"{row.ld_score:6.2f} {row.ld_rank:>4} {row.delta_rank:>+6d} {row.delta_score:>+7.2f}"
    )

print(f"\nstd of fractional scores:  {comparison.ppv_std:.4f}")
print(f"std of whole-vote scores:  {comparison.ld_std:.4f}")
print("ranking domain for the reduction:", comparison.metadata["ld_ranking_domain"])
