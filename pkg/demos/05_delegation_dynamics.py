#!/usr/bin/env python3
"""Multi-period delegation under a CES utility.

Six voters re-decide every period how to split one vote between direct
voting and delegation. Weights pull toward expertise and preference
similarity with a little momentum; votes are redistributed, the engine
tallies the round, and preferences drift toward whatever got funded.
Watch the incoming delegation concentrate on the designated expert.
"""

import numpy as np

from ppv import GParams, FeedbackParams, SimulationConfig, VoterProfile, make_registry, run_simulation

rng = np.random.default_rng(7)
voters = [f"v{i}" for i in range(1, 7)]
policies = ["parks", "transit", "wifi"]
registry = make_registry(voters=voters, policies=policies)

profiles = {}
for v in voters:
    expertise = {u: 0.5 for u in voters}
    expertise["v1"] = 3.0  # everyone considers v1 the expert
    profiles[v] = VoterProfile(
        preference=rng.random(3) * 4,
        expertise=expertise,
        theta=1.0,
        rho=0.5,
        beta=0.8,
        gamma=0.2,
    )

config = SimulationConfig(
    periods=6,
    profiles=profiles,
    g_params=GParams(w_e=1.0, w_f=0.5, momentum=0.3),
    feedback=FeedbackParams(mu=0.15, outcome_size=1),
)

result = run_simulation(config, registry)

print(f"{'k':>2} {'v1 incoming':>12} {'mean utility':>13} {'funded':>8} {'round tally'}")
for state in result.states:
    mean_u = float(np.mean(list(state.utilities.values())))
    tally_str = ", ".join(f"{p}={v:.2f}" for p, v in state.tally.ranking())
    print(
        f"{state.period:>2} {state.incoming['v1']:>12.3f} {mean_u:>13.4f} "
        f"{state.outcome[0]:>8} {tally_str}"
    )

final = result.states[-1]
print("\ncumulative utilities:")
for v in voters:
    print(f"  {v}: {final.cumulative[v]:.4f}")
