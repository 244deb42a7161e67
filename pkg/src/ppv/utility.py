"""CES delegation utility and the discrete-period delegation dynamic.

Voters spread one vote over peers (self-delegation meaning a direct vote)
and value the spread through a constant-elasticity-of-substitution
aggregator plus a logarithmic bonus for influence received. Period after
period, weights respond to expertise and preference similarity, votes are
redistributed, the consensus engine tallies the outcome, and preferences
drift toward the funded policies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .ballots import Ballot
from .errors import (
    AllZeroWeights,
    DimensionMismatch,
    DomainError,
    NonFiniteUtility,
    ZeroDenominator,
)
from .matrix import build_matrix
from .registry import NodeRegistry
from .solver import TallyResult, limit_by_squaring, tally

WEIGHT_SUM_TOL = 1e-9


def _as_vector(values: Sequence[float] | np.ndarray) -> np.ndarray:
    return np.asarray(values, dtype=float)


def ces_value(weights, allocation, rho: float) -> float:
    """Constant-elasticity aggregate ``(sum_i w_i y_i^rho)^(1/rho)``.

    ``weights`` must sum to 1 and ``allocation`` must be non-negative.
    ``rho = 0`` (the Cobb-Douglas limit) is rejected rather than
    special-cased.
    """
    w = _as_vector(weights)
    y = _as_vector(allocation)
    if w.shape != y.shape:
        raise DimensionMismatch(w.size, y.size)
    if rho == 0.0 or not math.isfinite(rho):
        raise DomainError(f"CES exponent must be finite and nonzero, got {rho!r}")
    if np.any(y < 0.0) or not np.all(np.isfinite(y)):
        raise DomainError("allocation entries must be finite and >= 0")
    if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
        raise DomainError(f"weights must sum to 1, got {w.sum()!r}")
    if rho < 0.0 and np.any(y == 0.0):
        # y -> 0 sends y^rho -> inf, collapsing the aggregate to its limit 0.
        return 0.0
    with np.errstate(divide="ignore"):
        inner = float(np.sum(w * np.power(y, rho)))
    if inner == 0.0:
        return 0.0
    return float(inner ** (1.0 / rho))


def ces_gradient(weights, allocation, rho: float) -> np.ndarray:
    """Analytic gradient of :func:`ces_value` with respect to the allocation.

    ``d/dy_i = (sum w y^rho)^((1-rho)/rho) * w_i * y_i^(rho-1)``; finite only
    at interior points (every allocation entry strictly positive) when
    ``rho < 1``.
    """
    w = _as_vector(weights)
    y = _as_vector(allocation)
    if w.shape != y.shape:
        raise DimensionMismatch(w.size, y.size)
    if rho == 0.0 or not math.isfinite(rho):
        raise DomainError(f"CES exponent must be finite and nonzero, got {rho!r}")
    if np.any(y < 0.0):
        raise DomainError("allocation entries must be >= 0")
    with np.errstate(divide="ignore"):
        inner = float(np.sum(w * np.power(y, rho)))
        outer = inner ** ((1.0 - rho) / rho) if inner > 0.0 else 0.0
        return outer * w * np.power(y, rho - 1.0)


def similarity(pref_a, pref_b, theta: float) -> float:
    """Preference similarity ``-theta * ||a - b||``: zero iff identical, else negative."""
    a = _as_vector(pref_a)
    b = _as_vector(pref_b)
    if a.shape != b.shape:
        raise DimensionMismatch(a.size, b.size)
    return float(-theta * np.linalg.norm(a - b))


@dataclass(frozen=True)
class VoterProfile:
    """Per-voter parameters of the delegation utility.

    ``gamma`` weighs the influence bonus against the CES term
    (``beta + gamma = 1``); the separate ``gamma_chain`` is an optional
    delegation-chain-length penalty, off by default. The two are distinct
    knobs on purpose.
    """

    preference: np.ndarray
    expertise: Mapping[str, float] = field(default_factory=dict)
    theta: float = 1.0
    rho: float = 0.5
    beta: float = 1.0
    gamma: float = 0.0
    gamma_chain: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "preference", _as_vector(self.preference))
        if not np.all(np.isfinite(self.preference)):
            raise DomainError("preference vector must be finite")
        if not (self.theta > 0.0 and math.isfinite(self.theta)):
            raise DomainError(f"theta must be positive, got {self.theta!r}")
        if self.rho == 0.0 or not math.isfinite(self.rho):
            raise DomainError("CES exponent rho must be finite and nonzero")
        if self.beta < 0.0 or self.gamma < 0.0 or abs(self.beta + self.gamma - 1.0) > 1e-12:
            raise DomainError(
                f"beta and gamma must be non-negative and sum to 1, got {self.beta}, {self.gamma}"
            )
        if self.gamma_chain < 0.0:
            raise DomainError("gamma_chain must be >= 0")
        for peer, e in self.expertise.items():
            if not (math.isfinite(float(e)) and float(e) >= 0.0):
                raise DomainError(f"expertise for {peer!r} must be finite and >= 0")


def utility_with_influence(
    profile: VoterProfile,
    weights,
    allocation,
    incoming: float,
) -> float:
    """Delegation utility with the influence bonus.

    ``beta * ces_value(weights, allocation) + gamma * log(1 + incoming)``,
    where ``incoming`` is the total vote mass delegated to this voter.
    """
    if incoming < 0.0 or not math.isfinite(incoming):
        raise DomainError(f"incoming delegation must be finite and >= 0, got {incoming!r}")
    base = ces_value(weights, allocation, profile.rho)
    return profile.beta * base + profile.gamma * math.log1p(incoming)


@dataclass(frozen=True)
class GParams:
    """Parameters of the weight-update rule: expertise pull, similarity pull,
    and momentum on the previous allocation."""

    w_e: float = 1.0
    w_f: float = 1.0
    momentum: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.momentum <= 1.0):
            raise DomainError(f"momentum must be in [0, 1], got {self.momentum!r}")


def update_weights(prev_alloc, prev_sim, cur_sim, expertise, g_params: GParams) -> np.ndarray:
    """Next-period CES weights for one delegator.

    A softmax over ``w_e * expertise + w_f * cur_sim`` is blended with the
    delegator's previous allocation: ``momentum * prev + (1 - momentum) *
    softmax``. The previous similarity column is accepted to mirror the
    dynamic update's full argument list but the default rule keys on the
    current similarities only. The result always sums to 1.
    """
    prev = _as_vector(prev_alloc)
    sim_prev = _as_vector(prev_sim)
    sim_cur = _as_vector(cur_sim)
    exp_vec = _as_vector(expertise)
    for other in (sim_prev, sim_cur, exp_vec):
        if other.shape != prev.shape:
            raise DimensionMismatch(prev.size, other.size)

    scores = g_params.w_e * exp_vec + g_params.w_f * sim_cur
    if not np.all(np.isfinite(scores)):
        raise AllZeroWeights("non-finite weight scores")
    shifted = np.exp(scores - scores.max())
    soft = shifted / shifted.sum()

    lam = g_params.momentum
    if lam == 0.0:
        return soft
    prev_total = prev.sum()
    if prev_total <= 0.0:
        raise AllZeroWeights("momentum requires a previous allocation with positive mass")
    return lam * (prev / prev_total) + (1.0 - lam) * soft


def redistribute(alpha, sims, rho: float) -> np.ndarray:
    """Next-period vote column from weights and similarities.

    Similarities (which are <= 0) are mapped through ``exp`` to positive
    scores ``S``, then ``D_i = alpha_i S_i^rho / sum_l alpha_l S_l^rho``.
    The exponential keeps fractional exponents well-defined; the raw
    similarity cannot be raised to ``rho`` directly because it is negative.
    """
    a = _as_vector(alpha)
    s = _as_vector(sims)
    if a.shape != s.shape:
        raise DimensionMismatch(a.size, s.size)
    with np.errstate(over="ignore", under="ignore"):
        scores = np.exp(s)
        weighted = a * np.power(scores, rho)
    denom = float(weighted.sum())
    if not math.isfinite(denom) or denom <= 0.0:
        raise ZeroDenominator(f"redistribution denominator is {denom!r}")
    return weighted / denom


@dataclass(frozen=True)
class FeedbackParams:
    """Preference drift toward funded policies: blend rate and how many
    top policies count as funded each period."""

    mu: float = 0.2
    outcome_size: int = 1

    def __post_init__(self):
        if not (0.0 <= self.mu <= 1.0):
            raise DomainError(f"feedback mu must be in [0, 1], got {self.mu!r}")
        if self.outcome_size < 1:
            raise DomainError("outcome_size must be >= 1")


@dataclass(frozen=True)
class SimulationConfig:
    periods: int
    profiles: Mapping[str, VoterProfile]
    g_params: GParams = field(default_factory=GParams)
    feedback: FeedbackParams = field(default_factory=FeedbackParams)
    seed: int | None = None
    initial: str = "uniform"

    def __post_init__(self):
        if self.periods < 1:
            raise DomainError("periods must be >= 1")
        if self.initial not in ("uniform", "random"):
            raise DomainError(f"initial must be 'uniform' or 'random', got {self.initial!r}")


@dataclass(frozen=True)
class DelegationState:
    """One period of the dynamic: delegations, weights, and utilities.

    ``delegations[i, j]`` is the vote share delegator j assigns to
    delegatee i (self-delegation on the diagonal means direct voting);
    ``weights`` holds the CES weights in the same orientation.
    """

    period: int
    delegations: np.ndarray
    weights: np.ndarray
    utilities: dict[str, float]
    outcome_utilities: dict[str, float]
    cumulative: dict[str, float]
    incoming: dict[str, float]
    outcome: tuple[str, ...]
    tally: TallyResult


@dataclass(frozen=True)
class SimulationResult:
    voters: tuple[str, ...]
    policies: tuple[str, ...]
    states: tuple[DelegationState, ...]

    @property
    def tallies(self) -> tuple[TallyResult, ...]:
        return tuple(s.tally for s in self.states)


def _pairwise_similarity(prefs: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """sims[i, j] = -theta_j * ||F_i - F_j||; column j is delegator j's view."""
    diff = prefs[:, None, :] - prefs[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    return -dist * thetas[None, :]


def _policy_spread(pref_row: np.ndarray) -> np.ndarray:
    """Softmax of one voter's policy ratings; how direct-vote mass lands."""
    shifted = np.exp(pref_row - pref_row.max())
    return shifted / shifted.sum()


def _chain_length(delegations: np.ndarray, j: int) -> int:
    """Hops from delegator j to the nearest direct-voting node on the
    delegation support graph; 0 if j votes directly, capped at n if no
    direct voter is reachable."""
    n = delegations.shape[0]
    if delegations[j, j] > 0.0:
        return 0
    seen = {j}
    frontier = [j]
    depth = 0
    while frontier:
        depth += 1
        nxt = []
        for u in frontier:
            for v in np.nonzero(delegations[:, u] > 0.0)[0]:
                v = int(v)
                if v in seen:
                    continue
                if delegations[v, v] > 0.0:
                    return depth
                seen.add(v)
                nxt.append(v)
        frontier = nxt
    return n


def initial_allocation_from_ballots(
    ballots: Iterable[Ballot],
    voters: Sequence[str],
    registry: NodeRegistry,
) -> np.ndarray:
    """Seed the dynamic from engine ballots.

    Peer allocations map to off-diagonal delegation; everything a voter put
    on policies counts as direct voting and lands on the diagonal. Columns
    are normalized to sum to 1.
    """
    index = {v: i for i, v in enumerate(voters)}
    n = len(voters)
    y0 = np.zeros((n, n))
    for ballot in ballots:
        if ballot.source not in index:
            raise DomainError(f"ballot source {ballot.source!r} is not a simulated voter")
        j = index[ballot.source]
        for target, weight in ballot.allocations.items():
            if weight <= 0.0:
                continue
            if target in index:
                y0[index[target], j] += weight
            else:
                registry.index_of(target)  # unknown targets still rejected
                y0[j, j] += weight
        total = y0[:, j].sum()
        if total <= 0.0:
            raise DomainError(f"ballot from {ballot.source!r} has no usable mass")
        y0[:, j] /= total
    missing = [v for v in voters if y0[:, index[v]].sum() == 0.0]
    if missing:
        raise DomainError(f"no initial ballot for voters {missing}")
    return y0


def run_simulation(
    config: SimulationConfig,
    registry: NodeRegistry,
    initial_ballots: Sequence[Ballot] | None = None,
) -> SimulationResult:
    """Run the delegation dynamic and tally the vote each period.

    The registry must contain voters and policies only; each voter needs a
    profile whose preference vector matches the policy count. Per period:
    weights update from expertise and current similarity, votes are
    redistributed, utilities are scored, the consensus engine tallies the
    induced ballots (self-delegation mass is spread over policies by a
    softmax of the voter's ratings), and preferences drift toward the
    funded set.
    """
    if registry.intermediaries:
        raise DomainError("delegation dynamic runs on voters and policies only")
    voters = [n.id for n in registry.voters]
    policies = [n.id for n in registry.policies]
    if not voters:
        raise DomainError("at least one voter required")
    n, p = len(voters), len(policies)

    profiles = []
    for v in voters:
        if v not in config.profiles:
            raise DomainError(f"no profile for voter {v!r}")
        prof = config.profiles[v]
        if prof.preference.size != p:
            raise DimensionMismatch(p, prof.preference.size)
        profiles.append(prof)

    thetas = np.array([prof.theta for prof in profiles])
    expertise = np.zeros((n, n))
    for j, prof in enumerate(profiles):
        for i, v in enumerate(voters):
            expertise[i, j] = float(prof.expertise.get(v, 0.0))

    if initial_ballots is not None:
        y_prev = initial_allocation_from_ballots(initial_ballots, voters, registry)
    elif config.initial == "random":
        rng = np.random.default_rng(config.seed)
        y_prev = rng.random((n, n)) + 1e-9
        y_prev /= y_prev.sum(axis=0, keepdims=True)
    else:
        y_prev = np.full((n, n), 1.0 / n)

    prefs = np.stack([prof.preference for prof in profiles])
    sims_prev = _pairwise_similarity(prefs, thetas)
    cumulative = np.zeros(n)
    states: list[DelegationState] = []

    for period in range(1, config.periods + 1):
        sims_cur = _pairwise_similarity(prefs, thetas)
        weights = np.zeros((n, n))
        delegations = np.zeros((n, n))
        for j in range(n):
            weights[:, j] = update_weights(
                y_prev[:, j], sims_prev[:, j], sims_cur[:, j], expertise[:, j], config.g_params
            )
            delegations[:, j] = redistribute(weights[:, j], sims_cur[:, j], profiles[j].rho)

        incoming = delegations.sum(axis=1)
        utilities = np.zeros(n)
        for j in range(n):
            prof = profiles[j]
            utilities[j] = ces_value(weights[:, j], delegations[:, j], prof.rho)
            utilities[j] += prof.gamma * math.log1p(float(incoming[j]))
            if prof.gamma_chain > 0.0:
                utilities[j] -= prof.gamma_chain * _chain_length(delegations, j)
            if not math.isfinite(utilities[j]):
                raise NonFiniteUtility(period, voters[j])

        ballots = []
        for j in range(n):
            allocations: dict[str, float] = {}
            for i in range(n):
                if i != j and delegations[i, j] > 0.0:
                    allocations[voters[i]] = float(delegations[i, j])
            direct = float(delegations[j, j])
            if direct > 0.0:
                spread = _policy_spread(prefs[j])
                for z, policy_id in enumerate(policies):
                    if spread[z] > 0.0:
                        allocations[policy_id] = allocations.get(policy_id, 0.0) + direct * spread[z]
            ballots.append(Ballot(voters[j], allocations))

        vote_matrix = build_matrix(registry, ballots)
        period_tally = tally(limit_by_squaring(vote_matrix), registry)
        outcome = tuple(pid for pid, _ in period_tally.ranking()[: config.feedback.outcome_size])
        outcome_idx = [policies.index(pid) for pid in outcome]
        outcome_utilities = prefs[:, outcome_idx].mean(axis=1)

        cumulative = cumulative + utilities
        states.append(
            DelegationState(
                period=period,
                delegations=delegations,
                weights=weights,
                utilities={v: float(utilities[j]) for j, v in enumerate(voters)},
                outcome_utilities={v: float(outcome_utilities[j]) for j, v in enumerate(voters)},
                cumulative={v: float(cumulative[j]) for j, v in enumerate(voters)},
                incoming={v: float(incoming[j]) for j, v in enumerate(voters)},
                outcome=outcome,
                tally=period_tally,
            )
        )

        funded = np.zeros(p)
        funded[outcome_idx] = 1.0
        prefs = (1.0 - config.feedback.mu) * prefs + config.feedback.mu * funded[None, :]
        y_prev = delegations
        sims_prev = sims_cur

    return SimulationResult(voters=tuple(voters), policies=tuple(policies), states=tuple(states))
