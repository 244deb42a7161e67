"""Limit matrix, consensus tally, and influence scores.

Two independent routes to the converged vote distribution are provided:

* repeated squaring of the voting matrix (``V, V^2, V^4, ...``), which works
  on any assembled matrix and reports what it finds, and
* the classical absorbing-chain identity ``B = R (I - Q)^{-1}`` on the
  transient block, which requires every transient node to reach a policy
  and serves as a cross-check oracle.

Per-node influence ("net proxy vote") is the time-summed mass flowing
through a node, normalized by its self-return mass, which removes the
inflation that delegation cycles would otherwise cause.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ballots import Ballot, reduce_to_ld
from .errors import (
    NoConvergence,
    NotTransient,
    PolicyNodeRejected,
    SingularTransientBlock,
)
from .matrix import (
    EqualSplit,
    IntermediaryStrategy,
    VotingMatrix,
    build_matrix,
    nodes_reaching_policies,
)
from .registry import BlockIndex, NodeRegistry

DEFAULT_TOL = 1e-12
DEFAULT_MAX_SQUARINGS = 64

METHOD_SQUARING = "power-squaring"
METHOD_FUNDAMENTAL = "fundamental-matrix"


@dataclass(frozen=True)
class LimitMatrix:
    """Converged matrix ``W`` with convergence diagnostics.

    ``iterations_used`` counts squarings (the power reached is
    ``2**iterations_used``); ``residual`` is the sup-norm gap between the
    last two iterates. ``residual_history`` keeps the full gap sequence for
    convergence diagnostics.
    """

    entries: np.ndarray
    block: BlockIndex
    ids: tuple[str, ...]
    iterations_used: int
    residual: float
    method: str
    residual_history: tuple[float, ...] = ()

    def transient_mass(self) -> np.ndarray:
        """Per-column mass still sitting on transient rows (0 when absorbed)."""
        t = self.block.transient
        return self.entries[t.start : t.stop, :].sum(axis=0)

    def fully_absorbed(self, tol: float = 1e-9) -> bool:
        t = self.block.transient
        cols = self.entries[:, t.start : t.stop]
        return bool(cols[t.start : t.stop, :].max(initial=0.0) <= tol)


@dataclass(frozen=True)
class TallyResult:
    """Converged per-policy vote totals for one vote of mass per voter."""

    policy_votes: dict[str, float]
    total_delivered: float
    undelivered: dict[str, float]
    method: str
    voters_counted: int

    def ranking(self) -> list[tuple[str, float]]:
        """Policies sorted by votes descending, ties broken by id."""
        return sorted(self.policy_votes.items(), key=lambda kv: (-kv[1], kv[0]))


@dataclass(frozen=True)
class InfluenceReport:
    """Net proxy vote per transient node, highest influence first."""

    scores: dict[str, float]
    ranking: tuple[str, ...]
    excluded: tuple[str, ...] = ()
    metadata: dict[str, str] = field(default_factory=dict)


def limit_by_squaring(
    matrix: VotingMatrix,
    tol: float = DEFAULT_TOL,
    max_squarings: int = DEFAULT_MAX_SQUARINGS,
) -> LimitMatrix:
    """Compute ``W = lim V^(2^x)`` by repeated squaring.

    Each squaring doubles the propagation horizon, so convergence is
    reached in a logarithmic number of matrix products. Termination is the
    sup-norm gap between consecutive squared iterates falling to ``tol``.

    Raises
    ------
    NoConvergence
        if the gap is still above ``tol`` after ``max_squarings`` squarings.
        This happens only when delegation mass is trapped on an odd-period
        cycle with no path to a policy; even-period closed cycles converge
        on the power-of-two subsequence and are reported by the tally as
        undelivered mass instead.
    """
    if max_squarings < 1:
        raise ValueError("max_squarings must be at least 1")
    previous = matrix.entries
    history: list[float] = []
    for squarings in range(1, max_squarings + 1):
        current = previous @ previous
        gap = float(np.max(np.abs(current - previous)))
        history.append(gap)
        previous = current
        if gap <= tol:
            return LimitMatrix(
                entries=current,
                block=matrix.block,
                ids=matrix.ids,
                iterations_used=squarings,
                residual=gap,
                method=METHOD_SQUARING,
                residual_history=tuple(history),
            )
    raise NoConvergence(residual=history[-1], squarings=max_squarings)


def limit_by_fundamental(matrix: VotingMatrix) -> LimitMatrix:
    """Compute the limit matrix from the absorbing-chain identity.

    The policy-row block of ``W`` is ``B = R (I - Q)^{-1}`` where ``Q`` is
    the transient-to-transient block and ``R`` the transient-to-policy
    block; the transient block of ``W`` is zero. Requires every transient
    node to have a directed path to some policy, otherwise ``I - Q`` is
    singular.
    """
    block = matrix.block
    reached = nodes_reaching_policies(matrix.entries, block)
    stranded = [matrix.ids[t] for t in block.transient if not reached[t]]
    if stranded:
        raise SingularTransientBlock(
            f"nodes with no path to any policy: {stranded}"
        )

    t = len(block.transient)
    q = matrix.transient_block()
    r = matrix.absorption_block()
    identity = np.eye(t)
    try:
        # B = R (I-Q)^{-1}  solved as  (I-Q)^T B^T = R^T
        absorption = np.linalg.solve((identity - q).T, r.T).T
    except np.linalg.LinAlgError as exc:  # pragma: no cover - prechecked
        raise SingularTransientBlock(str(exc)) from exc

    n = matrix.dim
    entries = np.zeros((n, n))
    p0 = block.policies.start
    entries[p0:, :t] = absorption
    for z in block.policies:
        entries[z, z] = 1.0
    return LimitMatrix(
        entries=entries,
        block=block,
        ids=matrix.ids,
        iterations_used=0,
        residual=0.0,
        method=METHOD_FUNDAMENTAL,
    )


def tally(limit: LimitMatrix, registry: NodeRegistry) -> TallyResult:
    """Aggregate the limit matrix into per-policy vote totals.

    Each voter contributes exactly one vote of initial mass (intermediaries
    contribute none of their own), so the delivered votes plus the stranded
    transient mass always add up to the number of voters.
    """
    if limit.ids != registry.ids:
        raise ValueError("limit matrix does not match registry layout")
    block = limit.block
    entries = limit.entries

    policy_votes: dict[str, float] = {}
    for z in block.policies:
        votes = float(entries[z, block.voters.start : block.voters.stop].sum())
        policy_votes[registry.ids[z]] = votes

    undelivered: dict[str, float] = {}
    t0, t1 = block.transient.start, block.transient.stop
    for j in block.voters:
        stuck = float(entries[t0:t1, j].sum())
        if stuck > 1e-12:
            undelivered[registry.ids[j]] = stuck

    return TallyResult(
        policy_votes=policy_votes,
        total_delivered=float(sum(policy_votes.values())),
        undelivered=undelivered,
        method=limit.method,
        voters_counted=len(block.voters),
    )


def rank_one_reduce(matrix: VotingMatrix, node: str) -> VotingMatrix:
    """Zero out a transient node's outgoing column.

    Algebraically this is ``V' = V (I - g f / (f g))`` with ``f = e_i^T``
    and ``g = e_i``; the product leaves every other column untouched and
    replaces column i by zeros, so the node keeps receiving votes but stops
    passing them on, behaving like a proposal node. Idempotent.
    """
    idx = matrix.ids.index(node) if node in matrix.ids else -1
    if idx < 0:
        raise NotTransient(node)
    if idx in matrix.block.policies:
        raise PolicyNodeRejected(node)
    entries = matrix.entries.copy()
    entries[:, idx] = 0.0
    return VotingMatrix(
        entries=entries,
        block=matrix.block,
        ids=matrix.ids,
        explicit_intermediaries=matrix.explicit_intermediaries,
    )


def _transient_index(matrix: VotingMatrix, node: str) -> int:
    if node not in matrix.ids:
        raise NotTransient(node)
    idx = matrix.ids.index(node)
    if idx in matrix.block.policies:
        raise NotTransient(node)
    return idx


def _reachable_transients(matrix: VotingMatrix) -> tuple[np.ndarray, list[int]]:
    """Mask over transient indices that reach a policy, plus the stranded list."""
    block = matrix.block
    reached = nodes_reaching_policies(matrix.entries, block)
    transient = list(block.transient)
    mask = reached[transient]
    stranded = [t for t, ok in zip(transient, mask) if not ok]
    return mask, stranded


def net_proxy_vote(matrix: VotingMatrix, node: str) -> float:
    """Influence of one transient node, delegated flow-through included.

    With ``N = (I - Q)^{-1}`` over the transient block, row i of ``N`` sums
    the mass arriving at node i from every transient node over all steps;
    the score is ``p_i = (sum_j N[i, j]) / N[i, i]``. Dividing by the
    self-return mass neutralizes delegation cycles, so the minimum is 1,
    attained exactly when nobody delegates to the node.
    """
    idx = _transient_index(matrix, node)
    mask, stranded = _reachable_transients(matrix)
    block = matrix.block
    transient = list(block.transient)
    if idx in stranded:
        raise SingularTransientBlock(
            f"node {node!r} sits in a closed delegation class: {sorted(matrix.ids[s] for s in stranded)}"
        )
    keep = [t for t, ok in zip(transient, mask) if ok]
    q = matrix.entries[np.ix_(keep, keep)]
    local = keep.index(idx)
    e = np.zeros(len(keep))
    e[local] = 1.0
    # w = e_i (I-Q)^{-1}  solved as  (I-Q)^T w^T = e_i
    w = np.linalg.solve((np.eye(len(keep)) - q).T, e)
    return float(w.sum() / w[local])


def net_proxy_vote_rank_one(matrix: VotingMatrix, node: str) -> float:
    """Same influence score through the rank-one route.

    Zeroing the node's outgoing column of the transient block turns it
    into a terminal state; the time-summed mass row of that modified block
    is parallel to the original one, scaled by the self-return mass, so its
    plain sum is the score directly. Kept as an independent path for
    cross-checking :func:`net_proxy_vote`.
    """
    idx = _transient_index(matrix, node)
    mask, stranded = _reachable_transients(matrix)
    block = matrix.block
    transient = list(block.transient)
    if idx in stranded:
        raise SingularTransientBlock(
            f"node {node!r} sits in a closed delegation class"
        )
    keep = [t for t, ok in zip(transient, mask) if ok]
    q = matrix.entries[np.ix_(keep, keep)].copy()
    local = keep.index(idx)
    q[:, local] = 0.0
    e = np.zeros(len(keep))
    e[local] = 1.0
    w_prime = np.linalg.solve((np.eye(len(keep)) - q).T, e)
    return float(w_prime.sum())


def influence_report(matrix: VotingMatrix, registry: NodeRegistry) -> InfluenceReport:
    """Net proxy vote for every transient node, ranked descending.

    Nodes trapped in closed delegation classes have no finite score; they
    are excluded from the scores and listed separately. Ties in the ranking
    break lexicographically by node id for reproducible reports.
    """
    mask, stranded = _reachable_transients(matrix)
    block = matrix.block
    transient = list(block.transient)
    keep = [t for t, ok in zip(transient, mask) if ok]

    scores: dict[str, float] = {}
    if keep:
        q = matrix.entries[np.ix_(keep, keep)]
        fundamental = np.linalg.inv(np.eye(len(keep)) - q)
        row_sums = fundamental.sum(axis=1)
        diag = np.diag(fundamental)
        for local, t in enumerate(keep):
            scores[matrix.ids[t]] = float(row_sums[local] / diag[local])

    ranking = tuple(sorted(scores, key=lambda nid: (-scores[nid], nid)))
    return InfluenceReport(
        scores=scores,
        ranking=ranking,
        excluded=tuple(matrix.ids[s] for s in stranded),
        metadata={
            "influence_domain": "all transient nodes (voters and intermediaries)",
            "excluded_reason": "closed delegation class, no path to any policy",
        },
    )


@dataclass(frozen=True)
class PolicyComparison:
    policy_id: str
    name: str
    ppv_score: float
    ppv_rank: int
    ld_score: float
    ld_rank: int
    delta_rank: int
    delta_score: float


@dataclass(frozen=True)
class LdComparison:
    """Side-by-side fractional vs whole-vote tallies over the same ballots."""

    ppv: TallyResult
    ld: TallyResult
    rows: tuple[PolicyComparison, ...]
    ppv_std: float
    ld_std: float
    metadata: dict[str, str] = field(default_factory=dict)


def _ranks(result: TallyResult) -> dict[str, int]:
    return {pid: rank for rank, (pid, _) in enumerate(result.ranking(), start=1)}


def compare_with_ld(
    ballots: Sequence[Ballot],
    registry: NodeRegistry,
    intermediary_strategy: IntermediaryStrategy = EqualSplit(),
    tol: float = DEFAULT_TOL,
    max_squarings: int = DEFAULT_MAX_SQUARINGS,
) -> LdComparison:
    """Run the fractional tally and its liquid-democracy reduction side by side.

    The reduction strips intermediaries and gives each voter's whole vote to
    their top-weighted surviving target (ties split equally); both ballot
    sets then go through the same solver. Standard deviations of the two
    vote vectors are reported for dispersion context, not asserted: how far
    the two methods spread votes apart is input-dependent.
    """
    ppv_matrix = build_matrix(registry, ballots, intermediary_strategy)
    ppv_tally = tally(limit_by_squaring(ppv_matrix, tol, max_squarings), registry)

    ld_registry = registry.without_intermediaries()
    ld_ballots = reduce_to_ld(ballots, registry)
    ld_matrix = build_matrix(ld_registry, ld_ballots)
    ld_tally = tally(limit_by_squaring(ld_matrix, tol, max_squarings), ld_registry)

    ppv_ranks = _ranks(ppv_tally)
    ld_ranks = _ranks(ld_tally)
    rows = []
    for policy in registry.policies:
        pid = policy.id
        ppv_score = ppv_tally.policy_votes[pid]
        ld_score = ld_tally.policy_votes[pid]
        rows.append(
            PolicyComparison(
                policy_id=pid,
                name=policy.name,
                ppv_score=ppv_score,
                ppv_rank=ppv_ranks[pid],
                ld_score=ld_score,
                ld_rank=ld_ranks[pid],
                delta_rank=ppv_ranks[pid] - ld_ranks[pid],
                delta_score=ld_score - ppv_score,
            )
        )
    rows.sort(key=lambda r: r.ppv_rank)

    ppv_scores = np.array([r.ppv_score for r in rows])
    ld_scores = np.array([r.ld_score for r in rows])
    return LdComparison(
        ppv=ppv_tally,
        ld=ld_tally,
        rows=tuple(rows),
        ppv_std=float(np.std(ppv_scores)),
        ld_std=float(np.std(ld_scores)),
        metadata={
            "ld_ranking_domain": "all surviving targets (peers included)",
            "std_kind": "population standard deviation over per-policy votes",
        },
    )
