"""Assembly and validation of the column-stochastic voting matrix.

Column j of the matrix is the (normalized) ballot of node j: entry (i, j) is
the fraction of j's vote cast onto node i. Policy columns are standard basis
vectors, so policies absorb whatever reaches them; voters and intermediaries
form the transient block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Union

import numpy as np

from .ballots import Ballot
from .errors import (
    DuplicateBallot,
    InvalidRegistry,
    MissingBallot,
    PolicySourceForbidden,
    UnknownSource,
    UnknownTarget,
    ZeroMassBallot,
)
from .registry import BlockIndex, NodeKind, NodeRegistry

COLUMN_SUM_TOL = 1e-12


@dataclass(frozen=True)
class EqualSplit:
    """Intermediary columns give 1/|members| to each member."""


@dataclass(frozen=True)
class Weighted:
    """Intermediary columns follow per-intermediary member weights.

    ``weights[intermediary_id][member_id]`` are ratings over that
    intermediary's members (normalized at assembly). Intermediaries absent
    from the map fall back to an equal split.
    """

    weights: Mapping[str, Mapping[str, float]]


IntermediaryStrategy = Union[EqualSplit, Weighted]


@dataclass(frozen=True)
class VotingMatrix:
    """Dense column-stochastic matrix plus block metadata.

    ``entries[i, j]`` is the vote cast by column node j onto row node i.
    """

    entries: np.ndarray
    block: BlockIndex
    ids: tuple[str, ...]
    explicit_intermediaries: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def column(self, node_index: int) -> np.ndarray:
        return self.entries[:, node_index]

    def transient_block(self) -> np.ndarray:
        t = self.block.transient
        return self.entries[t.start : t.stop, t.start : t.stop]

    def absorption_block(self) -> np.ndarray:
        t, p = self.block.transient, self.block.policies
        return self.entries[p.start : p.stop, t.start : t.stop]


@dataclass(frozen=True)
class Violation:
    rule_id: str
    node_id: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]
    unreachable_voters: tuple[str, ...]
    warnings: tuple[Violation, ...] = ()


def _column_for_ballot(
    ballot: Ballot, registry: NodeRegistry, n: int
) -> np.ndarray:
    col = np.zeros(n)
    for target, weight in ballot.allocations.items():
        if target not in registry:
            raise UnknownTarget(ballot.source, target)
        if weight > 0.0:
            col[registry.index_of(target)] += weight
    total = col.sum()
    if total <= 0.0:
        raise ZeroMassBallot(ballot.source)
    return col / total


def _intermediary_column(
    inter_id: str,
    registry: NodeRegistry,
    strategy: IntermediaryStrategy,
    n: int,
) -> np.ndarray:
    members = registry.members_of(inter_id)
    col = np.zeros(n)
    weights: Mapping[str, float] | None = None
    if isinstance(strategy, Weighted):
        weights = strategy.weights.get(inter_id)
    if weights is None:
        share = 1.0 / len(members)
        for m in members:
            col[registry.index_of(m)] += share
        return col
    member_set = set(members)
    for m, w in weights.items():
        if m not in member_set:
            raise UnknownTarget(inter_id, m)
        if float(w) < 0.0:
            raise ZeroMassBallot(inter_id, f"negative weight for member {m!r}")
        col[registry.index_of(m)] += float(w)
    total = col.sum()
    if total <= 0.0:
        raise ZeroMassBallot(inter_id, "weighted member distribution sums to zero")
    return col / total


def build_matrix(
    registry: NodeRegistry,
    ballots: Iterable[Ballot],
    intermediary_strategy: IntermediaryStrategy = EqualSplit(),
) -> VotingMatrix:
    """Assemble the voting matrix from ballots and the intermediary strategy.

    Every voter must have exactly one ballot. Intermediaries may cast an
    explicit ballot; otherwise their column distributes their received mass
    over their members per the strategy. Policy columns are basis vectors.
    The result is deterministic: identical inputs give bit-identical arrays.
    """
    by_source: dict[str, Ballot] = {}
    for ballot in ballots:
        if ballot.source not in registry:
            raise UnknownSource(ballot.source)
        if registry.kind_of(ballot.source) is NodeKind.POLICY:
            raise PolicySourceForbidden(ballot.source)
        if ballot.source in by_source:
            raise DuplicateBallot(ballot.source)
        by_source[ballot.source] = ballot

    n = len(registry)
    entries = np.zeros((n, n))
    explicit: list[str] = []

    for voter in registry.voters:
        ballot = by_source.get(voter.id)
        if ballot is None:
            raise MissingBallot(voter.id)
        entries[:, registry.index_of(voter.id)] = _column_for_ballot(ballot, registry, n)

    for inter in registry.intermediaries:
        j = registry.index_of(inter.id)
        ballot = by_source.get(inter.id)
        if ballot is not None:
            entries[:, j] = _column_for_ballot(ballot, registry, n)
            explicit.append(inter.id)
        else:
            entries[:, j] = _intermediary_column(inter.id, registry, intermediary_strategy, n)

    for policy in registry.policies:
        j = registry.index_of(policy.id)
        entries[j, j] = 1.0

    return VotingMatrix(
        entries=entries,
        block=registry.block,
        ids=registry.ids,
        explicit_intermediaries=tuple(explicit),
    )


def nodes_reaching_policies(entries: np.ndarray, block: BlockIndex) -> np.ndarray:
    """Boolean mask over all indices: mass starting there eventually hits a policy.

    Computed by reverse breadth-first search on the support graph (edge
    j -> i whenever entries[i, j] > 0).
    """
    n = entries.shape[0]
    reached = np.zeros(n, dtype=bool)
    frontier = list(block.policies)
    reached[list(block.policies)] = True
    support = entries > 0.0
    while frontier:
        i = frontier.pop()
        # predecessors of i: columns j sending mass onto row i
        for j in np.nonzero(support[i, :])[0]:
            if not reached[j]:
                reached[j] = True
                frontier.append(int(j))
    return reached


def validate(matrix: VotingMatrix, registry: NodeRegistry) -> ValidationReport:
    """Check the structural invariants of an assembled matrix.

    Reports column-sum deviations beyond 1e-12, voter self-votes, policy
    columns that are not basis vectors, negative entries, and transient
    nodes from which no directed path reaches any policy. Stranded nodes are
    a warning-level condition for assembly but make ``ok`` false because the
    solver cannot deliver their mass.
    """
    entries = matrix.entries
    if entries.shape != (len(registry), len(registry)) or matrix.ids != registry.ids:
        raise InvalidRegistry("matrix does not match registry layout")

    violations: list[Violation] = []
    warnings: list[Violation] = []
    block = matrix.block

    sums = entries.sum(axis=0)
    for j, node in enumerate(registry.nodes):
        dev = abs(sums[j] - 1.0)
        if dev > COLUMN_SUM_TOL:
            violations.append(
                Violation("column-sum", node.id, f"column sums to {sums[j]!r} (|dev| {dev:.3e})")
            )

    if np.any(entries < 0.0):
        for i, j in zip(*np.nonzero(entries < 0.0)):
            violations.append(
                Violation(
                    "negative-entry",
                    registry.ids[j],
                    f"entry onto {registry.ids[i]!r} is {entries[i, j]!r}",
                )
            )

    for v in block.voters:
        if entries[v, v] != 0.0:
            violations.append(
                Violation("voter-self-vote", registry.ids[v], f"diagonal is {entries[v, v]!r}")
            )

    for z in block.policies:
        col = entries[:, z]
        off = col.copy()
        off[z] = 0.0
        if col[z] != 1.0 or np.any(off != 0.0):
            violations.append(
                Violation("policy-column", registry.ids[z], "policy column is not a basis vector")
            )

    reached = nodes_reaching_policies(entries, block)
    unreachable = tuple(
        registry.ids[t] for t in block.transient if not reached[t]
    )

    for inter_id in matrix.explicit_intermediaries:
        warnings.append(
            Violation(
                "intermediary-explicit-ballot",
                inter_id,
                "intermediary cast its own ballot, overriding member distribution",
            )
        )

    ok = not violations and not unreachable
    return ValidationReport(
        ok=ok,
        violations=tuple(violations),
        unreachable_voters=unreachable,
        warnings=tuple(warnings),
    )
