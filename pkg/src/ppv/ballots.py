"""Fractional ballots and the liquid-democracy reduction.

A ballot is one source node's raw rating of targets; ratings are arbitrary
non-negative numbers (slider positions, scores) and are normalized to a
probability column only when the matrix is assembled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import (
    EmptyAfterReduction,
    SelfAllocation,
    ZeroMassBallot,
)
from .registry import NodeKind, NodeRegistry


@dataclass(frozen=True)
class Ballot:
    """One source node's allocation of voting weight over targets.

    Weights are ratings, not probabilities; the column is normalized at
    assembly time. A ballot must carry some strictly positive weight and may
    never allocate to its own source (a node cannot vouch for itself).
    """

    source: str
    allocations: Mapping[str, float]

    def __post_init__(self):
        clean: dict[str, float] = {}
        for target, weight in self.allocations.items():
            w = float(weight)
            if not math.isfinite(w) or w < 0.0:
                raise ZeroMassBallot(self.source, f"weight for {target!r} is {weight!r}")
            clean[target] = w
        if self.source in clean and clean[self.source] > 0.0:
            raise SelfAllocation(self.source)
        if not any(w > 0.0 for w in clean.values()):
            raise ZeroMassBallot(self.source)
        object.__setattr__(self, "allocations", clean)

    @property
    def total(self) -> float:
        return sum(self.allocations.values())

    def normalized(self) -> "Ballot":
        """Same ballot with weights scaled to sum to 1 (zero entries dropped).

        Idempotent: a ballot already summing to 1 (within 1e-12) is returned
        with its weights untouched, so resubmitting a normalized ballot
        changes nothing.
        """
        positive = {t: w for t, w in self.allocations.items() if w > 0.0}
        total = sum(positive.values())
        if abs(total - 1.0) <= 1e-12:
            return Ballot(self.source, positive)
        return Ballot(self.source, {t: w / total for t, w in positive.items()})

    def positive_targets(self) -> tuple[str, ...]:
        return tuple(t for t, w in self.allocations.items() if w > 0.0)


def reduce_to_ld(ballots: Iterable[Ballot], registry: NodeRegistry) -> list[Ballot]:
    """Collapse fractional ballots into whole-vote (liquid democracy) ballots.

    Intermediary targets are struck from every ballot, then each voter's
    full vote goes to the highest-weighted surviving target; exact ties
    split the vote equally. Ballots cast by intermediaries are dropped along
    with the intermediary nodes themselves. Ranking considers every surviving
    target, peers included, not just policies.
    """
    reduced: list[Ballot] = []
    for ballot in ballots:
        if registry.kind_of(ballot.source) is NodeKind.INTERMEDIARY:
            continue
        surviving = {
            t: w
            for t, w in ballot.allocations.items()
            if w > 0.0 and registry.kind_of(t) is not NodeKind.INTERMEDIARY
        }
        if not surviving:
            raise EmptyAfterReduction(ballot.source)
        top = max(surviving.values())
        winners = sorted(t for t, w in surviving.items() if w == top)
        share = 1.0 / len(winners)
        reduced.append(Ballot(ballot.source, {t: share for t in winners}))
    return reduced
