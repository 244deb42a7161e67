"""Node universe: voters, intermediaries, and policies with stable indices.

The registry fixes the matrix index layout used everywhere else: voters come
first, then intermediaries, then policies, so the transient and absorbing
blocks of the voting matrix are contiguous.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import InvalidRegistry


class NodeKind(enum.Enum):
    VOTER = "voter"
    INTERMEDIARY = "intermediary"
    POLICY = "policy"

    @classmethod
    def parse(cls, text: str) -> "NodeKind":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise InvalidRegistry(f"unknown node kind {text!r}") from None


_KIND_ORDER = {NodeKind.VOTER: 0, NodeKind.INTERMEDIARY: 1, NodeKind.POLICY: 2}


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    name: str = ""

    def __post_init__(self):
        if not self.id:
            raise InvalidRegistry("node id must be a non-empty string")
        if not self.name:
            object.__setattr__(self, "name", self.id)


@dataclass(frozen=True)
class BlockIndex:
    """Index ranges of the three blocks inside the assembled matrix."""

    voters: range
    intermediaries: range
    policies: range

    @property
    def transient(self) -> range:
        return range(self.voters.start, self.intermediaries.stop)

    @property
    def size(self) -> int:
        return self.policies.stop


class NodeRegistry:
    """Ordered, validated universe of nodes plus intermediary membership.

    Nodes are stably reordered into voter/intermediary/policy blocks
    (input order is preserved within each block). Membership maps an
    intermediary id to the non-empty list of nodes it stands for; cycles
    among intermediaries are rejected because vote distribution through
    mutually-containing sets has no meaning here.
    """

    def __init__(
        self,
        nodes: Iterable[Node],
        membership: Mapping[str, Sequence[str]] | None = None,
    ):
        ordered = sorted(nodes, key=lambda n: _KIND_ORDER[n.kind])
        ids = [n.id for n in ordered]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise InvalidRegistry(f"duplicate node ids: {dupes}")
        if not any(n.kind is NodeKind.POLICY for n in ordered):
            raise InvalidRegistry("at least one policy is required")

        self._nodes: tuple[Node, ...] = tuple(ordered)
        self._index: dict[str, int] = {n.id: i for i, n in enumerate(ordered)}
        self._membership: dict[str, tuple[str, ...]] = {
            k: tuple(v) for k, v in (membership or {}).items()
        }
        d = sum(1 for n in ordered if n.kind is NodeKind.VOTER)
        m = sum(1 for n in ordered if n.kind is NodeKind.INTERMEDIARY)
        p = len(ordered) - d - m
        self._block = BlockIndex(range(0, d), range(d, d + m), range(d + m, d + m + p))
        self._validate_membership()

    def _validate_membership(self) -> None:
        for inter_id, members in self._membership.items():
            node = self._index.get(inter_id)
            if node is None or self._nodes[node].kind is not NodeKind.INTERMEDIARY:
                raise InvalidRegistry(f"membership key {inter_id!r} is not an intermediary")
            if not members:
                raise InvalidRegistry(f"intermediary {inter_id!r} has no members")
            for m in members:
                if m not in self._index:
                    raise InvalidRegistry(f"intermediary {inter_id!r} lists unknown member {m!r}")
                if m == inter_id:
                    raise InvalidRegistry(f"intermediary {inter_id!r} contains itself")
        for inter in self.intermediaries:
            if inter.id not in self._membership:
                raise InvalidRegistry(f"intermediary {inter.id!r} has no membership entry")
        self._reject_membership_cycles()

    def _reject_membership_cycles(self) -> None:
        # DFS over intermediary -> intermediary member edges only.
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {i: WHITE for i in self._membership}

        def visit(node: str) -> None:
            color[node] = GRAY
            for m in self._membership[node]:
                if m in self._membership:
                    if color[m] == GRAY:
                        raise InvalidRegistry(
                            f"membership cycle through intermediaries {node!r} and {m!r}"
                        )
                    if color[m] == WHITE:
                        visit(m)
            color[node] = BLACK

        for start in self._membership:
            if color[start] == WHITE:
                visit(start)

    # --- lookups -------------------------------------------------------------

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._index

    @property
    def nodes(self) -> tuple[Node, ...]:
        return self._nodes

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self._nodes)

    @property
    def block(self) -> BlockIndex:
        return self._block

    @property
    def voters(self) -> tuple[Node, ...]:
        return self._nodes[self._block.voters.start : self._block.voters.stop]

    @property
    def intermediaries(self) -> tuple[Node, ...]:
        return self._nodes[self._block.intermediaries.start : self._block.intermediaries.stop]

    @property
    def policies(self) -> tuple[Node, ...]:
        return self._nodes[self._block.policies.start : self._block.policies.stop]

    def members_of(self, intermediary_id: str) -> tuple[str, ...]:
        return self._membership[intermediary_id]

    @property
    def membership(self) -> dict[str, tuple[str, ...]]:
        return dict(self._membership)

    def index_of(self, node_id: str) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise InvalidRegistry(f"unknown node {node_id!r}") from None

    def node(self, node_id: str) -> Node:
        return self._nodes[self.index_of(node_id)]

    def kind_of(self, node_id: str) -> NodeKind:
        return self.node(node_id).kind

    def is_transient(self, node_id: str) -> bool:
        return self.kind_of(node_id) is not NodeKind.POLICY

    def without_intermediaries(self) -> "NodeRegistry":
        """Voters and policies only; used by the liquid-democracy reduction."""
        kept = [n for n in self._nodes if n.kind is not NodeKind.INTERMEDIARY]
        return NodeRegistry(kept)

    def restricted_to_voters(self, voter_ids: Iterable[str]) -> "NodeRegistry":
        """Registry with only the given voters kept.

        Intermediary memberships are pruned of dropped voters; intermediaries
        left with no members are dropped too (recursively, since members may
        be other intermediaries).
        """
        keep_voters = set(voter_ids)
        for v in keep_voters:
            if self.kind_of(v) is not NodeKind.VOTER:
                raise InvalidRegistry(f"{v!r} is not a voter")

        alive = {n.id for n in self._nodes if n.kind is not NodeKind.VOTER} | keep_voters
        membership = {k: list(v) for k, v in self._membership.items()}
        changed = True
        while changed:
            changed = False
            for inter, members in membership.items():
                pruned = [m for m in members if m in alive]
                if pruned != members:
                    membership[inter] = pruned
                    changed = True
                if not pruned and inter in alive:
                    alive.discard(inter)
                    changed = True
        kept_nodes = [n for n in self._nodes if n.id in alive]
        kept_membership = {k: v for k, v in membership.items() if k in alive}
        return NodeRegistry(kept_nodes, kept_membership)

    def __repr__(self) -> str:
        b = self._block
        return (
            f"NodeRegistry({len(b.voters)} voters, "
            f"{len(b.intermediaries)} intermediaries, {len(b.policies)} policies)"
        )


def make_registry(
    voters: Sequence[str] = (),
    intermediaries: Mapping[str, Sequence[str]] | None = None,
    policies: Sequence[str] = (),
    names: Mapping[str, str] | None = None,
) -> NodeRegistry:
    """Convenience constructor from plain id lists."""
    names = dict(names or {})
    nodes = [Node(v, NodeKind.VOTER, names.get(v, "")) for v in voters]
    nodes += [Node(i, NodeKind.INTERMEDIARY, names.get(i, "")) for i in (intermediaries or {})]
    nodes += [Node(p, NodeKind.POLICY, names.get(p, "")) for p in policies]
    return NodeRegistry(nodes, intermediaries)
