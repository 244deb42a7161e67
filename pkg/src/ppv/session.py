"""Session workflow: node registration, ballot intake, computation, export.

Each session is an append-only JSON-lines event log plus a snapshot file.
Replaying a log through the same engine reproduces the snapshot
byte-for-byte, which makes sessions diffable fixtures. Writes to one
session are serialized behind a lock; reads see the last committed
snapshot.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping

from .ballots import Ballot
from .errors import (
    MissingBallot,
    NoConvergence,
    NotComputed,
    UnknownSession,
    UnknownSource,
    UnknownTarget,
    ZeroMassBallot,
)
from .exports import (
    canonical_json,
    comparison_to_csv,
    influence_to_csv,
    parse_ballot_data,
    registry_to_node_list,
    results_document,
    tally_to_csv,
)
from .matrix import EqualSplit, Weighted, build_matrix, validate
from .registry import Node, NodeKind, NodeRegistry
from .solver import (
    compare_with_ld,
    influence_report,
    limit_by_squaring,
    tally,
)

STATUS_OPEN = "open"
STATUS_COMPUTED = "computed"

EVENT_SESSION_CREATED = "SessionCreated"
EVENT_NODE_ADDED = "NodeAdded"
EVENT_BALLOT_SUBMITTED = "BallotSubmitted"
EVENT_COMPUTED = "Computed"


def default_data_dir() -> Path:
    return Path(os.environ.get("PPV_DATA_DIR", "./ppv-data"))


@dataclass(frozen=True)
class EventRecord:
    sequence: int
    timestamp: float
    kind: str
    payload: dict[str, Any]

    def to_json(self) -> str:
        return canonical_json(
            {
                "sequence": self.sequence,
                "timestamp": self.timestamp,
                "kind": self.kind,
                "payload": self.payload,
            }
        )

    @classmethod
    def from_json(cls, line: str) -> "EventRecord":
        raw = json.loads(line)
        return cls(
            sequence=int(raw["sequence"]),
            timestamp=float(raw["timestamp"]),
            kind=str(raw["kind"]),
            payload=dict(raw["payload"]),
        )


@dataclass(frozen=True)
class ComputeOptions:
    tol: float = 1e-12
    max_squarings: int = 64
    intermediary_strategy: str = "equal-split"
    intermediary_weights: Mapping[str, Mapping[str, float]] | None = None
    include_ld_comparison: bool = False
    allow_abstentions: bool = True

    def to_payload(self) -> dict[str, Any]:
        return {
            "tol": self.tol,
            "max_squarings": self.max_squarings,
            "intermediary_strategy": self.intermediary_strategy,
            "intermediary_weights": (
                {k: dict(v) for k, v in self.intermediary_weights.items()}
                if self.intermediary_weights
                else None
            ),
            "include_ld_comparison": self.include_ld_comparison,
            "allow_abstentions": self.allow_abstentions,
        }

    @classmethod
    def from_payload(cls, payload: Mapping[str, Any]) -> "ComputeOptions":
        return cls(
            tol=float(payload.get("tol", 1e-12)),
            max_squarings=int(payload.get("max_squarings", 64)),
            intermediary_strategy=str(payload.get("intermediary_strategy", "equal-split")),
            intermediary_weights=payload.get("intermediary_weights"),
            include_ld_comparison=bool(payload.get("include_ld_comparison", False)),
            allow_abstentions=bool(payload.get("allow_abstentions", True)),
        )

    def strategy(self):
        if self.intermediary_strategy == "weighted":
            return Weighted(self.intermediary_weights or {})
        return EqualSplit()


class Session:
    """Mutable session aggregate; owned and mutated only by the store."""

    def __init__(self, session_id: str, registry: NodeRegistry):
        self.session_id = session_id
        self.registry = registry
        self.ballots: dict[str, Ballot] = {}
        self.status = STATUS_OPEN
        self.snapshot: dict[str, Any] | None = None
        self.events: list[EventRecord] = []


def _compute_snapshot(session: Session, options: ComputeOptions) -> dict[str, Any]:
    """Pure computation of a snapshot from session state and options."""
    registry = session.registry
    present = [v.id for v in registry.voters if v.id in session.ballots]
    absent = [v.id for v in registry.voters if v.id not in session.ballots]
    if absent and not options.allow_abstentions:
        raise MissingBallot(absent[0])

    effective = registry.restricted_to_voters(present) if absent else registry
    pruned_targets: dict[str, list[str]] = {}
    ballots: list[Ballot] = []
    for source, ballot in sorted(session.ballots.items()):
        if source not in effective:
            continue  # intermediary pruned away with its members
        kept = {t: w for t, w in ballot.allocations.items() if t in effective}
        dropped = sorted(set(ballot.allocations) - set(kept))
        if dropped:
            pruned_targets[source] = dropped
        if not any(w > 0.0 for w in kept.values()):
            raise ZeroMassBallot(source, "allocations target only abstaining voters")
        ballots.append(Ballot(source, kept))

    strategy = options.strategy()
    vote_matrix = build_matrix(effective, ballots, strategy)
    report = validate(vote_matrix, effective)
    try:
        limit = limit_by_squaring(vote_matrix, options.tol, options.max_squarings)
    except NoConvergence as exc:
        # name the culprits: the nodes the validator found stranded
        raise NoConvergence(exc.residual, exc.squarings, report.unreachable_voters) from None
    result = tally(limit, effective)
    influence = influence_report(vote_matrix, effective)
    comparison = (
        compare_with_ld(ballots, effective, strategy, options.tol, options.max_squarings)
        if options.include_ld_comparison
        else None
    )

    return results_document(
        result,
        influence,
        comparison,
        report,
        extras={
            "session_id": session.session_id,
            "options": options.to_payload(),
            "diagnostics": {
                "absent_voters": absent,
                "pruned_targets": pruned_targets,
                "iterations_used": limit.iterations_used,
                "residual": limit.residual,
            },
        },
    )


class SessionStore:
    """Keeps sessions in memory and, when given a directory, on disk.

    On-disk layout: ``<data_dir>/<session_id>.events.jsonl`` and
    ``<data_dir>/<session_id>.snapshot.json``. A fresh store lazily replays
    logs it finds on disk, so restarting a service loses nothing.
    """

    def __init__(self, data_dir: str | Path | None = None):
        self._data_dir = Path(data_dir) if data_dir is not None else None
        if self._data_dir is not None:
            self._data_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    # --- infrastructure -------------------------------------------------------

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def _events_path(self, session_id: str) -> Path | None:
        if self._data_dir is None:
            return None
        return self._data_dir / f"{session_id}.events.jsonl"

    def _snapshot_path(self, session_id: str) -> Path | None:
        if self._data_dir is None:
            return None
        return self._data_dir / f"{session_id}.snapshot.json"

    def _append_event(self, session: Session, kind: str, payload: dict[str, Any]) -> EventRecord:
        record = EventRecord(
            sequence=len(session.events) + 1,
            timestamp=time.time(),
            kind=kind,
            payload=payload,
        )
        session.events.append(record)
        path = self._events_path(session.session_id)
        if path is not None:
            with open(path, "a", encoding="utf-8") as fh:
                fh.write(record.to_json() + "\n")
        return record

    def _get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            session = self._replay_from_disk(session_id)
        if session is None:
            raise UnknownSession(session_id)
        return session

    def _replay_from_disk(self, session_id: str) -> Session | None:
        path = self._events_path(session_id)
        if path is None or not path.exists():
            return None
        with open(path, "r", encoding="utf-8") as fh:
            events = [EventRecord.from_json(line) for line in fh if line.strip()]
        session = replay_events(events)
        self._sessions[session_id] = session
        return session

    # --- operations ------------------------------------------------------------

    def create_session(
        self,
        nodes: Iterable[Mapping[str, Any]] | NodeRegistry,
        session_id: str | None = None,
    ) -> str:
        if isinstance(nodes, NodeRegistry):
            registry = nodes
            node_list = registry_to_node_list(registry)
        else:
            node_list = [dict(n) for n in nodes]
            registry, _ = parse_ballot_data({"nodes": node_list, "ballots": []})
        sid = session_id or uuid.uuid4().hex[:12]
        with self._lock_for(sid):
            events_path = self._events_path(sid)
            if sid in self._sessions or (events_path is not None and events_path.exists()):
                raise UnknownSession(f"session id {sid!r} already in use")
            session = Session(sid, registry)
            self._sessions[sid] = session
            self._append_event(
                session, EVENT_SESSION_CREATED, {"session_id": sid, "nodes": node_list}
            )
        return sid

    def add_node(self, session_id: str, node: Mapping[str, Any]) -> None:
        with self._lock_for(session_id):
            session = self._get(session_id)
            session.registry = _registry_with_node(session.registry, dict(node))
            session.status = STATUS_OPEN
            session.snapshot = None
            self._append_event(session, EVENT_NODE_ADDED, {"node": dict(node)})

    def submit_ballot(
        self, session_id: str, source: str, allocations: Mapping[str, Any]
    ) -> dict[str, Any]:
        with self._lock_for(session_id):
            session = self._get(session_id)
            registry = session.registry
            if source not in registry or registry.kind_of(source) is NodeKind.POLICY:
                raise UnknownSource(source)
            weights = {str(t): _to_float(w) for t, w in allocations.items()}
            for target in weights:
                if target not in registry:
                    raise UnknownTarget(source, target)
            ballot = Ballot(source, weights).normalized()
            session.ballots[source] = ballot
            session.status = STATUS_OPEN
            session.snapshot = None
            self._append_event(
                session,
                EVENT_BALLOT_SUBMITTED,
                {"source": source, "allocations": dict(ballot.allocations)},
            )
            return {"source": source, "allocations": dict(ballot.allocations)}

    def compute(self, session_id: str, options: ComputeOptions | None = None) -> dict[str, Any]:
        options = options or ComputeOptions()
        with self._lock_for(session_id):
            session = self._get(session_id)
            snapshot = _compute_snapshot(session, options)
            session.snapshot = snapshot
            session.status = STATUS_COMPUTED
            self._append_event(session, EVENT_COMPUTED, {"options": options.to_payload()})
            path = self._snapshot_path(session_id)
            if path is not None:
                path.write_text(canonical_json(snapshot) + "\n", encoding="utf-8")
            return snapshot

    def get_session(self, session_id: str) -> Session:
        return self._get(session_id)

    def get_results(self, session_id: str) -> dict[str, Any]:
        session = self._get(session_id)
        if session.status != STATUS_COMPUTED or session.snapshot is None:
            raise NotComputed(session_id)
        return session.snapshot

    def get_influence(self, session_id: str) -> dict[str, Any]:
        return self.get_results(session_id)["influence"]

    def export(self, session_id: str, fmt: str = "json", table: str = "results") -> str:
        """Byte-stable export of the last snapshot.

        ``fmt`` is ``json`` or ``csv``; for csv, ``table`` picks the
        ``results``, ``influence``, or ``comparison`` table.
        """
        snapshot = self.get_results(session_id)
        if fmt == "json":
            if table == "influence":
                return canonical_json(snapshot["influence"])
            if table == "comparison":
                return canonical_json(snapshot["ld_comparison"])
            return canonical_json(snapshot)
        if fmt != "csv":
            raise ValueError(f"unknown export format {fmt!r}")
        session = self._get(session_id)
        tally_result, influence, comparison = _results_from_snapshot(snapshot)
        if table == "influence":
            return influence_to_csv(influence, session.registry)
        if table == "comparison":
            if comparison is None:
                raise NotComputed(session_id)
            return comparison_to_csv(comparison)
        return tally_to_csv(tally_result, session.registry)

    def events(self, session_id: str) -> list[EventRecord]:
        return list(self._get(session_id).events)

    def session_ids(self) -> list[str]:
        ids = set(self._sessions)
        if self._data_dir is not None:
            ids.update(p.name.removesuffix(".events.jsonl") for p in self._data_dir.glob("*.events.jsonl"))
        return sorted(ids)


def _to_float(value: Any) -> float:
    if isinstance(value, str):
        return float(value.strip())
    return float(value)


def _registry_with_node(registry: NodeRegistry, node: dict[str, Any]) -> NodeRegistry:
    kind = NodeKind.parse(str(node["kind"]))
    nodes = list(registry.nodes) + [Node(str(node["id"]), kind, str(node.get("name", "")))]
    membership = registry.membership
    if kind is NodeKind.INTERMEDIARY:
        membership[str(node["id"])] = tuple(str(m) for m in node.get("members", []))
    return NodeRegistry(nodes, membership)


def replay_events(events: Iterable[EventRecord]) -> Session:
    """Rebuild a session purely from its event log.

    The ``Computed`` event stores only the options; the snapshot itself is
    recomputed, which is what makes byte-identical replay a real check on
    engine determinism.
    """
    session: Session | None = None
    for record in events:
        if record.kind == EVENT_SESSION_CREATED:
            registry, _ = parse_ballot_data({"nodes": record.payload["nodes"], "ballots": []})
            session = Session(str(record.payload["session_id"]), registry)
        elif session is None:
            raise UnknownSession("event log does not start with session creation")
        elif record.kind == EVENT_NODE_ADDED:
            session.registry = _registry_with_node(session.registry, record.payload["node"])
        elif record.kind == EVENT_BALLOT_SUBMITTED:
            payload = record.payload
            session.ballots[str(payload["source"])] = Ballot(
                str(payload["source"]),
                {str(t): float(w) for t, w in payload["allocations"].items()},
            )
            session.status = STATUS_OPEN
            session.snapshot = None
        elif record.kind == EVENT_COMPUTED:
            options = ComputeOptions.from_payload(record.payload["options"])
            session.snapshot = _compute_snapshot(session, options)
            session.status = STATUS_COMPUTED
        session.events.append(record)
    if session is None:
        raise UnknownSession("empty event log")
    return session


def _results_from_snapshot(snapshot: Mapping[str, Any]):
    """Rehydrate solver result objects from a snapshot for CSV export."""
    from .solver import InfluenceReport, LdComparison, PolicyComparison, TallyResult

    t = snapshot["tally"]
    tally_result = TallyResult(
        policy_votes=dict(t["policy_votes"]),
        total_delivered=float(t["total_delivered"]),
        undelivered=dict(t["undelivered"]),
        method=str(t["method"]),
        voters_counted=int(t["voters_counted"]),
    )
    i = snapshot["influence"]
    influence = InfluenceReport(
        scores=dict(i["scores"]),
        ranking=tuple(i["ranking"]),
        excluded=tuple(i["excluded"]),
        metadata=dict(i["metadata"]),
    )
    comparison = None
    c = snapshot.get("ld_comparison")
    if c:
        rows = tuple(
            PolicyComparison(
                policy_id=r["policy_id"],
                name=r["name"],
                ppv_score=float(r["ppv_score"]),
                ppv_rank=int(r["ppv_rank"]),
                ld_score=float(r["ld_score"]),
                ld_rank=int(r["ld_rank"]),
                delta_rank=int(r["delta_rank"]),
                delta_score=float(r["delta_score"]),
            )
            for r in c["rows"]
        )
        ppv_t = c["ppv"]
        ld_t = c["ld"]
        comparison = LdComparison(
            ppv=TallyResult(
                policy_votes=dict(ppv_t["policy_votes"]),
                total_delivered=float(ppv_t["total_delivered"]),
                undelivered=dict(ppv_t["undelivered"]),
                method=str(ppv_t["method"]),
                voters_counted=int(ppv_t["voters_counted"]),
            ),
            ld=TallyResult(
                policy_votes=dict(ld_t["policy_votes"]),
                total_delivered=float(ld_t["total_delivered"]),
                undelivered=dict(ld_t["undelivered"]),
                method=str(ld_t["method"]),
                voters_counted=int(ld_t["voters_counted"]),
            ),
            rows=rows,
            ppv_std=float(c["std"]["ppv"]),
            ld_std=float(c["std"]["ld"]),
            metadata=dict(c["metadata"]),
        )
    return tally_result, influence, comparison
