"""File formats: ballot files, result documents, CSV tables, matrix dumps.

Ballot file (JSON)::

    {
      "nodes": [
        {"id": "alice", "kind": "voter", "name": "Alice"},
        {"id": "asia", "kind": "intermediary", "members": ["seoul", "hanoi"]},
        {"id": "seoul", "kind": "policy", "name": "Seoul"}
      ],
      "ballots": [
        {"source": "alice", "allocations": {"seoul": 0.6, "asia": "0.4"}}
      ],
      "intermediary_weights": {"asia": {"seoul": 2, "hanoi": 1}}   // optional
    }

Weights are accepted as numbers or decimal strings. Node kinds are
case-insensitive. All JSON emitted here is canonical (sorted keys, fixed
separators), so a fixed snapshot always serializes to identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Mapping, Sequence

from .ballots import Ballot
from .errors import InvalidRegistry
from .matrix import ValidationReport, VotingMatrix
from .registry import Node, NodeKind, NodeRegistry
from .solver import InfluenceReport, LdComparison, LimitMatrix, TallyResult
from .utility import (
    FeedbackParams,
    GParams,
    SimulationConfig,
    SimulationResult,
    VoterProfile,
)


def _weight(value: Any) -> float:
    if isinstance(value, str):
        return float(value.strip())
    return float(value)


# --- ballot files -------------------------------------------------------------

def parse_ballot_data(data: Mapping[str, Any]) -> tuple[NodeRegistry, list[Ballot]]:
    if "nodes" not in data:
        raise InvalidRegistry("ballot file needs a 'nodes' list")
    nodes: list[Node] = []
    membership: dict[str, list[str]] = {}
    for entry in data["nodes"]:
        kind = NodeKind.parse(str(entry["kind"]))
        nodes.append(Node(str(entry["id"]), kind, str(entry.get("name", ""))))
        if kind is NodeKind.INTERMEDIARY:
            membership[str(entry["id"])] = [str(m) for m in entry.get("members", [])]
    registry = NodeRegistry(nodes, membership)
    ballots = [
        Ballot(
            str(b["source"]),
            {str(t): _weight(w) for t, w in b.get("allocations", {}).items()},
        )
        for b in data.get("ballots", [])
    ]
    return registry, ballots


def load_ballot_file(path: str | Path) -> tuple[NodeRegistry, list[Ballot]]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_ballot_data(json.load(fh))


def intermediary_weights_from(data: Mapping[str, Any]) -> dict[str, dict[str, float]]:
    raw = data.get("intermediary_weights", {})
    return {str(k): {str(m): _weight(w) for m, w in v.items()} for k, v in raw.items()}


def registry_to_node_list(registry: NodeRegistry) -> list[dict[str, Any]]:
    out = []
    for node in registry.nodes:
        entry: dict[str, Any] = {"id": node.id, "kind": node.kind.value, "name": node.name}
        if node.kind is NodeKind.INTERMEDIARY:
            entry["members"] = list(registry.members_of(node.id))
        out.append(entry)
    return out


def ballots_to_list(ballots: Sequence[Ballot]) -> list[dict[str, Any]]:
    return [{"source": b.source, "allocations": dict(b.allocations)} for b in ballots]


def session_to_ballot_data(registry: NodeRegistry, ballots: Sequence[Ballot]) -> dict[str, Any]:
    return {"nodes": registry_to_node_list(registry), "ballots": ballots_to_list(ballots)}


# --- result documents -----------------------------------------------------------

def canonical_json(document: Any) -> str:
    return json.dumps(document, sort_keys=True, separators=(",", ":"), allow_nan=False)


def tally_to_dict(result: TallyResult) -> dict[str, Any]:
    return {
        "policy_votes": dict(result.policy_votes),
        "total_delivered": result.total_delivered,
        "undelivered": dict(result.undelivered),
        "method": result.method,
        "voters_counted": result.voters_counted,
        "ranking": [list(pair) for pair in result.ranking()],
    }


def influence_to_dict(report: InfluenceReport) -> dict[str, Any]:
    return {
        "scores": dict(report.scores),
        "ranking": list(report.ranking),
        "excluded": list(report.excluded),
        "metadata": dict(report.metadata),
    }


def comparison_to_dict(comparison: LdComparison) -> dict[str, Any]:
    return {
        "ppv": tally_to_dict(comparison.ppv),
        "ld": tally_to_dict(comparison.ld),
        "rows": [
            {
                "policy_id": r.policy_id,
                "name": r.name,
                "ppv_score": r.ppv_score,
                "ppv_rank": r.ppv_rank,
                "ld_score": r.ld_score,
                "ld_rank": r.ld_rank,
                "delta_rank": r.delta_rank,
                "delta_score": r.delta_score,
            }
            for r in comparison.rows
        ],
        "std": {"ppv": comparison.ppv_std, "ld": comparison.ld_std},
        "metadata": dict(comparison.metadata),
    }


def validation_to_dict(report: ValidationReport) -> dict[str, Any]:
    return {
        "ok": report.ok,
        "violations": [
            {"rule_id": v.rule_id, "node_id": v.node_id, "detail": v.detail}
            for v in report.violations
        ],
        "unreachable_voters": list(report.unreachable_voters),
        "warnings": [
            {"rule_id": v.rule_id, "node_id": v.node_id, "detail": v.detail}
            for v in report.warnings
        ],
    }


def results_document(
    tally: TallyResult,
    influence: InfluenceReport,
    comparison: LdComparison | None = None,
    validation: ValidationReport | None = None,
    extras: Mapping[str, Any] | None = None,
) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "policy_votes": dict(tally.policy_votes),
        "undelivered": dict(tally.undelivered),
        "influence": influence_to_dict(influence),
        "ld_comparison": comparison_to_dict(comparison) if comparison else None,
        "tally": tally_to_dict(tally),
    }
    if validation is not None:
        doc["validation"] = validation_to_dict(validation)
    if extras:
        doc.update(dict(extras))
    return doc


# --- CSV tables ---------------------------------------------------------------

def _csv(rows: Sequence[Sequence[Any]], header: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def tally_to_csv(result: TallyResult, registry: NodeRegistry | None = None) -> str:
    rows = []
    for rank, (pid, votes) in enumerate(result.ranking(), start=1):
        name = registry.node(pid).name if registry is not None else pid
        rows.append([rank, pid, name, repr(votes)])
    return _csv(rows, ["rank", "policy_id", "name", "votes"])


def influence_to_csv(report: InfluenceReport, registry: NodeRegistry | None = None) -> str:
    rows = []
    for rank, nid in enumerate(report.ranking, start=1):
        name = registry.node(nid).name if registry is not None else nid
        kind = registry.kind_of(nid).value if registry is not None else ""
        rows.append([rank, nid, name, kind, repr(report.scores[nid])])
    return _csv(rows, ["rank", "node_id", "name", "kind", "score"])


def comparison_to_csv(comparison: LdComparison) -> str:
    rows = [
        [
            r.policy_id,
            r.name,
            repr(r.ppv_score),
            r.ppv_rank,
            repr(r.ld_score),
            r.ld_rank,
            r.delta_rank,
            repr(r.delta_score),
        ]
        for r in comparison.rows
    ]
    return _csv(
        rows,
        ["policy_id", "name", "ppv_score", "ppv_rank", "ld_score", "ld_rank", "delta_rank", "delta_score"],
    )


def matrix_to_text(matrix: VotingMatrix | LimitMatrix) -> str:
    """Dense dump, one matrix row per line, entries as full-precision decimals."""
    lines = [" ".join(repr(float(x)) for x in row) for row in matrix.entries]
    return "\n".join(lines) + "\n"


# --- simulation config and trajectory -------------------------------------------

def parse_simulation_data(
    data: Mapping[str, Any],
) -> tuple[SimulationConfig, NodeRegistry]:
    policies = [str(p) for p in data.get("policies", [])]
    voters_spec = data.get("voters", {})
    if not policies or not voters_spec:
        raise InvalidRegistry("simulation config needs 'policies' and 'voters'")

    profiles: dict[str, VoterProfile] = {}
    for vid, spec in voters_spec.items():
        profiles[str(vid)] = VoterProfile(
            preference=[_weight(x) for x in spec["preference"]],
            expertise={str(k): _weight(v) for k, v in spec.get("expertise", {}).items()},
            theta=_weight(spec.get("theta", 1.0)),
            rho=_weight(spec.get("rho", 0.5)),
            beta=_weight(spec.get("beta", 1.0)),
            gamma=_weight(spec.get("gamma", 0.0)),
            gamma_chain=_weight(spec.get("gamma_chain", 0.0)),
        )

    g_raw = data.get("g_params", {})
    f_raw = data.get("feedback", {})
    config = SimulationConfig(
        periods=int(data.get("periods", 1)),
        profiles=profiles,
        g_params=GParams(
            w_e=_weight(g_raw.get("w_e", 1.0)),
            w_f=_weight(g_raw.get("w_f", 1.0)),
            momentum=_weight(g_raw.get("momentum", 0.0)),
        ),
        feedback=FeedbackParams(
            mu=_weight(f_raw.get("mu", 0.2)),
            outcome_size=int(f_raw.get("outcome_size", 1)),
        ),
        seed=(int(data["seed"]) if "seed" in data else None),
        initial=str(data.get("initial", "uniform")),
    )

    names = {str(k): str(v) for k, v in data.get("names", {}).items()}
    nodes = [Node(v, NodeKind.VOTER, names.get(v, "")) for v in profiles]
    nodes += [Node(p, NodeKind.POLICY, names.get(p, "")) for p in policies]
    registry = NodeRegistry(nodes)
    return config, registry


def load_simulation_config(path: str | Path) -> tuple[SimulationConfig, NodeRegistry]:
    path = Path(path)
    if path.suffix.lower() == ".toml":
        try:
            import tomllib  # Python >= 3.11
        except ModuleNotFoundError:
            import tomli as tomllib
        with open(path, "rb") as fh:
            return parse_simulation_data(tomllib.load(fh))
    with open(path, "r", encoding="utf-8") as fh:
        return parse_simulation_data(json.load(fh))


def trajectory_to_csv(result: SimulationResult) -> str:
    rows = []
    for state in result.states:
        outgoing = state.delegations.sum(axis=0)
        for j, voter in enumerate(result.voters):
            rows.append(
                [
                    state.period,
                    voter,
                    repr(state.incoming[voter]),
                    repr(float(outgoing[j])),
                    repr(state.utilities[voter]),
                    repr(state.cumulative[voter]),
                ]
            )
    return _csv(rows, ["period", "voter", "incoming", "outgoing", "utility", "cumulative"])


def trajectory_to_dict(result: SimulationResult) -> dict[str, Any]:
    return {
        "voters": list(result.voters),
        "policies": list(result.policies),
        "periods": [
            {
                "period": s.period,
                "delegations": [[float(x) for x in row] for row in s.delegations],
                "weights": [[float(x) for x in row] for row in s.weights],
                "utilities": dict(s.utilities),
                "outcome_utilities": dict(s.outcome_utilities),
                "cumulative": dict(s.cumulative),
                "incoming": dict(s.incoming),
                "outcome": list(s.outcome),
                "tally": tally_to_dict(s.tally),
            }
            for s in result.states
        ],
    }
