/**
 * Pure projections of the service JSON into table view models and HTML.
 * No score is computed, rounded into the model, or re-ranked here: the
 * numbers and orderings come from the service verbatim.
 */

import { escapeHtml } from "./ballotForm.js";
import { NodeSpec, ResultsDocument } from "./types.js";

export type EntityType = "User" | "Team" | "Category";

export interface PolicyRow {
  rank: number;
  id: string;
  name: string;
  votes: number;
}

export interface InfluenceRow {
  rank: number;
  id: string;
  name: string;
  type: EntityType;
  score: number;
}

export interface ComparisonViewRow {
  name: string;
  ppvScore: number;
  ppvRank: number;
  ldScore: number;
  ldRank: number;
  deltaRank: number;
  deltaScore: number;
}

export interface ResultsViewModel {
  policies: PolicyRow[];
  influence: InfluenceRow[];
  comparison: ComparisonViewRow[] | null;
}

function nameIndex(nodes: NodeSpec[]): Map<string, NodeSpec> {
  return new Map(nodes.map((n) => [n.id, n]));
}

export function entityType(node: NodeSpec | undefined, policyIds: Set<string>): EntityType {
  if (!node || node.kind === "voter") return "User";
  const members = node.members ?? [];
  const allPolicies = members.length > 0 && members.every((m) => policyIds.has(m));
  return allPolicies ? "Category" : "Team";
}

export function buildViewModel(results: ResultsDocument, nodes: NodeSpec[]): ResultsViewModel {
  const byId = nameIndex(nodes);
  const policyIds = new Set(nodes.filter((n) => n.kind === "policy").map((n) => n.id));

  const policies = results.tally.ranking.map(([id, votes], i) => ({
    rank: i + 1,
    id,
    name: byId.get(id)?.name ?? id,
    votes,
  }));

  const influence = results.influence.ranking.map((id, i) => ({
    rank: i + 1,
    id,
    name: byId.get(id)?.name ?? id,
    type: entityType(byId.get(id), policyIds),
    score: results.influence.scores[id],
  }));

  const comparison = results.ld_comparison
    ? results.ld_comparison.rows.map((row) => ({
        name: row.name,
        ppvScore: row.ppv_score,
        ppvRank: row.ppv_rank,
        ldScore: row.ld_score,
        ldRank: row.ld_rank,
        deltaRank: row.delta_rank,
        deltaScore: row.delta_score,
      }))
    : null;

  return { policies, influence, comparison };
}

export function renderPolicyTable(rows: PolicyRow[]): string {
  const body = rows
    .map(
      (r) =>
        `<tr><td>${r.rank}</td><td>${escapeHtml(r.name)}</td><td>${r.votes}</td></tr>`
    )
    .join("");
  return (
    `<table class="policies"><thead><tr><th>Rank</th><th>Proposal</th><th>Votes</th></tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}

/** Top-N collapsed influence view (service order, 15 rows by default). */
export function renderInfluenceTable(rows: InfluenceRow[], topN = 15): string {
  const shown = rows.slice(0, topN);
  const body = shown
    .map(
      (r) =>
        `<tr><td>${r.rank}</td><td>${escapeHtml(r.name)}</td>` +
        `<td>${r.score}</td><td>${r.type}</td></tr>`
    )
    .join("");
  const more =
    rows.length > shown.length
      ? `<tfoot><tr><td colspan="4">… ${rows.length - shown.length} more</td></tr></tfoot>`
      : "";
  return (
    `<table class="influence"><thead><tr><th>Rank</th><th>Entity Name</th><th>Score</th><th>Type</th></tr></thead>` +
    `<tbody>${body}</tbody>${more}</table>`
  );
}

function signClass(value: number): string {
  if (value > 0) return "delta-pos";
  if (value < 0) return "delta-neg";
  return "delta-zero";
}

function signed(value: number): string {
  return value > 0 ? `+${value}` : `${value}`;
}

export function renderComparisonTable(rows: ComparisonViewRow[]): string {
  const body = rows
    .map(
      (r) =>
        `<tr><td>${escapeHtml(r.name)}</td><td>${r.ppvScore}</td><td>${r.ldScore}</td>` +
        `<td class="${signClass(r.deltaRank)}">${signed(r.deltaRank)}</td>` +
        `<td class="${signClass(r.deltaScore)}">${signed(r.deltaScore)}</td></tr>`
    )
    .join("");
  return (
    `<table class="comparison"><thead><tr><th>Proposal</th><th>Score</th><th>Whole-vote score</th>` +
    `<th>Δ Rank</th><th>Δ Score</th></tr></thead><tbody>${body}</tbody></table>`
  );
}

export function renderResults(model: ResultsViewModel): string {
  const parts = [renderPolicyTable(model.policies), renderInfluenceTable(model.influence)];
  if (model.comparison) parts.push(renderComparisonTable(model.comparison));
  return `<section class="results">${parts.join("")}</section>`;
}
