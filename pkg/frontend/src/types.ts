/** Payload shapes of the session service JSON API. */

export type NodeKind = "voter" | "intermediary" | "policy";

export interface NodeSpec {
  id: string;
  kind: NodeKind;
  name: string;
  members?: string[];
}

export interface BallotAck {
  source: string;
  allocations: Record<string, number>;
}

export interface TallyDocument {
  policy_votes: Record<string, number>;
  total_delivered: number;
  undelivered: Record<string, number>;
  method: string;
  voters_counted: number;
  ranking: [string, number][];
}

export interface InfluenceDocument {
  scores: Record<string, number>;
  ranking: string[];
  excluded: string[];
  metadata: Record<string, string>;
}

export interface ComparisonRow {
  policy_id: string;
  name: string;
  ppv_score: number;
  ppv_rank: number;
  ld_score: number;
  ld_rank: number;
  delta_rank: number;
  delta_score: number;
}

export interface ComparisonDocument {
  ppv: TallyDocument;
  ld: TallyDocument;
  rows: ComparisonRow[];
  std: { ppv: number; ld: number };
  metadata: Record<string, string>;
}

export interface ResultsDocument {
  policy_votes: Record<string, number>;
  undelivered: Record<string, number>;
  influence: InfluenceDocument;
  ld_comparison: ComparisonDocument | null;
  tally: TallyDocument;
  [extra: string]: unknown;
}

export interface ServiceError {
  error: string;
  detail: string;
}
