/** Thin typed client for the five service endpoints. Service errors are
 * surfaced verbatim, code and detail untouched. */

import { BallotAck, InfluenceDocument, NodeSpec, ResultsDocument } from "./types.js";

export class ServiceFailure extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly detail: string
  ) {
    super(`${code}: ${detail}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface ComputeRequest {
  tol?: number;
  max_squarings?: number;
  intermediary_strategy?: string;
  include_ld_comparison?: boolean;
  allow_abstentions?: boolean;
}

export class SessionApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const text = await response.text();
    if (!response.ok) {
      let code = `HTTP ${response.status}`;
      let detail = text;
      try {
        const body = JSON.parse(text);
        if (body.error) {
          code = body.error;
          detail = body.detail ?? text;
        }
      } catch {
        // non-JSON error body: keep raw text
      }
      throw new ServiceFailure(response.status, code, detail);
    }
    return JSON.parse(text) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createSession(nodes: NodeSpec[], sessionId?: string): Promise<{ session_id: string }> {
    return this.post("/sessions", { nodes, session_id: sessionId ?? null });
  }

  submitBallot(
    sessionId: string,
    source: string,
    allocations: Record<string, number>
  ): Promise<BallotAck> {
    return this.post(`/sessions/${sessionId}/ballots`, { source, allocations });
  }

  compute(sessionId: string, options: ComputeRequest = {}): Promise<ResultsDocument> {
    return this.post(`/sessions/${sessionId}/compute`, options);
  }

  getResults(sessionId: string): Promise<ResultsDocument> {
    return this.request(`/sessions/${sessionId}/results`);
  }

  getInfluence(sessionId: string): Promise<InfluenceDocument> {
    return this.request(`/sessions/${sessionId}/influence`);
  }
}
