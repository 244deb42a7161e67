/**
 * Results polling: the service pushes nothing, so the view asks every two
 * seconds. A 409 means "not computed yet" and keeps the loop alive; any
 * other failure is handed to the error callback verbatim.
 */

import { ServiceFailure, SessionApi } from "./api.js";
import { ResultsDocument } from "./types.js";

export const POLL_INTERVAL_MS = 2000;

export interface PollHandle {
  stop(): void;
}

export function pollResults(
  api: SessionApi,
  sessionId: string,
  onResults: (results: ResultsDocument) => void,
  onError: (error: ServiceFailure) => void = () => {},
  intervalMs: number = POLL_INTERVAL_MS,
  schedule: (fn: () => void, ms: number) => unknown = setTimeout,
  cancel: (handle: unknown) => void = (handle) => clearTimeout(handle as ReturnType<typeof setTimeout>)
): PollHandle {
  let stopped = false;
  let timer: unknown;

  const tick = async () => {
    if (stopped) return;
    try {
      const results = await api.getResults(sessionId);
      if (!stopped) onResults(results);
    } catch (error) {
      if (error instanceof ServiceFailure && error.status === 409) {
        // nothing computed yet; keep waiting
      } else if (error instanceof ServiceFailure) {
        onError(error);
      } else {
        throw error;
      }
    }
    if (!stopped) timer = schedule(tick, intervalMs);
  };

  timer = schedule(tick, 0);
  return {
    stop() {
      stopped = true;
      cancel(timer);
    },
  };
}
