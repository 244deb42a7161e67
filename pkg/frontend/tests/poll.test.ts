import { describe, expect, it, vi } from "vitest";

import { SessionApi, ServiceFailure } from "../src/api.js";
import { pollResults } from "../src/poll.js";
import roundtrip from "./fixtures/session_roundtrip.json";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function immediateScheduler() {
  // runs callbacks on a microtask queue we drain manually
  const queue: (() => void)[] = [];
  return {
    schedule: (fn: () => void) => {
      queue.push(fn);
      return queue.length;
    },
    cancel: () => {},
    async drain(rounds: number) {
      for (let i = 0; i < rounds && queue.length; i++) {
        queue.shift()!();
        // a real macrotask flushes the whole fetch/json promise chain
        await new Promise((resolve) => setTimeout(resolve, 0));
      }
    },
  };
}

describe("pollResults", () => {
  it("keeps polling through not-computed and then delivers results", async () => {
    const results = (roundtrip as { results: unknown }).results;
    let calls = 0;
    const fetchImpl = vi.fn(async () => {
      calls += 1;
      if (calls < 3) {
        return jsonResponse(409, { error: "NotComputed", detail: "nothing yet" });
      }
      return jsonResponse(200, results);
    });
    const api = new SessionApi("http://service", fetchImpl);
    const seen: unknown[] = [];
    const scheduler = immediateScheduler();
    const handle = pollResults(
      api,
      "s1",
      (r) => seen.push(r),
      () => {
        throw new Error("409 must not surface as an error");
      },
      1,
      scheduler.schedule,
      scheduler.cancel
    );
    await scheduler.drain(5);
    handle.stop();
    expect(calls).toBeGreaterThanOrEqual(3);
    expect(seen.length).toBeGreaterThanOrEqual(1);
    expect(JSON.stringify(seen[0])).toBe(JSON.stringify(results));
  });

  it("surfaces other service errors verbatim", async () => {
    const fetchImpl = vi.fn(async () =>
      jsonResponse(404, { error: "UnknownSession", detail: "no session 'x'" })
    );
    const api = new SessionApi("http://service", fetchImpl);
    const errors: ServiceFailure[] = [];
    const scheduler = immediateScheduler();
    const handle = pollResults(
      api,
      "x",
      () => {},
      (e) => errors.push(e),
      1,
      scheduler.schedule,
      scheduler.cancel
    );
    await scheduler.drain(2);
    handle.stop();
    expect(errors.length).toBeGreaterThanOrEqual(1);
    expect(errors[0].code).toBe("UnknownSession");
    expect(errors[0].detail).toBe("no session 'x'");
    expect(errors[0].status).toBe(404);
  });

  it("stops scheduling after stop()", async () => {
    const fetchImpl = vi.fn(async () => jsonResponse(409, { error: "NotComputed", detail: "" }));
    const api = new SessionApi("http://service", fetchImpl);
    const scheduler = immediateScheduler();
    const handle = pollResults(api, "s1", () => {}, () => {}, 1, scheduler.schedule, scheduler.cancel);
    await scheduler.drain(1);
    handle.stop();
    const callsAtStop = fetchImpl.mock.calls.length;
    await scheduler.drain(5);
    expect(fetchImpl.mock.calls.length).toBe(callsAtStop);
  });
});

describe("SessionApi", () => {
  it("posts ballots and parses the ack", async () => {
    const fetchImpl = vi.fn(async (url: string, init?: RequestInit) => {
      expect(url).toBe("http://service/sessions/s1/ballots");
      expect(init?.method).toBe("POST");
      const body = JSON.parse(String(init?.body));
      expect(body.source).toBe("v01");
      return jsonResponse(200, { source: "v01", allocations: { prop01: 1.0 } });
    });
    const api = new SessionApi("http://service", fetchImpl);
    const ack = await api.submitBallot("s1", "v01", { prop01: 5 });
    expect(ack.allocations).toEqual({ prop01: 1.0 });
  });
});
