/**
 * Browser wiring: read session/voter from the query string, render the
 * slider form, submit on click, and poll for results. Everything testable
 * lives in the other modules; this file only touches the DOM.
 */

import { SessionApi, ServiceFailure } from "./api.js";
import { BallotFormState, renderBallotForm } from "./ballotForm.js";
import { pollResults } from "./poll.js";
import { buildViewModel, renderResults } from "./resultsView.js";
import { NodeSpec } from "./types.js";

declare global {
  interface Window {
    PPV_NODES?: NodeSpec[];
  }
}

function query(name: string): string | null {
  return new URLSearchParams(window.location.search).get(name);
}

export function boot(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const sessionId = query("session");
  const selfId = query("voter");
  const nodes = window.PPV_NODES ?? [];
  if (!sessionId || !selfId || nodes.length === 0) {
    root.innerHTML =
      "<p>Pass ?session=&lt;id&gt;&amp;voter=&lt;id&gt; and define window.PPV_NODES.</p>";
    return;
  }

  const api = new SessionApi("");
  const state = new BallotFormState(nodes, selfId);

  root.innerHTML =
    `<div id="ballot">${renderBallotForm(nodes, selfId)}</div>` +
    `<div id="status"></div><div id="results"></div>`;
  const form = root.querySelector("form.ballot") as HTMLFormElement;
  const submit = form.querySelector("button") as HTMLButtonElement;
  const status = document.getElementById("status") as HTMLElement;

  form.addEventListener("input", (event) => {
    const input = event.target as HTMLInputElement;
    const target = input.dataset.target;
    if (!target) return;
    state.set(target, Number(input.value));
    const preview = state.preview();
    for (const span of form.querySelectorAll<HTMLElement>("[data-preview]")) {
      const id = span.dataset.preview as string;
      span.textContent = id in preview ? `${preview[id]}%` : "";
    }
    submit.disabled = !state.canSubmit;
  });

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    if (!state.canSubmit) return;
    try {
      const ack = await api.submitBallot(sessionId, selfId, state.ratings());
      state.markSubmitted();
      status.textContent = `ballot stored: ${JSON.stringify(ack.allocations)}`;
    } catch (error) {
      if (error instanceof ServiceFailure) {
        status.textContent = `${error.code}: ${error.detail}`;
      } else {
        throw error;
      }
    }
  });

  const resultsRoot = document.getElementById("results") as HTMLElement;
  pollResults(
    api,
    sessionId,
    (results) => {
      resultsRoot.innerHTML = renderResults(buildViewModel(results, nodes));
    },
    (error) => {
      status.textContent = `${error.code}: ${error.detail}`;
    }
  );
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
