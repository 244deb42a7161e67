import { describe, expect, it } from "vitest";

import {
  BallotFormState,
  renderBallotForm,
  sliderGroups,
} from "../src/ballotForm.js";
import roundtrip from "./fixtures/session_roundtrip.json";
import { NodeSpec } from "../src/types.js";

const nodes = (roundtrip as { nodes: NodeSpec[] }).nodes;

describe("sliderGroups", () => {
  it("offers one slider per permitted target: 102 for the workshop shape", () => {
    // 20 proposals + 4 categories + 10 teams + 68 peers (self excluded)
    const groups = sliderGroups(nodes, "v01");
    const total = groups.reduce((n, g) => n + g.targets.length, 0);
    expect(total).toBe(102);
    const byLabel = Object.fromEntries(groups.map((g) => [g.label, g.targets.length]));
    expect(byLabel).toEqual({ Proposals: 20, Categories: 4, Teams: 10, Peers: 68 });
  });

  it("never offers a self slider", () => {
    for (const group of sliderGroups(nodes, "v07")) {
      expect(group.targets.some((t) => t.id === "v07")).toBe(false);
    }
  });

  it("labels policy-only intermediaries as categories, the rest as teams", () => {
    const groups = sliderGroups(nodes, "v01");
    const categories = groups.find((g) => g.label === "Categories")!;
    expect(categories.targets.map((t) => t.id)).toEqual(["cat1", "cat2", "cat3", "cat4"]);
    const teams = groups.find((g) => g.label === "Teams")!;
    expect(teams.targets.every((t) => t.id.startsWith("team"))).toBe(true);
  });
});

describe("BallotFormState", () => {
  it("blocks submission until some slider is positive", () => {
    const state = new BallotFormState(nodes, "v01");
    expect(state.canSubmit).toBe(false);
    state.set("prop01", 1);
    expect(state.canSubmit).toBe(true);
    state.set("prop01", 0);
    expect(state.canSubmit).toBe(false);
  });

  it("tracks dirtiness across edits and submission", () => {
    const state = new BallotFormState(nodes, "v01");
    expect(state.dirty).toBe(false);
    state.set("prop02", 40);
    expect(state.dirty).toBe(true);
    state.markSubmitted();
    expect(state.dirty).toBe(false);
  });

  it("accepts only integers within the slider range", () => {
    const state = new BallotFormState(nodes, "v01");
    expect(() => state.set("prop01", 3.5)).toThrow();
    expect(() => state.set("prop01", -1)).toThrow();
    expect(() => state.set("prop01", 101)).toThrow();
    expect(() => state.set("v01", 10)).toThrow(); // no self slider exists
  });

  it("normalized weights sum to 1 once any slider is up", () => {
    const state = new BallotFormState(nodes, "v01");
    state.set("prop01", 3);
    state.set("cat1", 2);
    const weights = state.normalizedWeights();
    expect(weights).toEqual({ prop01: 0.6, cat1: 0.4 });
    const total = Object.values(weights).reduce((a, b) => a + b, 0);
    expect(Math.abs(total - 1)).toBeLessThanOrEqual(1e-12);
  });

  it("previews 60/40 for sliders at 3 and 2", () => {
    const state = new BallotFormState(nodes, "v01");
    state.set("prop01", 3);
    state.set("prop02", 2);
    expect(state.preview()).toEqual({ prop01: 60, prop02: 40 });
  });
});

describe("renderBallotForm", () => {
  it("renders one range input per permitted target", () => {
    const html = renderBallotForm(nodes, "v01");
    const sliders = html.match(/type="range"/g) ?? [];
    expect(sliders.length).toBe(102);
    expect(html).not.toContain('data-target="v01"');
  });

  it("starts with the submit button disabled", () => {
    const html = renderBallotForm(nodes, "v01");
    expect(html).toContain("<button type=\"submit\" disabled");
  });

  it("disables every slider in read-only mode", () => {
    const html = renderBallotForm(nodes, "v01", true);
    const sliders = html.match(/type="range"[^>]*disabled/g) ?? [];
    expect(sliders.length).toBe(102);
    expect(html).toContain('class="ballot readonly"');
  });
});
