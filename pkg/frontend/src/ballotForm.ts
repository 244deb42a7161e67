/**
 * State of the slider form: one integer slider (0..100) per permitted
 * target. Submission stays blocked while every slider sits at 0; the
 * normalized preview is recomputed on each move and always sums to 1 once
 * any slider is positive.
 */

import { normalizeRatings, percentPreview } from "./normalize.js";
import { NodeSpec } from "./types.js";

export const SLIDER_MIN = 0;
export const SLIDER_MAX = 100;

export interface SliderGroup {
  label: "Proposals" | "Categories" | "Teams" | "Peers";
  targets: NodeSpec[];
}

/** Intermediaries whose members are all policies act as categories;
 * anything else (it contains people somewhere) is a team. */
export function intermediaryLabel(node: NodeSpec, policyIds: Set<string>): "Categories" | "Teams" {
  const members = node.members ?? [];
  const allPolicies = members.length > 0 && members.every((m) => policyIds.has(m));
  return allPolicies ? "Categories" : "Teams";
}

/** Every node except the voting participant gets a slider, grouped by type. */
export function sliderGroups(nodes: NodeSpec[], selfId: string): SliderGroup[] {
  const policyIds = new Set(nodes.filter((n) => n.kind === "policy").map((n) => n.id));
  const groups: Record<SliderGroup["label"], NodeSpec[]> = {
    Proposals: [],
    Categories: [],
    Teams: [],
    Peers: [],
  };
  for (const node of nodes) {
    if (node.id === selfId) continue; // no self-rating slider
    if (node.kind === "policy") groups.Proposals.push(node);
    else if (node.kind === "voter") groups.Peers.push(node);
    else groups[intermediaryLabel(node, policyIds)].push(node);
  }
  return (Object.keys(groups) as SliderGroup["label"][])
    .filter((label) => groups[label].length > 0)
    .map((label) => ({ label, targets: groups[label] }));
}

export class BallotFormState {
  readonly selfId: string;
  private values = new Map<string, number>();
  private touched = false;

  constructor(nodes: NodeSpec[], selfId: string) {
    this.selfId = selfId;
    for (const group of sliderGroups(nodes, selfId)) {
      for (const target of group.targets) {
        this.values.set(target.id, 0);
      }
    }
  }

  set(targetId: string, value: number): void {
    if (!this.values.has(targetId)) {
      throw new Error(`no slider for ${targetId}`);
    }
    if (!Number.isInteger(value) || value < SLIDER_MIN || value > SLIDER_MAX) {
      throw new Error(`slider value must be an integer in ${SLIDER_MIN}..${SLIDER_MAX}`);
    }
    this.values.set(targetId, value);
    this.touched = true;
  }

  get(targetId: string): number {
    return this.values.get(targetId) ?? 0;
  }

  get dirty(): boolean {
    return this.touched;
  }

  markSubmitted(): void {
    this.touched = false;
  }

  /** Raw ratings with zeros dropped, in slider order. */
  ratings(): Record<string, number> {
    const out: Record<string, number> = {};
    for (const [target, value] of this.values) {
      if (value > 0) out[target] = value;
    }
    return out;
  }

  get canSubmit(): boolean {
    for (const value of this.values.values()) {
      if (value > 0) return true;
    }
    return false;
  }

  /** Normalized weights exactly as the service will store them. */
  normalizedWeights(): Record<string, number> {
    return normalizeRatings(this.ratings());
  }

  /** Rounded percentages for the live preview next to each slider. */
  preview(): Record<string, number> {
    return this.canSubmit ? percentPreview(this.ratings()) : {};
  }
}

/** Static HTML for the form; the host page wires input events to the state. */
export function renderBallotForm(
  nodes: NodeSpec[],
  selfId: string,
  readOnly = false
): string {
  const groups = sliderGroups(nodes, selfId);
  const disabled = readOnly ? " disabled" : "";
  const sections = groups.map((group) => {
    const rows = group.targets
      .map(
        (t) =>
          `<label class="slider-row" data-target="${t.id}">` +
          `<span class="target-name">${escapeHtml(t.name || t.id)}</span>` +
          `<input type="range" min="${SLIDER_MIN}" max="${SLIDER_MAX}" step="1" value="0"` +
          ` data-target="${t.id}"${disabled}>` +
          `<span class="preview" data-preview="${t.id}"></span>` +
          `</label>`
      )
      .join("");
    return `<fieldset><legend>${group.label}</legend>${rows}</fieldset>`;
  });
  const submit = `<button type="submit" disabled${readOnly ? ' data-readonly="true"' : ""}>Submit ballot</button>`;
  return `<form class="ballot${readOnly ? " readonly" : ""}">${sections.join("")}${submit}</form>`;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
