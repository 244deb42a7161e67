/**
 * Slider ratings -> normalized vote weights.
 *
 * This must agree with the service's normalization bit for bit: only
 * strictly positive ratings count, the total is accumulated in entry
 * order, each weight is rating / total, and a vector already summing to 1
 * (within 1e-12) is passed through untouched. Both sides run IEEE-754
 * doubles, so identical operation order means identical bytes.
 */

export function normalizeRatings(ratings: Record<string, number>): Record<string, number> {
  const positive: Record<string, number> = {};
  let total = 0;
  for (const [target, value] of Object.entries(ratings)) {
    if (!Number.isFinite(value) || value < 0) {
      throw new Error(`rating for ${target} must be a finite number >= 0, got ${value}`);
    }
    if (value > 0) {
      positive[target] = value;
      total += value;
    }
  }
  if (total === 0) {
    throw new Error("no strictly positive rating");
  }
  if (Math.abs(total - 1.0) <= 1e-12) {
    return positive;
  }
  const weights: Record<string, number> = {};
  for (const [target, value] of Object.entries(positive)) {
    weights[target] = value / total;
  }
  return weights;
}

/** Percentage preview for the form (display only, never sent). */
export function percentPreview(ratings: Record<string, number>): Record<string, number> {
  const weights = normalizeRatings(ratings);
  const preview: Record<string, number> = {};
  for (const [target, w] of Object.entries(weights)) {
    preview[target] = Math.round(w * 1000) / 10;
  }
  return preview;
}

/**
 * Serialize a value exactly like the service does (Python json.dumps with
 * compact separators): object keys in insertion order, floats in Python's
 * repr form, so whole floats carry a trailing ".0" and magnitudes below
 * 1e-4 switch to exponent notation with a two-digit exponent.
 *
 * Byte-faithful only for payloads whose numeric leaves are all floats on
 * the service side (ballot acknowledgments are; rank-bearing documents
 * are not, since JavaScript cannot tell an int from a whole float).
 */
export function serviceJson(value: unknown): string {
  if (value === null) return "null";
  if (typeof value === "boolean") return value ? "true" : "false";
  if (typeof value === "number") return pythonFloat(value);
  if (typeof value === "string") return JSON.stringify(value);
  if (Array.isArray(value)) {
    return "[" + value.map(serviceJson).join(",") + "]";
  }
  const entries = Object.entries(value as Record<string, unknown>).map(
    ([k, v]) => JSON.stringify(k) + ":" + serviceJson(v)
  );
  return "{" + entries.join(",") + "}";
}

function pythonFloat(v: number): string {
  if (!Number.isFinite(v)) throw new Error(`cannot serialize non-finite number ${v}`);
  if (Number.isInteger(v) && Math.abs(v) < 1e16) {
    return v.toFixed(1);
  }
  const abs = Math.abs(v);
  if (abs !== 0 && (abs < 1e-4 || abs >= 1e16)) {
    // python switches to exponent form here and pads the exponent to two digits
    return v.toExponential().replace(/e([+-])(\d)$/, "e$10$2");
  }
  return String(v);
}
