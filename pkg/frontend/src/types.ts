/** Export schema produced by the Python CLI and consumed by this viewer. */

export const SUPPORTED_VERSION = 1;

export interface GhostEntry {
  id: number;
  positions: Array<[number, number]>;
  initial_offsets: number[];
}

export interface GhostExport {
  version: number;
  n_points: number;
  n_ghosts: number;
  radius: number;
  default_d: number;
  hyperparameters: Record<string, unknown>;
  /** Original projections, normalized to the unit square. */
  positions: Array<[number, number]>;
  /** Final d_i per point (frozen at drop time for dropped points). */
  distances: number[];
  /** Per-point flag, true when the point's ghosts were dropped. */
  dropped: boolean[];
  /** Ghost clouds for points that kept their ghosts. */
  ghosts: GhostEntry[];
  neighbor_ids?: number[][];
  labels?: number[];
  label_names?: string[];
}

export class ExportError extends Error {}

function fail(msg: string): never {
  throw new ExportError(msg);
}

function isPair(v: unknown): v is [number, number] {
  return Array.isArray(v) && v.length === 2
    && typeof v[0] === "number" && typeof v[1] === "number";
}

function checkPositions(v: unknown, n: number, what: string): void {
  if (!Array.isArray(v) || v.length !== n || !v.every(isPair)) {
    fail(`${what} must be ${n} [x, y] pairs`);
  }
}

function checkNumbers(v: unknown, n: number, what: string): void {
  if (!Array.isArray(v) || v.length !== n
      || !v.every((x) => typeof x === "number")) {
    fail(`${what} must be ${n} numbers`);
  }
}

/**
 * Parse and validate a .ghost.json document.
 *
 * Mirrors the structural checks the CLI applies on load, so a file this
 * function accepts is one the CLI would accept too.
 */
export function parseExport(text: string): GhostExport {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    fail(`not valid JSON: ${(err as Error).message}`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    fail("export must be a JSON object");
  }
  const obj = doc as Record<string, unknown>;

  if (obj.version !== SUPPORTED_VERSION) {
    fail(`unsupported export version ${JSON.stringify(obj.version)}, `
      + `expected ${SUPPORTED_VERSION}`);
  }
  for (const field of ["n_points", "n_ghosts", "radius", "default_d"]) {
    if (typeof obj[field] !== "number") {
      fail(`missing or non-numeric field: ${field}`);
    }
  }
  const n = obj.n_points as number;
  const m = obj.n_ghosts as number;
  if (typeof obj.hyperparameters !== "object" || obj.hyperparameters === null) {
    fail("missing field: hyperparameters");
  }
  checkPositions(obj.positions, n, "positions");
  checkNumbers(obj.distances, n, "distances");

  if (!Array.isArray(obj.dropped) || obj.dropped.length !== n
      || !obj.dropped.every((flag) => typeof flag === "boolean")) {
    fail(`dropped must be ${n} booleans`);
  }

  if (!Array.isArray(obj.ghosts)) {
    fail("ghosts must be a list");
  }
  for (const entry of obj.ghosts) {
    const g = entry as Record<string, unknown>;
    if (!Number.isInteger(g.id) || (g.id as number) < 0
        || (g.id as number) >= n) {
      fail(`ghost id out of range: ${g.id}`);
    }
    checkPositions(g.positions, m, `ghosts[${g.id}].positions`);
    checkNumbers(g.initial_offsets, m, `ghosts[${g.id}].initial_offsets`);
  }

  if (obj.labels !== undefined) {
    checkNumbers(obj.labels, n, "labels");
  }
  if (obj.neighbor_ids !== undefined) {
    if (!Array.isArray(obj.neighbor_ids) || obj.neighbor_ids.length !== n) {
      fail(`neighbor_ids must have ${n} rows`);
    }
  }
  return obj as unknown as GhostExport;
}
