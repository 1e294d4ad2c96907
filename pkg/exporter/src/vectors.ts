import { readFileSync, writeFileSync } from "node:fs";

import { contentWords } from "./tokenize.js";

export type VectorTable = Map<string, Float64Array>;

export const DEGENERATE_NORM = 1e-9;

function l2norm(v: Float64Array): number {
  let total = 0;
  for (const x of v) total += x * x;
  return Math.sqrt(total);
}

/**
 * Mean of L2-normalized vectors of the definition's known content words,
 * mirroring the engine's pooling: sorted distinct content words, missing
 * words skipped. Returns null when no content word has a vector.
 */
export function pooledVector(
  definition: string,
  wordVectors: VectorTable,
  stopwords?: ReadonlySet<string>,
): Float64Array | null {
  const words = [...contentWords(definition, stopwords)].sort();
  const rows: Float64Array[] = [];
  for (const w of words) {
    const vec = wordVectors.get(w);
    if (!vec) continue;
    const norm = l2norm(vec);
    const unit = new Float64Array(vec.length);
    for (let i = 0; i < vec.length; i += 1) unit[i] = vec[i] / norm;
    rows.push(unit);
  }
  if (rows.length === 0) return null;
  const out = new Float64Array(rows[0].length);
  for (const row of rows) {
    for (let i = 0; i < out.length; i += 1) out[i] += row[i];
  }
  for (let i = 0; i < out.length; i += 1) out[i] /= rows.length;
  return out;
}

export function isDegenerate(v: Float64Array): boolean {
  return l2norm(v) < DEGENERATE_NORM;
}

/** Write the engine's vector-file format: `dim <d> count <n>` + tab rows. */
export function writeVectorFile(
  path: string,
  dim: number,
  rows: Iterable<[string, Float64Array]>,
): number {
  const body: string[] = [];
  for (const [id, vec] of rows) {
    if (vec.length !== dim) {
      throw new Error(`row ${id} has ${vec.length} components, want ${dim}`);
    }
    body.push(`${id}\t${Array.from(vec, (x) => String(x)).join(" ")}`);
  }
  const text = `dim ${dim} count ${body.length}\n${body.join("\n")}${body.length ? "\n" : ""}`;
  writeFileSync(path, text, "utf-8");
  return body.length;
}

function parseFloats(parts: string[], where: string): Float64Array {
  const out = new Float64Array(parts.length);
  for (let i = 0; i < parts.length; i += 1) {
    const x = Number(parts[i]);
    if (!Number.isFinite(x)) {
      throw new Error(`${where}: bad float ${parts[i]}`);
    }
    out[i] = x;
  }
  return out;
}

/**
 * Load word vectors from either the engine's format (`dim <d> count <n>`,
 * tab-separated rows) or word2vec text (`<count> <dim>` header,
 * space-separated rows).
 */
export function loadWordVectors(path: string): { dim: number; table: VectorTable } {
  const lines = readFileSync(path, "utf-8").split("\n");
  const table: VectorTable = new Map();
  let dim = -1;
  let sawHeader = false;
  let tabFormat = false;
  for (let i = 0; i < lines.length; i += 1) {
    const line = lines[i].replace(/\r$/, "");
    if (!line || line.startsWith("#")) continue;
    const where = `${path}:${i + 1}`;
    if (!sawHeader) {
      const parts = line.trim().split(/\s+/);
      if (parts.length === 4 && parts[0] === "dim" && parts[2] === "count") {
        dim = Number(parts[1]);
        tabFormat = true;
      } else if (parts.length === 2 && /^\d+$/.test(parts[0]) && /^\d+$/.test(parts[1])) {
        dim = Number(parts[1]);
      } else {
        throw new Error(`${where}: unrecognized vector file header`);
      }
      if (!Number.isInteger(dim) || dim <= 0) {
        throw new Error(`${where}: bad dimension ${dim}`);
      }
      sawHeader = true;
      continue;
    }
    let id: string;
    let values: string[];
    if (tabFormat) {
      const tab = line.indexOf("\t");
      if (tab < 0) throw new Error(`${where}: missing tab separator`);
      id = line.slice(0, tab);
      values = line.slice(tab + 1).trim().split(/\s+/);
    } else {
      const parts = line.trim().split(/\s+/);
      id = parts[0];
      values = parts.slice(1);
    }
    if (values.length !== dim) {
      throw new Error(`${where}: expected ${dim} components, got ${values.length}`);
    }
    if (table.has(id)) {
      throw new Error(`${where}: duplicate id ${id}`);
    }
    table.set(id, parseFloats(values, where));
  }
  if (!sawHeader) {
    throw new Error(`${path}: missing vector file header`);
  }
  return { dim, table };
}
