import { existsSync } from "node:fs";

import type { Lexicon } from "./records.js";
import { contentWords } from "./tokenize.js";
import { toyEmbedder } from "./toyvec.js";
import {
  VectorTable,
  isDegenerate,
  loadWordVectors,
  pooledVector,
  writeVectorFile,
} from "./vectors.js";

export interface VectorJob {
  source: "toy" | "static";
  vectorsPath?: string; // static source
  dim?: number; // toy source
  seed?: number; // toy source
}

export interface VectorExport {
  dim: number;
  rows: Array<[string, Float64Array]>;
  warnings: string[];
}

function definitionTokens(lexicon: Lexicon): string[] {
  const out = new Set<string>();
  for (const sense of [...lexicon.slang, ...lexicon.conventional]) {
    for (const tok of contentWords(sense.definition)) out.add(tok);
  }
  return [...out].sort();
}

/**
 * Assemble the vector rows for a lexicon: every vocabulary word, every
 * definition content token with a known vector, then one pooled vector
 * per sense definition (degenerate or unembeddable senses are skipped
 * and reported).
 */
export function buildVectorExport(lexicon: Lexicon, job: VectorJob): VectorExport {
  const warnings: string[] = [];
  let dim: number;
  const words: VectorTable = new Map();
  const tokensNeeded = definitionTokens(lexicon);
  const wordIds = [...new Set([...lexicon.vocabulary, ...tokensNeeded])].sort();

  if (job.source === "toy") {
    dim = job.dim ?? 16;
    const seed = job.seed ?? 0;
    for (const id of wordIds) {
      words.set(id, toyEmbedder(id, dim, seed));
    }
  } else {
    if (!job.vectorsPath || !existsSync(job.vectorsPath)) {
      throw new MissingResource(job.vectorsPath ?? "(no --vectors given)");
    }
    const loaded = loadWordVectors(job.vectorsPath);
    dim = loaded.dim;
    for (const id of wordIds) {
      const vec = loaded.table.get(id);
      if (vec) words.set(id, vec);
    }
    const missing = lexicon.vocabulary.filter((w) => !words.has(w));
    if (missing.length > 0) {
      warnings.push(
        `${missing.length} vocabulary words missing from ${job.vectorsPath} ` +
        `(first: ${missing[0]})`,
      );
    }
  }

  const rows: Array<[string, Float64Array]> = [];
  for (const id of wordIds) {
    const vec = words.get(id);
    if (vec) rows.push([id, vec]);
  }
  for (const sense of [...lexicon.slang, ...lexicon.conventional]) {
    const pooled = pooledVector(sense.definition, words);
    if (pooled === null) {
      warnings.push(`sense ${sense.id} has no embeddable content words; skipped`);
      continue;
    }
    if (isDegenerate(pooled)) {
      warnings.push(`sense ${sense.id} pooled to a degenerate vector; skipped`);
      continue;
    }
    rows.push([sense.id, pooled]);
  }
  return { dim, rows, warnings };
}

export class MissingResource extends Error {
  constructor(resource: string) {
    super(`missing resource: ${resource}`);
  }
}

export function exportVectors(lexicon: Lexicon, job: VectorJob, outPath: string): VectorExport {
  const result = buildVectorExport(lexicon, job);
  writeVectorFile(outPath, result.dim, result.rows);
  return result;
}
