import { readFileSync } from "node:fs";

export interface SenseRecord {
  id: string;
  word: string;
  definition: string;
  pos: string;
  kind: "slang" | "conventional";
  example?: string;
  decade?: number;
}

export interface Lexicon {
  slang: SenseRecord[];
  conventional: SenseRecord[];
  /** Distinct slang words, sorted: the candidate vocabulary. */
  vocabulary: string[];
}

/** Read a line-delimited lexicon record file produced by the engine. */
export function readLexicon(path: string): Lexicon {
  const slang: SenseRecord[] = [];
  const conventional: SenseRecord[] = [];
  const lines = readFileSync(path, "utf-8").split("\n");
  lines.forEach((line, index) => {
    const trimmed = line.trim();
    if (!trimmed || trimmed.startsWith("#")) return;
    let raw: unknown;
    try {
      raw = JSON.parse(trimmed);
    } catch {
      throw new Error(`${path}:${index + 1}: not valid JSON`);
    }
    const rec = raw as Record<string, unknown>;
    for (const key of ["id", "word", "definition", "pos", "kind"]) {
      if (typeof rec[key] !== "string" || (rec[key] as string).length === 0) {
        throw new Error(`${path}:${index + 1}: missing field ${key}`);
      }
    }
    const sense: SenseRecord = {
      id: rec.id as string,
      word: rec.word as string,
      definition: rec.definition as string,
      pos: rec.pos as string,
      kind: rec.kind as SenseRecord["kind"],
      example: typeof rec.example === "string" ? rec.example : undefined,
      decade: typeof rec.decade === "number" ? rec.decade : undefined,
    };
    if (sense.kind === "slang") slang.push(sense);
    else if (sense.kind === "conventional") conventional.push(sense);
    else throw new Error(`${path}:${index + 1}: bad kind ${String(rec.kind)}`);
  });
  if (slang.length === 0) {
    throw new Error(`${path}: no slang records`);
  }
  const vocabulary = [...new Set(slang.map((s) => s.word))].sort();
  return { slang, conventional, vocabulary };
}
