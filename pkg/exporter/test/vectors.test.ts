import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { buildVectorExport } from "../src/exportVectors.js";
import type { Lexicon, SenseRecord } from "../src/records.js";
import { toyEmbedder } from "../src/toyvec.js";
import {
  loadWordVectors,
  pooledVector,
  writeVectorFile,
} from "../src/vectors.js";

function sense(
  id: string, word: string, definition: string,
  kind: SenseRecord["kind"], example?: string,
): SenseRecord {
  return { id, word, definition, pos: "noun", kind, example };
}

function tinyLexicon(): Lexicon {
  return {
    slang: [
      sense("ice.s0", "ice", "glitter rock shard", "slang", "he wore ice openly"),
      sense("mud.s0", "mud", "harsh gossip", "slang"),
    ],
    conventional: [
      sense("ice.c0", "ice", "frozen water", "conventional"),
      sense("mud.c0", "mud", "wet earth", "conventional"),
    ],
    vocabulary: ["ice", "mud"],
  };
}

describe("pooledVector", () => {
  it("single word equals the normalized word vector", () => {
    const table = new Map([["kill", Float64Array.from([3, 4])]]);
    const out = pooledVector("to kill", table, new Set(["to"]));
    expect(Array.from(out!)).toEqual([0.6, 0.8]);
  });

  it("skips unknown words", () => {
    const table = new Map([["kill", Float64Array.from([0, 2])]]);
    const out = pooledVector("quietly kill", table, new Set());
    expect(Array.from(out!)).toEqual([0, 1]);
  });

  it("returns null with no usable words", () => {
    expect(pooledVector("unknown words", new Map(), new Set())).toBeNull();
  });
});

describe("vector file i/o", () => {
  it("round-trips exactly", () => {
    const dir = mkdtempSync(join(tmpdir(), "vec-"));
    const path = join(dir, "vectors.txt");
    const rows: Array<[string, Float64Array]> = [
      ["w1", Float64Array.from([1 / 3, -(2 ** -40), 1e17])],
      ["s1", Float64Array.from([0.1, 0.2, 0.3])],
    ];
    writeVectorFile(path, 3, rows);
    const loaded = loadWordVectors(path);
    expect(loaded.dim).toBe(3);
    expect(loaded.table.get("w1")).toEqual(rows[0][1]);
    expect(loaded.table.get("s1")).toEqual(rows[1][1]);
  });

  it("reads word2vec text format", () => {
    const dir = mkdtempSync(join(tmpdir(), "vec-"));
    const path = join(dir, "w2v.vec");
    writeFileSync(path, "2 3\nice 0.5 0.25 -1\nmud 1 2 3\n");
    const loaded = loadWordVectors(path);
    expect(loaded.dim).toBe(3);
    expect(Array.from(loaded.table.get("ice")!)).toEqual([0.5, 0.25, -1]);
  });

  it("rejects a bad header", () => {
    const dir = mkdtempSync(join(tmpdir(), "vec-"));
    const path = join(dir, "bad.txt");
    writeFileSync(path, "dimension three\n");
    expect(() => loadWordVectors(path)).toThrow(/header/);
  });
});

describe("buildVectorExport", () => {
  it("toy export covers vocabulary, tokens, and senses", () => {
    const lexicon = tinyLexicon();
    const result = buildVectorExport(lexicon, { source: "toy", dim: 8, seed: 5 });
    const ids = new Set(result.rows.map(([id]) => id));
    for (const w of lexicon.vocabulary) expect(ids.has(w)).toBe(true);
    for (const tok of ["glitter", "rock", "frozen", "water", "gossip"]) {
      expect(ids.has(tok)).toBe(true);
    }
    for (const s of [...lexicon.slang, ...lexicon.conventional]) {
      expect(ids.has(s.id)).toBe(true);
    }
    expect(result.warnings).toEqual([]);
  });

  it("toy vectors use the shared deterministic embedder", () => {
    const result = buildVectorExport(tinyLexicon(), { source: "toy", dim: 4, seed: 9 });
    const byId = new Map(result.rows);
    expect(byId.get("ice")).toEqual(toyEmbedder("ice", 4, 9));
  });

  it("static export flags missing vocabulary coverage", () => {
    const dir = mkdtempSync(join(tmpdir(), "vec-"));
    const path = join(dir, "partial.txt");
    writeVectorFile(path, 2, [
      ["ice", Float64Array.from([1, 0])],
      ["frozen", Float64Array.from([0, 1])],
      ["water", Float64Array.from([1, 1])],
      ["glitter", Float64Array.from([0.5, 1])],
      ["rock", Float64Array.from([1, 0.5])],
      ["shard", Float64Array.from([0.25, 1])],
    ]);
    const result = buildVectorExport(tinyLexicon(), {
      source: "static", vectorsPath: path,
    });
    expect(result.warnings.some((w) => w.includes("mud"))).toBe(true);
  });

  it("export bytes are deterministic", () => {
    const dir = mkdtempSync(join(tmpdir(), "vec-"));
    const a = join(dir, "a.txt");
    const b = join(dir, "b.txt");
    const lexicon = tinyLexicon();
    const r1 = buildVectorExport(lexicon, { source: "toy", dim: 6, seed: 1 });
    const r2 = buildVectorExport(lexicon, { source: "toy", dim: 6, seed: 1 });
    writeVectorFile(a, r1.dim, r1.rows);
    writeVectorFile(b, r2.dim, r2.rows);
    expect(readFileSync(a, "utf-8")).toEqual(readFileSync(b, "utf-8"));
  });
});
