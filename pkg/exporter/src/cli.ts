#!/usr/bin/env node
import { MissingResource, exportVectors } from "./exportVectors.js";
import { scoreLexicon, writeScoreTable } from "./lmscores.js";
import { readLexicon } from "./records.js";

const USAGE = `usage:
  sense-vector-exporter export-vectors --lexicon FILE --out FILE
      (--source toy [--dim N] [--seed N] | --source static --vectors FILE)
  sense-vector-exporter export-lm-scores --lexicon FILE --out FILE
`;

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new UsageError(`bad argument: ${key}`);
    }
    flags.set(key.slice(2), value);
  }
  return flags;
}

class UsageError extends Error {}

function requireFlag(flags: Map<string, string>, name: string): string {
  const value = flags.get(name);
  if (value === undefined) {
    throw new UsageError(`--${name} is required`);
  }
  return value;
}

function cmdExportVectors(flags: Map<string, string>): number {
  const lexicon = readLexicon(requireFlag(flags, "lexicon"));
  const out = requireFlag(flags, "out");
  const source = flags.get("source") ?? "static";
  if (source !== "toy" && source !== "static") {
    throw new UsageError(`--source must be toy or static, got ${source}`);
  }
  const result = exportVectors(lexicon, {
    source,
    vectorsPath: flags.get("vectors"),
    dim: flags.has("dim") ? Number(flags.get("dim")) : undefined,
    seed: flags.has("seed") ? Number(flags.get("seed")) : undefined,
  }, out);
  for (const warning of result.warnings) {
    console.error(`warning: ${warning}`);
  }
  console.log(
    `export-vectors: ${result.rows.length} rows (dim ${result.dim}) -> ${out}`,
  );
  return 0;
}

function cmdExportLmScores(flags: Map<string, string>): number {
  const lexicon = readLexicon(requireFlag(flags, "lexicon"));
  const out = requireFlag(flags, "out");
  const result = scoreLexicon(lexicon);
  for (const senseId of result.skipped) {
    console.error(`warning: sense ${senseId}: target word not locatable or no context; skipped`);
  }
  writeScoreTable(out, result);
  console.log(
    `export-lm-scores: ${result.entries.length} entries x ` +
    `${lexicon.vocabulary.length} words -> ${out}`,
  );
  return 0;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    const flags = parseFlags(rest);
    switch (command) {
      case "export-vectors":
        return cmdExportVectors(flags);
      case "export-lm-scores":
        return cmdExportLmScores(flags);
      default:
        throw new UsageError(`unknown command: ${command ?? "(none)"}`);
    }
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`error: ${err.message}\n${USAGE}`);
      return 1;
    }
    if (err instanceof MissingResource) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    if (err instanceof Error) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

process.exitCode = main(process.argv.slice(2));
