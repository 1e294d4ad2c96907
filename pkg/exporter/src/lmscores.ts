import { writeFileSync } from "node:fs";

import type { Lexicon, SenseRecord } from "./records.js";
import { STOPWORDS } from "./stopwords.js";
import { contentWords, tokens } from "./tokenize.js";

export const ALPHA = 0.001;

export interface ScoredEntry {
  senseId: string;
  scores: Map<string, number>; // word -> probability-like score
}

/**
 * Surrogate infilling scorer over a blanked example sentence.
 *
 * Each vocabulary word carries a profile: the content words of its
 * conventional definitions. A candidate scores by how much of the
 * blank's surrounding context its profile covers; scores are damped so
 * an entry's total probability mass over the vocabulary stays below 1
 * (the vocabulary is only a subset of the scorer's support).
 */
export class InfillScorer {
  private profiles: Map<string, Set<string>>;

  constructor(lexicon: Lexicon) {
    this.profiles = new Map();
    for (const w of lexicon.vocabulary) this.profiles.set(w, new Set());
    for (const sense of lexicon.conventional) {
      const profile = this.profiles.get(sense.word);
      if (!profile) continue;
      for (const tok of contentWords(sense.definition)) profile.add(tok);
    }
  }

  /** Context tokens of the example with the target word blanked out. */
  blankedContext(sense: SenseRecord): string[] | null {
    if (!sense.example) return null;
    const target = sense.word.split("_");
    const toks = tokens(sense.example);
    let at = -1;
    for (let i = 0; i + target.length <= toks.length; i += 1) {
      if (target.every((t, j) => toks[i + j] === t)) {
        at = i;
        break;
      }
    }
    if (at < 0) return null;
    const rest = [...toks.slice(0, at), ...toks.slice(at + target.length)];
    return rest.filter((t) => !STOPWORDS.has(t));
  }

  score(sense: SenseRecord, vocabulary: string[]): Map<string, number> | null {
    const context = this.blankedContext(sense);
    if (context === null || context.length === 0) return null;
    const ctx = new Set(context);
    const raw = new Map<string, number>();
    let total = 0;
    for (const w of vocabulary) {
      const profile = this.profiles.get(w) ?? new Set();
      let overlap = 0;
      for (const tok of ctx) {
        if (profile.has(tok)) overlap += 1;
      }
      raw.set(w, overlap);
      total += overlap;
    }
    const denom = total + ctx.size;
    const scores = new Map<string, number>();
    for (const w of vocabulary) {
      scores.set(w, (raw.get(w) as number) / denom);
    }
    return scores;
  }
}

export interface LmExportResult {
  entries: ScoredEntry[];
  skipped: string[]; // sense ids without a usable blanked context
}

export function scoreLexicon(lexicon: Lexicon): LmExportResult {
  const scorer = new InfillScorer(lexicon);
  const entries: ScoredEntry[] = [];
  const skipped: string[] = [];
  for (const sense of lexicon.slang) {
    if (!sense.example) continue; // entries without context are out of scope
    const scores = scorer.score(sense, lexicon.vocabulary);
    if (scores === null) {
      skipped.push(sense.id);
      continue;
    }
    entries.push({ senseId: sense.id, scores });
  }
  return { entries, skipped };
}

/** Write the score-table format: `alpha <value>` header + tab rows. */
export function writeScoreTable(path: string, result: LmExportResult): void {
  const lines = [`alpha ${String(ALPHA)}`];
  for (const entry of result.entries) {
    for (const [word, score] of entry.scores) {
      lines.push(`${entry.senseId}\t${word}\t${String(score)}`);
    }
  }
  writeFileSync(path, lines.join("\n") + "\n", "utf-8");
}
