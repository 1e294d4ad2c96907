import { STOPWORDS } from "./stopwords.js";

/** Lowercased alphabetic tokens in order of appearance (with repeats). */
export function tokens(sentence: string): string[] {
  return sentence.toLowerCase().match(/[a-z]+/g) ?? [];
}

/** Distinct content words of a sentence: tokens minus stopwords, as a set. */
export function contentWords(
  sentence: string,
  stopwords: ReadonlySet<string> = STOPWORDS,
): Set<string> {
  const out = new Set<string>();
  for (const tok of tokens(sentence)) {
    if (!stopwords.has(tok)) out.add(tok);
  }
  return out;
}
