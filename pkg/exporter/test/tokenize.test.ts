import { describe, expect, it } from "vitest";

import { STOPWORDS } from "../src/stopwords.js";
import { contentWords, tokens } from "../src/tokenize.js";

describe("tokens", () => {
  it("lowercases and drops punctuation", () => {
    expect(tokens("To kill, to murder!")).toEqual(["to", "kill", "to", "murder"]);
  });

  it("empty input", () => {
    expect(tokens("")).toEqual([]);
  });
});

describe("contentWords", () => {
  it("removes stopwords", () => {
    expect(contentWords("to kill, to murder", new Set(["to"]))).toEqual(
      new Set(["kill", "murder"]),
    );
  });

  it("keeps everything without stopwords", () => {
    expect(contentWords("Frozen water", new Set())).toEqual(
      new Set(["frozen", "water"]),
    );
  });

  it("default list covers common function words", () => {
    expect(STOPWORDS.has("the")).toBe(true);
    expect(STOPWORDS.has("to")).toBe(true);
    expect(contentWords("the ice is frozen")).toEqual(new Set(["ice", "frozen"]));
  });
});
