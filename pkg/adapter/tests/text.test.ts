import { expect, test } from "vitest";

import { STOPWORDS, tokenize } from "../src/text.js";

const ALL_ON = { stopwords: true, stripDigitsPunct: true, lemmatize: true };
const ALL_OFF = { stopwords: false, stripDigitsPunct: false, lemmatize: false };

test("lowercases and splits on non-letters when stripping", () => {
  expect(tokenize("Gene-editing, 2024 CRISPR!", { ...ALL_OFF, stripDigitsPunct: true })).toEqual([
    "gene",
    "editing",
    "crispr",
  ]);
});

test("without stripping only whitespace separates and punctuation stays", () => {
  expect(tokenize("Gene-editing, 2024", ALL_OFF)).toEqual(["gene-editing,", "2024"]);
});

test("single-character tokens are always dropped", () => {
  expect(tokenize("a b xy", ALL_OFF)).toEqual(["xy"]);
});

test("stopwords are removed when enabled", () => {
  const opts = { ...ALL_OFF, stopwords: true };
  expect(tokenize("the galaxy of the cell", opts)).toEqual(["galaxy", "cell"]);
  expect(STOPWORDS.has("the")).toBe(true);
  expect(STOPWORDS.has("galaxy")).toBe(false);
});

test("lemmatization strips common suffixes conservatively", () => {
  const opts = { ...ALL_OFF, lemmatize: true };
  expect(tokenize("lensing galaxies mutated receptors", opts)).toEqual([
    "lens",
    "galaxy",
    "mutat",
    "receptor",
  ]);
  // short words and -ss endings are left alone; "ties" is too short for the
  // -ies rule but still loses its plural -s
  expect(tokenize("sing ties bed class", opts)).toEqual(["sing", "tie", "bed", "class"]);
});

test("all switches combine", () => {
  expect(tokenize("The 3 spinning proteins!", ALL_ON)).toEqual(["spinn", "protein"]);
});

test("empty and all-filtered inputs give empty token lists", () => {
  expect(tokenize("", ALL_ON)).toEqual([]);
  expect(tokenize("1 2 34 !!", ALL_ON)).toEqual([]);
  expect(tokenize("the of and", ALL_ON)).toEqual([]);
});
