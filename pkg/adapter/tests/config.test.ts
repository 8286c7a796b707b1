import { expect, test } from "vitest";

import { DEFAULT_CONFIG, encoderDim, parseConfig } from "../src/config.js";
import { AdapterError } from "../src/errors.js";

test("defaults", () => {
  const config = parseConfig();
  expect(config).toEqual(DEFAULT_CONFIG);
  expect(config.maskFraction).toBe(0.15);
  expect(config.epochs).toBe(40);
  expect(config.umap).toEqual({ nNeighbors: 15, nComponents: 5, minDist: 0.0 });
  expect(config.globalCluster).toEqual({ minClusterSize: 8, minSamples: 4 });
  expect(config.researcherCluster).toEqual({ minClusterSize: 10, minSamples: 5 });
  expect(config.window).toEqual({ size: 8, stride: 4 });
  expect(config.preprocess).toEqual({ stopwords: true, stripDigitsPunct: true, lemmatize: false });
  expect(config.seed).toBe(0);
});

test("parseConfig never mutates the defaults", () => {
  const before = structuredClone(DEFAULT_CONFIG);
  const config = parseConfig({ seed: 9, umap: { nNeighbors: 4 } });
  expect(config.seed).toBe(9);
  expect(DEFAULT_CONFIG).toEqual(before);
});

test("nested overrides merge field by field", () => {
  const config = parseConfig({ umap: { nNeighbors: 5 }, window: { stride: 2 } });
  expect(config.umap).toEqual({ nNeighbors: 5, nComponents: 5, minDist: 0.0 });
  expect(config.window).toEqual({ size: 8, stride: 2 });
});

test.each([0, 1, 1.2, -0.1])("mask fraction %s is rejected", (bad) => {
  expect(() => parseConfig({ maskFraction: bad })).toThrow(AdapterError);
  expect(() => parseConfig({ maskFraction: bad })).toThrow(/invalid config: maskFraction/);
});

test("cluster sizes below 2 are rejected", () => {
  expect(() => parseConfig({ globalCluster: { minClusterSize: 1 } })).toThrow(
    /invalid config: globalCluster.minClusterSize/,
  );
  expect(() => parseConfig({ researcherCluster: { minClusterSize: 1 } })).toThrow(AdapterError);
});

test("unknown keys are rejected", () => {
  expect(() => parseConfig({ learningRte: 0.1 })).toThrow(/invalid config/);
  expect(() => parseConfig({ umap: { neighbours: 3 } })).toThrow(/invalid config/);
});

test("non-object overrides are rejected", () => {
  expect(() => parseConfig(42 as unknown as Record<string, unknown>)).toThrow(
    /config overrides must be an object/,
  );
  expect(() => parseConfig({ umap: 7 })).toThrow(/must be an object/);
});

test("epochs must be a non-negative integer", () => {
  expect(parseConfig({ epochs: 0 }).epochs).toBe(0);
  expect(() => parseConfig({ epochs: -1 })).toThrow(/invalid config: epochs/);
  expect(() => parseConfig({ epochs: 2.5 })).toThrow(/invalid config: epochs/);
});

test("window size and stride must be at least 1", () => {
  expect(() => parseConfig({ window: { size: 0 } })).toThrow(/invalid config: window.size/);
  expect(() => parseConfig({ window: { stride: 0 } })).toThrow(/invalid config: window.stride/);
});

test("merge threshold must lie in [0, 1]", () => {
  expect(parseConfig({ topicMergeThreshold: 0 }).topicMergeThreshold).toBe(0);
  expect(parseConfig({ topicMergeThreshold: 1 }).topicMergeThreshold).toBe(1);
  expect(() => parseConfig({ topicMergeThreshold: 1.5 })).toThrow(/topicMergeThreshold/);
});

test("encoder id parses to a dimension", () => {
  expect(encoderDim("hashed-64")).toBe(64);
  expect(encoderDim("hashed-8")).toBe(8);
  expect(encoderDim("hashed-4096")).toBe(4096);
});

test("malformed or out-of-range encoder ids are rejected", () => {
  expect(() => encoderDim("glove-300")).toThrow(/unknown base encoder/);
  expect(() => encoderDim("hashed-4")).toThrow(/out of range/);
  expect(() => encoderDim("hashed-5000")).toThrow(/out of range/);
  expect(() => parseConfig({ baseEncoder: "glove-300" })).toThrow(/invalid config: baseEncoder/);
});
