import { z } from "zod";

import { AdapterError } from "./errors.js";
import type { PreprocessOptions } from "./text.js";

/** Full adapter configuration. Every field has a default; callers override
 *  any subset through {@link parseConfig}. */
export interface AdapterConfig {
  /** Starting vectors, "hashed-<dim>": deterministic unit vectors hashed
   *  from each vocabulary word. The dimension is parsed from the id. */
  baseEncoder: string;
  /** Fraction of token positions masked per document per epoch. */
  maskFraction: number;
  /** Fine-tuning epochs; 0 keeps the base encoder untouched. */
  epochs: number;
  learningRate: number;
  /** Negative samples drawn per masked-token prediction. */
  negatives: number;
  umap: {
    nNeighbors: number;
    nComponents: number;
    minDist: number;
  };
  /** Corpus-wide topic clustering. */
  globalCluster: ClusterSettings;
  /** Per-researcher document clustering for clone labels. */
  researcherCluster: ClusterSettings;
  /** Clusters whose centroid cosine exceeds this merge into one topic. */
  topicMergeThreshold: number;
  /** Sliding window over document tokens for the topic-distribution rows. */
  window: { size: number; stride: number };
  /** Ranked words kept per topic in the topic-word table. */
  topWords: number;
  /** A researcher is high-impact when pubs > factor x corpus median. */
  highImpactFactor: number;
  preprocess: PreprocessOptions;
  seed: number;
}

export interface ClusterSettings {
  minClusterSize: number;
  minSamples: number;
}

export const DEFAULT_CONFIG: AdapterConfig = {
  baseEncoder: "hashed-64",
  maskFraction: 0.15,
  epochs: 40,
  learningRate: 0.05,
  negatives: 5,
  umap: { nNeighbors: 15, nComponents: 5, minDist: 0.0 },
  globalCluster: { minClusterSize: 8, minSamples: 4 },
  researcherCluster: { minClusterSize: 10, minSamples: 5 },
  topicMergeThreshold: 0.5,
  window: { size: 8, stride: 4 },
  topWords: 10,
  highImpactFactor: 1.5,
  preprocess: { stopwords: true, stripDigitsPunct: true, lemmatize: false },
  seed: 0,
};

const clusterSchema = z.strictObject({
  minClusterSize: z.number().int().min(2),
  minSamples: z.number().int().min(1),
});

const configSchema = z.strictObject({
  baseEncoder: z.string().regex(/^hashed-\d+$/, "expected 'hashed-<dim>'"),
  maskFraction: z.number().gt(0).lt(1),
  epochs: z.number().int().min(0),
  learningRate: z.number().gt(0),
  negatives: z.number().int().min(1),
  umap: z.strictObject({
    nNeighbors: z.number().int().min(2),
    nComponents: z.number().int().min(1),
    minDist: z.number().min(0),
  }),
  globalCluster: clusterSchema,
  researcherCluster: clusterSchema,
  topicMergeThreshold: z.number().min(0).max(1),
  window: z.strictObject({
    size: z.number().int().min(1),
    stride: z.number().int().min(1),
  }),
  topWords: z.number().int().min(1),
  highImpactFactor: z.number().gt(0),
  preprocess: z.strictObject({
    stopwords: z.boolean(),
    stripDigitsPunct: z.boolean(),
    lemmatize: z.boolean(),
  }),
  seed: z.number().int(),
});

const NESTED = new Set([
  "umap",
  "globalCluster",
  "researcherCluster",
  "window",
  "preprocess",
]);

/** Embedding dimension encoded in a base-encoder id. */
export function encoderDim(baseEncoder: string): number {
  const m = /^hashed-(\d+)$/.exec(baseEncoder);
  if (!m) {
    throw new AdapterError(
      `unknown base encoder ${JSON.stringify(baseEncoder)}; expected 'hashed-<dim>'`,
    );
  }
  const dim = Number(m[1]);
  if (dim < 8 || dim > 4096) {
    throw new AdapterError(`encoder dimension ${dim} out of range [8, 4096]`);
  }
  return dim;
}

/**
 * Merge a partial override object onto the defaults and validate.
 *
 * Unknown keys are rejected rather than ignored so a typo in a config
 * file fails loudly.
 */
export function parseConfig(overrides: unknown = {}): AdapterConfig {
  if (overrides === null || typeof overrides !== "object" || Array.isArray(overrides)) {
    throw new AdapterError("config overrides must be an object");
  }
  const merged: Record<string, unknown> = structuredClone(
    DEFAULT_CONFIG,
  ) as unknown as Record<string, unknown>;
  for (const [key, value] of Object.entries(overrides)) {
    if (value === undefined) continue;
    if (NESTED.has(key)) {
      if (value === null || typeof value !== "object" || Array.isArray(value)) {
        throw new AdapterError(`config key ${JSON.stringify(key)} must be an object`);
      }
      Object.assign(merged[key] as Record<string, unknown>, value);
    } else {
      merged[key] = value;
    }
  }
  const result = configSchema.safeParse(merged);
  if (!result.success) {
    const issue = result.error.issues[0];
    const where = issue.path.length ? issue.path.join(".") : "config";
    throw new AdapterError(`invalid config: ${where}: ${issue.message}`);
  }
  encoderDim(result.data.baseEncoder);
  return result.data;
}
