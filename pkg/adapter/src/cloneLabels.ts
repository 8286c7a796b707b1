/** Per-researcher document cluster labels for the consumer's cloning stage. */
import { HDBSCAN } from "hdbscan-ts";

import type { AdapterConfig } from "./config.js";
import { embedTokens, type Encoder } from "./encoder.js";
import { AdapterError } from "./errors.js";
import { reduceDimensions, type TokenDoc } from "./topics.js";

export interface CloneLabelResult {
  /** researcher id -> pub id -> integer cluster label (-1 = noise). */
  labels: Record<string, Record<string, number>>;
  warnings: string[];
}

/** Median of a numeric list (mean of the middle two for even lengths). */
export function median(values: number[]): number {
  if (values.length === 0) {
    throw new AdapterError("median of an empty list");
  }
  const sorted = [...values].sort((a, b) => a - b);
  const mid = sorted.length >> 1;
  return sorted.length % 2 === 1 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
}

/** Researchers whose publication count strictly exceeds factor x median. */
export function computeHighImpact(
  pubCounts: Record<string, number>,
  factor: number,
): string[] {
  const counts = Object.values(pubCounts);
  if (counts.length === 0) return [];
  const threshold = factor * median(counts);
  return Object.keys(pubCounts)
    .filter((rid) => pubCounts[rid] > threshold)
    .sort();
}

/**
 * Cluster each high-impact researcher's documents.
 *
 * Researchers with fewer documents than the per-researcher minimum cluster
 * size get a single label 0 with a warning, as does a researcher whose
 * documents show no density structure at all: an unsplittable researcher
 * stays unsplit. Documents that cannot be embedded are labeled -1.
 */
export function cloneLabels(
  byResearcher: Map<string, TokenDoc[]>,
  encoder: Encoder,
  highImpactIds: string[],
  config: AdapterConfig,
): CloneLabelResult {
  const unknown = highImpactIds.filter((rid) => !byResearcher.has(rid));
  if (unknown.length > 0) {
    throw new AdapterError(
      `high-impact ids not present in the corpus: ${unknown.slice(0, 5).join(", ")}`,
    );
  }
  const { minClusterSize, minSamples } = config.researcherCluster;
  const labels: Record<string, Record<string, number>> = {};
  const warnings: string[] = [];

  for (const rid of [...highImpactIds].sort()) {
    const docs = byResearcher.get(rid)!;
    const out: Record<string, number> = {};

    if (docs.length < minClusterSize) {
      warnings.push(
        `${rid}: ${docs.length} documents is below the minimum cluster size ` +
          `${minClusterSize}; emitting a single label`,
      );
      for (const doc of docs) out[doc.pubId] = 0;
      labels[rid] = out;
      continue;
    }

    const embeddable: TokenDoc[] = [];
    const vectors: number[][] = [];
    for (const doc of docs) {
      const emb = embedTokens(doc.tokens, encoder);
      if (emb === null) {
        out[doc.pubId] = -1;
        warnings.push(`${rid}/${doc.pubId}: no embeddable tokens, labeled as noise`);
      } else {
        embeddable.push(doc);
        vectors.push(emb);
      }
    }

    if (embeddable.length < minClusterSize) {
      warnings.push(
        `${rid}: only ${embeddable.length} embeddable documents; emitting a single label`,
      );
      for (const doc of embeddable) out[doc.pubId] = 0;
      labels[rid] = out;
      continue;
    }

    const reduced = reduceDimensions(vectors, config, `umap-clone-${rid}-${config.seed}`);
    const found = new HDBSCAN({ minClusterSize, minSamples }).fit(reduced);
    if (!found.some((l) => l >= 0)) {
      warnings.push(`${rid}: no density structure in the documents; emitting a single label`);
      for (const doc of embeddable) out[doc.pubId] = 0;
    } else {
      embeddable.forEach((doc, i) => {
        out[doc.pubId] = found[i];
      });
    }
    labels[rid] = out;
  }

  return { labels, warnings };
}
