/** Corpus-wide topic extraction.
 *
 * Documents are embedded with the encoder, reduced with UMAP, and
 * density-clustered. Because a reduction tuned for local structure tends
 * to shatter one broad theme into several tight fragments, clusters whose
 * embedding-space centroids are nearly parallel are merged back together
 * before anything is reported. Each document then receives a topic
 * distribution from a sliding window over its tokens, scored against the
 * topic centroids, so outliers the clusterer refused to place still get a
 * usable row.
 */
import { HDBSCAN } from "hdbscan-ts";
import { UMAP } from "umap-js";

import type { AdapterConfig } from "./config.js";
import { embedTokens, type Encoder } from "./encoder.js";
import { AdapterError } from "./errors.js";
import { seededRandom } from "./rng.js";

export interface TokenDoc {
  pubId: string;
  tokens: string[];
}

export interface Reject {
  pubId: string;
  reason: string;
}

export interface TopicModel {
  topicCount: number;
  /** pubId -> merged cluster label, -1 for outliers. Rejects are absent. */
  labels: Map<string, number>;
  /** Per topic, [word, score] ranked descending by c-TF-IDF score. */
  topicWords: [string, number][][];
  /** pubId -> probability row over the topics. Rejects are absent. */
  docTopics: Map<string, number[]>;
  rejects: Reject[];
}

/** UMAP keeps a spectral initialization happy only when the neighborhood
 *  size and target dimension stay below the point count. */
export function reduceDimensions(
  vectors: number[][],
  config: AdapterConfig,
  streamLabel: string,
): number[][] {
  const n = vectors.length;
  const umap = new UMAP({
    nComponents: Math.min(config.umap.nComponents, Math.max(1, n - 2)),
    nNeighbors: Math.min(config.umap.nNeighbors, Math.max(2, n - 1)),
    minDist: config.umap.minDist,
    random: seededRandom(streamLabel),
  });
  return umap.fit(vectors);
}

function centroidOf(members: number[], embeddings: number[][], dim: number): Float64Array {
  const v = new Float64Array(dim);
  for (const i of members) {
    const e = embeddings[i];
    for (let k = 0; k < dim; k++) v[k] += e[k];
  }
  let sq = 0;
  for (let k = 0; k < dim; k++) sq += v[k] * v[k];
  const norm = Math.sqrt(sq);
  if (norm > 0) for (let k = 0; k < dim; k++) v[k] /= norm;
  return v;
}

/**
 * Agglomerative merge of cluster labels: while any two clusters have
 * centroid cosine above the threshold, join the closest pair. Labels are
 * reassigned by descending member count; -1 passes through.
 */
export function mergeClusterLabels(
  labels: number[],
  embeddings: number[][],
  dim: number,
  threshold: number,
): number[] {
  const k = Math.max(...labels, -1) + 1;
  if (k < 2) {
    return labels.slice();
  }
  const groups: number[][] = Array.from({ length: k }, () => []);
  labels.forEach((l, i) => {
    if (l >= 0) groups[l].push(i);
  });
  for (;;) {
    const centroids = groups.map((g) => centroidOf(g, embeddings, dim));
    let best = threshold;
    let bi = -1;
    let bj = -1;
    for (let a = 0; a < groups.length; a++) {
      for (let b = a + 1; b < groups.length; b++) {
        let cos = 0;
        for (let x = 0; x < dim; x++) cos += centroids[a][x] * centroids[b][x];
        if (cos > best) {
          best = cos;
          bi = a;
          bj = b;
        }
      }
    }
    if (bi < 0) break;
    groups[bi] = groups[bi].concat(groups[bj]);
    groups.splice(bj, 1);
  }
  groups.sort((a, b) => b.length - a.length || a[0] - b[0]);
  const out = labels.map(() => -1);
  groups.forEach((members, label) => {
    for (const i of members) out[i] = label;
  });
  return out;
}

/** Class-based TF-IDF: per-topic term frequency scaled against how widely
 *  the term spreads over the whole corpus. */
export function topicWordTable(
  docs: TokenDoc[],
  labels: number[],
  topicCount: number,
  topWords: number,
): [string, number][][] {
  const df = new Map<string, number>();
  for (const doc of docs) {
    for (const w of new Set(doc.tokens)) df.set(w, (df.get(w) ?? 0) + 1);
  }
  const classTf: Map<string, number>[] = Array.from({ length: topicCount }, () => new Map());
  const classTokens = new Array<number>(topicCount).fill(0);
  docs.forEach((doc, i) => {
    const label = labels[i];
    if (label < 0) return;
    const tf = classTf[label];
    for (const w of doc.tokens) {
      tf.set(w, (tf.get(w) ?? 0) + 1);
      classTokens[label]++;
    }
  });
  const totalTokens = classTokens.reduce((a, b) => a + b, 0);
  const avgTokens = totalTokens / Math.max(topicCount, 1);
  return classTf.map((tf, c) => {
    const scored: [string, number][] = [...tf].map(([w, count]) => [
      w,
      (count / Math.max(classTokens[c], 1)) * Math.log(1 + avgTokens / df.get(w)!),
    ]);
    scored.sort((a, b) => b[1] - a[1] || (a[0] < b[0] ? -1 : 1));
    return scored.slice(0, topWords);
  });
}

/**
 * Run the full topic stack over the tokenized corpus.
 *
 * Documents with no embeddable token are reported in rejects and excluded
 * from clustering and the distribution table. Raises when the clusterer
 * cannot find a single topic.
 */
export function extractTopics(
  docs: TokenDoc[],
  encoder: Encoder,
  config: AdapterConfig,
): TopicModel {
  const rejects: Reject[] = [];
  const kept: TokenDoc[] = [];
  const embeddings: number[][] = [];
  for (const doc of docs) {
    const emb = embedTokens(doc.tokens, encoder);
    if (emb === null) {
      rejects.push({ pubId: doc.pubId, reason: "no embeddable tokens" });
    } else {
      kept.push(doc);
      embeddings.push(emb);
    }
  }
  if (kept.length < config.globalCluster.minClusterSize) {
    throw new AdapterError(
      `only ${kept.length} embeddable documents; need at least ` +
        `${config.globalCluster.minClusterSize} to form a topic`,
    );
  }

  const reduced = reduceDimensions(embeddings, config, `umap-global-${config.seed}`);
  const raw = new HDBSCAN({
    minClusterSize: config.globalCluster.minClusterSize,
    minSamples: config.globalCluster.minSamples,
  }).fit(reduced);
  if (!raw.some((l) => l >= 0)) {
    throw new AdapterError(
      "clustering found no topics; lower globalCluster.minClusterSize or add documents",
    );
  }

  const merged = mergeClusterLabels(raw, embeddings, encoder.dim, config.topicMergeThreshold);
  const topicCount = Math.max(...merged) + 1;

  const centroids: Float64Array[] = [];
  for (let c = 0; c < topicCount; c++) {
    const members: number[] = [];
    merged.forEach((l, i) => {
      if (l === c) members.push(i);
    });
    centroids.push(centroidOf(members, embeddings, encoder.dim));
  }

  const labels = new Map<string, number>();
  const docTopics = new Map<string, number[]>();
  kept.forEach((doc, i) => {
    labels.set(doc.pubId, merged[i]);
    docTopics.set(doc.pubId, windowDistribution(doc.tokens, encoder, centroids, config));
  });

  return {
    topicCount,
    labels,
    topicWords: topicWordTable(kept, merged, topicCount, config.topWords),
    docTopics,
    rejects,
  };
}

/** Slide a token window over the document, accumulate squared positive
 *  cosine against each topic centroid, and normalize to a probability row.
 *  A document no window can place falls back to the uniform row. */
export function windowDistribution(
  tokens: string[],
  encoder: Encoder,
  centroids: Float64Array[],
  config: AdapterConfig,
): number[] {
  const k = centroids.length;
  const weights = new Float64Array(k);
  const { size, stride } = config.window;
  const last = Math.max(1, tokens.length - size + stride);
  for (let start = 0; start < last; start += stride) {
    const windowTokens = tokens.slice(start, start + size);
    if (windowTokens.length === 0) break;
    const emb = embedTokens(windowTokens, encoder);
    if (emb === null) continue;
    for (let c = 0; c < k; c++) {
      let cos = 0;
      for (let x = 0; x < encoder.dim; x++) cos += emb[x] * centroids[c][x];
      if (cos > 0) weights[c] += cos * cos;
    }
  }
  let total = 0;
  for (let c = 0; c < k; c++) total += weights[c];
  if (total === 0) {
    return new Array<number>(k).fill(1 / k);
  }
  return Array.from(weights, (w) => w / total);
}
