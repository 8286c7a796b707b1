/** End-to-end adapter run: documents in, interchange artifacts out. */
import { mkdirSync } from "node:fs";
import { join } from "node:path";

import { cloneLabels, computeHighImpact } from "./cloneLabels.js";
import { type AdapterConfig, parseConfig } from "./config.js";
import { embedTokens, fineTuneEncoder } from "./encoder.js";
import {
  type Document,
  groupByResearcher,
  readDocuments,
  writeCloneLabels,
  writeDocTopics,
  writeEmbeddings,
  writeEncoder,
  writeManifest,
  writeRejects,
  writeTopicWords,
} from "./interchange.js";
import { tokenize } from "./text.js";
import { extractTopics, type TokenDoc } from "./topics.js";

export interface RunResult {
  outDir: string;
  config: AdapterConfig;
  topicCount: number;
  documentCount: number;
  highImpact: string[];
  rejects: number;
  warnings: string[];
  artifacts: string[];
  manifestPath: string;
}

export function tokenizeDocuments(documents: Document[], config: AdapterConfig): TokenDoc[] {
  return documents.map((doc) => ({
    pubId: doc.pubId,
    tokens: tokenize(`${doc.title} ${doc.abstract}`, config.preprocess),
  }));
}

export function runAdapter(
  documentsPath: string,
  outDir: string,
  overrides: Record<string, unknown> = {},
): RunResult {
  const config = parseConfig(overrides);
  const documents = readDocuments(documentsPath);
  const tokenDocs = tokenizeDocuments(documents, config);

  const encoder = fineTuneEncoder(tokenDocs.map((d) => d.tokens), config);
  const model = extractTopics(tokenDocs, encoder, config);

  const pubCounts: Record<string, number> = {};
  for (const doc of documents) {
    for (const rid of doc.authorIds) {
      pubCounts[rid] = (pubCounts[rid] ?? 0) + 1;
    }
  }
  const highImpact = computeHighImpact(pubCounts, config.highImpactFactor);
  const grouped = groupByResearcher(tokenDocs, documents);
  const labelResult = cloneLabels(grouped, encoder, highImpact, config);

  const vectors = new Map<string, number[]>();
  for (const doc of tokenDocs) {
    const vec = embedTokens(doc.tokens, encoder);
    if (vec) vectors.set(doc.pubId, vec);
  }

  mkdirSync(outDir, { recursive: true });
  const artifacts = [
    "doc_topics.jsonl",
    "topic_words.json",
    "clone_labels.json",
    "embeddings.jsonl",
    "rejects.jsonl",
    "encoder.json",
  ];
  writeDocTopics(join(outDir, "doc_topics.jsonl"), model);
  writeTopicWords(join(outDir, "topic_words.json"), model);
  writeCloneLabels(join(outDir, "clone_labels.json"), labelResult.labels);
  writeEmbeddings(join(outDir, "embeddings.jsonl"), vectors);
  writeRejects(join(outDir, "rejects.jsonl"), model.rejects);
  writeEncoder(join(outDir, "encoder.json"), encoder);
  const manifestPath = writeManifest(outDir, config, artifacts);

  return {
    outDir,
    config,
    topicCount: model.topicCount,
    documentCount: documents.length,
    highImpact,
    rejects: model.rejects.length,
    warnings: labelResult.warnings,
    artifacts,
    manifestPath,
  };
}
