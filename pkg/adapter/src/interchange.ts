/** Interchange file I/O.
 *
 * These formats are shared with the consuming network-analysis package:
 * documents come in as JSON lines, everything the adapter produces goes
 * out as plain JSON / JSON lines. All writes are atomic (temp file in the
 * same directory, then rename) so a crashed run never leaves a torn file.
 */
import { createHash, randomBytes } from "node:crypto";
import { readFileSync, renameSync, statSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";

import { z } from "zod";

import type { AdapterConfig } from "./config.js";
import type { Encoder } from "./encoder.js";
import { AdapterError } from "./errors.js";
import type { Reject, TokenDoc, TopicModel } from "./topics.js";

export interface Document {
  pubId: string;
  title: string;
  abstract: string;
  year: number;
  authorIds: string[];
}

const documentSchema = z.object({
  pub_id: z.string().min(1),
  title: z.string(),
  abstract: z.string(),
  year: z.number().int(),
  author_ids: z.array(z.string().min(1)).min(1),
});

export function atomicWrite(path: string, content: string): void {
  const tmp = join(dirname(path), `.${randomBytes(6).toString("hex")}.tmp`);
  writeFileSync(tmp, content, "utf-8");
  renameSync(tmp, path);
}

/** Parse the documents interchange file (one publication per line). */
export function readDocuments(path: string): Document[] {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new AdapterError(`cannot read documents file ${path}: ${(err as Error).message}`);
  }
  const docs: Document[] = [];
  const seen = new Set<string>();
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let raw: unknown;
    try {
      raw = JSON.parse(line);
    } catch (err) {
      throw new AdapterError(`${path}:${i + 1}: not valid JSON: ${(err as Error).message}`);
    }
    const parsed = documentSchema.safeParse(raw);
    if (!parsed.success) {
      const issue = parsed.error.issues[0];
      throw new AdapterError(
        `${path}:${i + 1}: ${issue.path.join(".") || "record"}: ${issue.message}`,
      );
    }
    if (seen.has(parsed.data.pub_id)) {
      throw new AdapterError(`${path}:${i + 1}: duplicate pub_id ${parsed.data.pub_id}`);
    }
    seen.add(parsed.data.pub_id);
    docs.push({
      pubId: parsed.data.pub_id,
      title: parsed.data.title,
      abstract: parsed.data.abstract,
      year: parsed.data.year,
      authorIds: parsed.data.author_ids,
    });
  }
  if (docs.length === 0) {
    throw new AdapterError(`${path}: no documents`);
  }
  return docs;
}

/** Every listed author owns the publication. */
export function groupByResearcher(docs: TokenDoc[], documents: Document[]): Map<string, TokenDoc[]> {
  const byId = new Map(docs.map((d) => [d.pubId, d]));
  const grouped = new Map<string, TokenDoc[]>();
  for (const doc of documents) {
    const tokenDoc = byId.get(doc.pubId);
    if (!tokenDoc) continue;
    for (const rid of doc.authorIds) {
      let list = grouped.get(rid);
      if (!list) {
        list = [];
        grouped.set(rid, list);
      }
      list.push(tokenDoc);
    }
  }
  return grouped;
}

export function writeDocTopics(path: string, model: TopicModel): void {
  const lines = [JSON.stringify({ topic_count: model.topicCount })];
  for (const pubId of [...model.docTopics.keys()].sort()) {
    lines.push(JSON.stringify({ pub_id: pubId, probs: model.docTopics.get(pubId) }));
  }
  atomicWrite(path, lines.join("\n") + "\n");
}

export function writeTopicWords(path: string, model: TopicModel): void {
  const table: Record<string, [string, number][]> = {};
  model.topicWords.forEach((words, topic) => {
    table[String(topic)] = words;
  });
  atomicWrite(path, stableStringify({ topics: table }) + "\n");
}

export function writeCloneLabels(
  path: string,
  labels: Record<string, Record<string, number>>,
): void {
  atomicWrite(path, stableStringify({ labels }) + "\n");
}

export function writeEmbeddings(path: string, vectors: Map<string, number[]>): void {
  const lines: string[] = [];
  for (const pubId of [...vectors.keys()].sort()) {
    lines.push(JSON.stringify({ pub_id: pubId, vector: vectors.get(pubId) }));
  }
  atomicWrite(path, lines.join("\n") + "\n");
}

export function writeRejects(path: string, rejects: Reject[]): void {
  const lines = rejects.map((r) => JSON.stringify({ pub_id: r.pubId, reason: r.reason }));
  atomicWrite(path, lines.join("\n") + "\n");
}

export function writeEncoder(path: string, encoder: Encoder): void {
  atomicWrite(path, JSON.stringify(encoder) + "\n");
}

export function readEncoder(path: string): Encoder {
  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(path, "utf-8"));
  } catch (err) {
    throw new AdapterError(`cannot read encoder file ${path}: ${(err as Error).message}`);
  }
  const enc = raw as Encoder;
  if (
    typeof enc !== "object" ||
    enc === null ||
    !Array.isArray(enc.vocab) ||
    !Array.isArray(enc.vectors) ||
    typeof enc.dim !== "number" ||
    enc.vocab.length !== enc.vectors.length
  ) {
    throw new AdapterError(`${path}: not an encoder checkpoint`);
  }
  return enc;
}

/** JSON with recursively sorted object keys, so rewrites are byte-stable. */
export function stableStringify(value: unknown): string {
  return JSON.stringify(sortKeys(value), null, 2);
}

function sortKeys(value: unknown): unknown {
  if (Array.isArray(value)) return value.map(sortKeys);
  if (value !== null && typeof value === "object") {
    const out: Record<string, unknown> = {};
    for (const key of Object.keys(value as Record<string, unknown>).sort()) {
      out[key] = sortKeys((value as Record<string, unknown>)[key]);
    }
    return out;
  }
  return value;
}

/** Manifest of the run: resolved config (sliding-window and merge defaults
 *  included) plus a content hash for every artifact written. */
export function writeManifest(
  outDir: string,
  config: AdapterConfig,
  artifactNames: string[],
): string {
  const artifacts: Record<string, { sha256: string; bytes: number }> = {};
  for (const name of [...artifactNames].sort()) {
    const full = join(outDir, name);
    const body = readFileSync(full);
    artifacts[name] = {
      sha256: createHash("sha256").update(body).digest("hex"),
      bytes: statSync(full).size,
    };
  }
  const path = join(outDir, "adapter_manifest.json");
  atomicWrite(path, stableStringify({ config, artifacts }) + "\n");
  return path;
}
