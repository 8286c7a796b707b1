#!/usr/bin/env node
/** Command line entry points for the topic adapter. */
import { mkdirSync, readFileSync } from "node:fs";
import { join } from "node:path";
import { pathToFileURL } from "node:url";

import yargs from "yargs";

import { cloneLabels, computeHighImpact } from "./cloneLabels.js";
import { parseConfig } from "./config.js";
import { embedTokens, fineTuneEncoder } from "./encoder.js";
import { AdapterError } from "./errors.js";
import {
  groupByResearcher,
  readDocuments,
  readEncoder,
  writeCloneLabels,
  writeDocTopics,
  writeEmbeddings,
  writeEncoder,
  writeRejects,
  writeTopicWords,
} from "./interchange.js";
import { runAdapter } from "./pipeline.js";
import { extractTopics } from "./topics.js";
import { tokenizeDocuments } from "./pipeline.js";

interface CommonArgs {
  documents: string;
  outDir: string;
  config?: string;
  seed?: number;
  epochs?: number;
  maskFraction?: number;
}

function collectOverrides(argv: CommonArgs): Record<string, unknown> {
  let overrides: Record<string, unknown> = {};
  if (argv.config) {
    try {
      overrides = JSON.parse(readFileSync(argv.config, "utf-8"));
    } catch (err) {
      throw new AdapterError(`cannot read config file ${argv.config}: ${(err as Error).message}`);
    }
  }
  if (argv.seed !== undefined) overrides.seed = argv.seed;
  if (argv.epochs !== undefined) overrides.epochs = argv.epochs;
  if (argv.maskFraction !== undefined) overrides.maskFraction = argv.maskFraction;
  return overrides;
}

function commonOptions(y: ReturnType<typeof yargs>) {
  return y
    .option("documents", { type: "string", demandOption: true, describe: "documents.jsonl path" })
    .option("out-dir", { type: "string", demandOption: true, describe: "output directory" })
    .option("config", { type: "string", describe: "JSON file of config overrides" })
    .option("seed", { type: "number", describe: "override config seed" })
    .option("epochs", { type: "number", describe: "override training epochs" })
    .option("mask-fraction", { type: "number", describe: "override mask fraction" });
}

export async function main(argv: string[]): Promise<number> {
  let failed = false;
  const parser = yargs(argv)
    .scriptName("topic-adapter")
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      if (err) throw err;
      process.stderr.write(`error: ${msg}\n`);
      failed = true;
    })
    .command(
      "run",
      "full pass: fine-tune, topics, clone labels, embeddings",
      (y) => commonOptions(y),
      (args) => {
        const result = runAdapter(
          args.documents as string,
          args.outDir as string,
          collectOverrides(args as unknown as CommonArgs),
        );
        for (const warning of result.warnings) {
          process.stderr.write(`warning: ${warning}\n`);
        }
        process.stdout.write(
          `${result.documentCount} documents, ${result.topicCount} topics -> ${result.manifestPath}\n`,
        );
      },
    )
    .command(
      "fine-tune",
      "fit the encoder and write encoder.json",
      (y) => commonOptions(y),
      (args) => {
        const config = parseConfig(collectOverrides(args as unknown as CommonArgs));
        const documents = readDocuments(args.documents as string);
        const tokenDocs = tokenizeDocuments(documents, config);
        const encoder = fineTuneEncoder(tokenDocs.map((d) => d.tokens), config);
        mkdirSync(args.outDir as string, { recursive: true });
        const path = join(args.outDir as string, "encoder.json");
        writeEncoder(path, encoder);
        process.stdout.write(`${encoder.vocab.length} words, dim ${encoder.dim} -> ${path}\n`);
      },
    )
    .command(
      "topics",
      "extract topics with a saved encoder",
      (y) =>
        commonOptions(y).option("encoder", {
          type: "string",
          demandOption: true,
          describe: "encoder.json from fine-tune",
        }),
      (args) => {
        const config = parseConfig(collectOverrides(args as unknown as CommonArgs));
        const documents = readDocuments(args.documents as string);
        const encoder = readEncoder(args.encoder as string);
        const model = extractTopics(tokenizeDocuments(documents, config), encoder, config);
        mkdirSync(args.outDir as string, { recursive: true });
        writeDocTopics(join(args.outDir as string, "doc_topics.jsonl"), model);
        writeTopicWords(join(args.outDir as string, "topic_words.json"), model);
        writeRejects(join(args.outDir as string, "rejects.jsonl"), model.rejects);
        process.stdout.write(`${model.topicCount} topics -> ${args.outDir}\n`);
      },
    )
    .command(
      "clone-labels",
      "label each high-impact researcher's documents",
      (y) =>
        commonOptions(y)
          .option("encoder", {
            type: "string",
            demandOption: true,
            describe: "encoder.json from fine-tune",
          })
          .option("high-impact", {
            type: "string",
            describe: "comma-separated researcher ids (default: computed from counts)",
          }),
      (args) => {
        const config = parseConfig(collectOverrides(args as unknown as CommonArgs));
        const documents = readDocuments(args.documents as string);
        const encoder = readEncoder(args.encoder as string);
        const tokenDocs = tokenizeDocuments(documents, config);
        let highImpact: string[];
        if (args.highImpact) {
          highImpact = (args.highImpact as string).split(",").map((s) => s.trim()).filter(Boolean);
        } else {
          const counts: Record<string, number> = {};
          for (const doc of documents) {
            for (const rid of doc.authorIds) counts[rid] = (counts[rid] ?? 0) + 1;
          }
          highImpact = computeHighImpact(counts, config.highImpactFactor);
        }
        const result = cloneLabels(
          groupByResearcher(tokenDocs, documents),
          encoder,
          highImpact,
          config,
        );
        for (const warning of result.warnings) process.stderr.write(`warning: ${warning}\n`);
        mkdirSync(args.outDir as string, { recursive: true });
        const path = join(args.outDir as string, "clone_labels.json");
        writeCloneLabels(path, result.labels);
        process.stdout.write(`${highImpact.length} researchers -> ${path}\n`);
      },
    )
    .command(
      "embed",
      "write document embeddings with a saved encoder",
      (y) =>
        commonOptions(y).option("encoder", {
          type: "string",
          demandOption: true,
          describe: "encoder.json from fine-tune",
        }),
      (args) => {
        const config = parseConfig(collectOverrides(args as unknown as CommonArgs));
        const documents = readDocuments(args.documents as string);
        const encoder = readEncoder(args.encoder as string);
        const vectors = new Map<string, number[]>();
        for (const doc of tokenizeDocuments(documents, config)) {
          const vec = embedTokens(doc.tokens, encoder);
          if (vec) vectors.set(doc.pubId, vec);
        }
        mkdirSync(args.outDir as string, { recursive: true });
        const path = join(args.outDir as string, "embeddings.jsonl");
        writeEmbeddings(path, vectors);
        process.stdout.write(`${vectors.size} vectors -> ${path}\n`);
      },
    )
    .demandCommand(1, "pick a command: run, fine-tune, topics, clone-labels, embed")
    .help();

  try {
    await parser.parseAsync();
  } catch (err) {
    if (err instanceof AdapterError || (err as NodeJS.ErrnoException)?.code === "ENOENT") {
      process.stderr.write(`error: ${(err as Error).message}\n`);
      return 1;
    }
    throw err;
  }
  return failed ? 1 : 0;
}

const invokedAsScript =
  process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href;

if (invokedAsScript) {
  main(process.argv.slice(2)).then(
    (code) => {
      process.exitCode = code;
    },
    (err) => {
      process.stderr.write(`error: ${(err as Error).message}\n`);
      process.exitCode = 1;
    },
  );
}
