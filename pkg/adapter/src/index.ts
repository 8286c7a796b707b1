export { AdapterError } from "./errors.js";
export { seededRandom, hashLabel, mulberry32 } from "./rng.js";
export { tokenize, STOPWORDS, type PreprocessOptions } from "./text.js";
export {
  DEFAULT_CONFIG,
  parseConfig,
  encoderDim,
  type AdapterConfig,
  type ClusterSettings,
} from "./config.js";
export {
  fineTuneEncoder,
  embedTokens,
  baseVector,
  type Encoder,
  type LossEntry,
} from "./encoder.js";
export {
  extractTopics,
  mergeClusterLabels,
  topicWordTable,
  type TokenDoc,
  type TopicModel,
  type Reject,
} from "./topics.js";
export { cloneLabels, computeHighImpact, median, type CloneLabelResult } from "./cloneLabels.js";
export {
  readDocuments,
  groupByResearcher,
  atomicWrite,
  stableStringify,
  writeDocTopics,
  writeTopicWords,
  writeCloneLabels,
  writeEmbeddings,
  writeRejects,
  writeEncoder,
  readEncoder,
  writeManifest,
  type Document,
} from "./interchange.js";
export { runAdapter, tokenizeDocuments, type RunResult } from "./pipeline.js";
export { main } from "./cli.js";
