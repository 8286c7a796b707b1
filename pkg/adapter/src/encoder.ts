/** Word-vector encoder with masked-token fine-tuning.
 *
 * The base encoder assigns every vocabulary word a deterministic unit
 * vector hashed from the word itself. Fine-tuning then runs a masked
 * prediction objective over the corpus: a masked position must be
 * recovered from the mean of its document's remaining tokens, scored
 * against sampled negatives. Words that share documents end up aligned,
 * which is what the downstream clustering feeds on.
 */
import { encoderDim, type AdapterConfig } from "./config.js";
import { AdapterError } from "./errors.js";
import { seededRandom } from "./rng.js";

export interface LossEntry {
  epoch: number;
  trainLoss: number;
  /** Mean cross-entropy on a fixed set of never-trained masked positions. */
  heldoutLoss: number;
}

export interface Encoder {
  id: string;
  dim: number;
  seed: number;
  vocab: string[];
  vectors: number[][];
  lossLog: LossEntry[];
}

// vocab x dim floats; above this the dense trainer would thrash
const MEMORY_BUDGET = 50_000_000;

const indexCache = new WeakMap<Encoder, Map<string, number>>();

function vocabIndex(enc: Encoder): Map<string, number> {
  let idx = indexCache.get(enc);
  if (!idx) {
    idx = new Map(enc.vocab.map((w, i) => [w, i]));
    indexCache.set(enc, idx);
  }
  return idx;
}

/** Deterministic unit vector for one word (Box-Muller over a word-keyed
 *  stream, then L2 normalization). */
export function baseVector(word: string, dim: number, encoderId: string): Float64Array {
  const rng = seededRandom(`${encoderId}:${word}`);
  const v = new Float64Array(dim);
  for (let i = 0; i < dim; i += 2) {
    const u1 = Math.max(rng(), 1e-12);
    const u2 = rng();
    const r = Math.sqrt(-2 * Math.log(u1));
    v[i] = r * Math.cos(2 * Math.PI * u2);
    if (i + 1 < dim) v[i + 1] = r * Math.sin(2 * Math.PI * u2);
  }
  normalize(v);
  return v;
}

function normalize(v: Float64Array): void {
  let sq = 0;
  for (let i = 0; i < v.length; i++) sq += v[i] * v[i];
  const norm = Math.sqrt(sq);
  if (norm > 0) for (let i = 0; i < v.length; i++) v[i] /= norm;
}

function dot(a: Float64Array | number[], b: Float64Array | number[]): number {
  let s = 0;
  for (let i = 0; i < a.length; i++) s += a[i] * b[i];
  return s;
}

interface HeldoutMask {
  doc: number;
  pos: number;
  negatives: number[];
}

/**
 * Train word vectors on the tokenized corpus.
 *
 * epochs = 0 returns the base encoder unchanged with an empty loss log.
 * The held-out masks are fixed before training, never selected as training
 * targets, and always scored against the same negatives, so their loss is
 * comparable across epochs.
 */
export function fineTuneEncoder(tokenDocs: string[][], config: AdapterConfig): Encoder {
  const dim = encoderDim(config.baseEncoder);
  const vocab = [...new Set(tokenDocs.flat())].sort();
  if (vocab.length === 0) {
    throw new AdapterError("corpus has no usable tokens after preprocessing");
  }
  if (vocab.length * dim > MEMORY_BUDGET) {
    throw new AdapterError(
      `vocabulary ${vocab.length} x dimension ${dim} exceeds the in-memory budget; ` +
        "reduce the encoder dimension or prune the vocabulary",
    );
  }
  const widx = new Map(vocab.map((w, i) => [w, i]));
  const E = vocab.map((w) => baseVector(w, dim, config.baseEncoder));
  const docs = tokenDocs.map((toks) => toks.map((t) => widx.get(t)!));

  const freq = new Float64Array(vocab.length);
  for (const doc of docs) for (const t of doc) freq[t]++;

  const lossLog: LossEntry[] = [];
  if (config.epochs > 0) {
    trainInPlace(E, docs, vocab.length, freq, dim, config, lossLog);
  }
  return {
    id: config.baseEncoder,
    dim,
    seed: config.seed,
    vocab,
    vectors: E.map((v) => Array.from(v)),
    lossLog,
  };
}

function trainInPlace(
  E: Float64Array[],
  docs: number[][],
  vocabSize: number,
  freq: Float64Array,
  dim: number,
  config: AdapterConfig,
  lossLog: LossEntry[],
): void {
  const { negatives, learningRate: lr, maskFraction } = config;
  const rng = seededRandom(`mlm-${config.seed}`);

  const sampleNegative = (draw: () => number, exclude: number): number => {
    for (;;) {
      const t = Math.floor(draw() * vocabSize);
      if (t !== exclude && freq[t] > 0) return t;
    }
  };

  // fixed evaluation masks with fixed negatives
  const heldout: HeldoutMask[] = [];
  const heldoutKeys = new Set<number>();
  const negRng = seededRandom(`mlm-heldout-${config.seed}`);
  for (let di = 0; di < docs.length; di++) {
    if (docs[di].length < 4) continue;
    if (rng() < 0.3) {
      const pos = Math.floor(rng() * docs[di].length);
      const target = docs[di][pos];
      const negs: number[] = [];
      for (let k = 0; k < negatives; k++) negs.push(sampleNegative(negRng, target));
      heldout.push({ doc: di, pos, negatives: negs });
      heldoutKeys.add(di * 0x100000 + pos);
    }
  }

  const contextMean = (doc: number[], pos: number): [Float64Array, number] => {
    const h = new Float64Array(dim);
    let count = 0;
    for (let j = 0; j < doc.length; j++) {
      if (j === pos) continue;
      const v = E[doc[j]];
      for (let k = 0; k < dim; k++) h[k] += v[k];
      count++;
    }
    if (count > 0) for (let k = 0; k < dim; k++) h[k] /= count;
    return [h, count];
  };

  const heldoutLoss = (): number => {
    let total = 0;
    for (const mask of heldout) {
      const doc = docs[mask.doc];
      const [h] = contextMean(doc, mask.pos);
      const cands = [doc[mask.pos], ...mask.negatives];
      const logits = cands.map((c) => dot(h, E[c]));
      const mx = Math.max(...logits);
      const z = logits.reduce((s, l) => s + Math.exp(l - mx), 0);
      total += -(logits[0] - mx - Math.log(z));
    }
    return total / Math.max(heldout.length, 1);
  };

  for (let epoch = 1; epoch <= config.epochs; epoch++) {
    let trainLoss = 0;
    let steps = 0;
    for (let di = 0; di < docs.length; di++) {
      const doc = docs[di];
      if (doc.length < 2) continue;
      const nMask = Math.max(1, Math.ceil(maskFraction * doc.length));
      for (let m = 0; m < nMask; m++) {
        const pos = Math.floor(rng() * doc.length);
        if (heldoutKeys.has(di * 0x100000 + pos)) continue;
        const target = doc[pos];
        const [h, contextSize] = contextMean(doc, pos);
        if (contextSize === 0) continue;

        const cands = [target];
        for (let k = 0; k < negatives; k++) cands.push(sampleNegative(rng, target));
        const logits = cands.map((c) => dot(h, E[c]));
        const mx = Math.max(...logits);
        const exps = logits.map((l) => Math.exp(l - mx));
        const z = exps.reduce((s, e) => s + e, 0);
        const probs = exps.map((e) => e / z);
        trainLoss += -Math.log(probs[0]);
        steps++;

        // softmax cross-entropy gradient: candidates move by (p - y) * h,
        // the h-gradient is spread evenly over the context words
        const gh = new Float64Array(dim);
        for (let ci = 0; ci < cands.length; ci++) {
          const coef = probs[ci] - (ci === 0 ? 1 : 0);
          const Ec = E[cands[ci]];
          for (let k = 0; k < dim; k++) {
            gh[k] += coef * Ec[k];
            Ec[k] -= lr * coef * h[k];
          }
        }
        const scale = lr / contextSize;
        for (let j = 0; j < doc.length; j++) {
          if (j === pos) continue;
          const Ej = E[doc[j]];
          for (let k = 0; k < dim; k++) Ej[k] -= scale * gh[k];
        }
      }
    }
    // cosine geometry downstream assumes unit vectors
    for (const v of E) normalize(v);
    lossLog.push({
      epoch,
      trainLoss: trainLoss / Math.max(steps, 1),
      heldoutLoss: heldoutLoss(),
    });
  }
}

/** L2-normalized mean vector of the known tokens; null when none are known. */
export function embedTokens(tokens: string[], enc: Encoder): number[] | null {
  const idx = vocabIndex(enc);
  const v = new Float64Array(enc.dim);
  let known = 0;
  for (const t of tokens) {
    const i = idx.get(t);
    if (i === undefined) continue;
    const row = enc.vectors[i];
    for (let k = 0; k < enc.dim; k++) v[k] += row[k];
    known++;
  }
  if (known === 0) return null;
  let sq = 0;
  for (let k = 0; k < enc.dim; k++) sq += v[k] * v[k];
  const norm = Math.sqrt(sq);
  if (norm === 0) return null;
  return Array.from(v, (x) => x / norm);
}
