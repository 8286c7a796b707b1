/** Planted two-theme corpus used across the test suite.
 *
 * Two disjoint 30-word theme vocabularies plus a 30-word shared pool of
 * generic academic words mixed in at 40 percent per word position. Twenty
 * single-theme researchers (8 or 9 documents each, alternating, 170 total)
 * and one dual-theme researcher with 15 documents per theme. 200 documents.
 */
import { seededRandom } from "../src/rng.js";

export const VOCAB_A = [
  "galaxy", "quasar", "telescope", "orbit", "stellar", "cosmic", "nebula",
  "photon", "redshift", "supernova", "plasma", "gravity", "spectra",
  "lensing", "pulsar", "accretion", "magnetar", "parallax", "interstellar",
  "luminosity", "cosmology", "exoplanet", "asteroid", "heliosphere",
  "ionosphere", "blackhole", "darkmatter", "cepheid", "bolometric",
  "ecliptic",
];

export const VOCAB_B = [
  "genome", "protein", "enzyme", "cell", "mutation", "sequence", "receptor",
  "antibody", "neuron", "synapse", "chromosome", "ribosome", "membrane",
  "kinase", "peptide", "transcription", "metabolism", "microbiome",
  "phenotype", "ligand", "cytokine", "plasmid", "organelle", "epigenetics",
  "proteomics", "mitosis", "apoptosis", "histone", "glycolysis", "operon",
];

export const VOCAB_SHARED = [
  "method", "analysis", "results", "data", "study", "model", "approach",
  "experiment", "measurement", "evaluation", "framework", "baseline",
  "benchmark", "dataset", "estimate", "hypothesis", "observation",
  "parameter", "procedure", "sample", "significance", "simulation",
  "survey", "technique", "validation", "variance", "correlation",
  "distribution", "inference", "prediction",
];

export interface ToyDoc {
  pub_id: string;
  title: string;
  abstract: string;
  year: number;
  author_ids: string[];
}

export const DUAL_RESEARCHER = "R_DUAL";

function makeText(rng: () => number, vocab: string[], len: number, sharedFrac = 0.4): string {
  const words: string[] = [];
  for (let i = 0; i < len; i++) {
    const pool = rng() < sharedFrac ? VOCAB_SHARED : vocab;
    words.push(pool[Math.floor(rng() * pool.length)]);
  }
  return words.join(" ");
}

export function makeToyCorpus(seed: number): {
  docs: ToyDoc[];
  researchers: string[];
  dual: string;
  themeOf: Map<string, "A" | "B">;
} {
  const rng = seededRandom(`toy-${seed}`);
  const docs: ToyDoc[] = [];
  const researchers: string[] = [];
  const themeOf = new Map<string, "A" | "B">();
  let pub = 0;

  const themes: ["A" | "B", string[]][] = [
    ["A", VOCAB_A],
    ["B", VOCAB_B],
  ];
  for (let r = 0; r < 10; r++) {
    for (let t = 0; t < themes.length; t++) {
      const [theme, vocab] = themes[t];
      const rid = `R_${theme}${String(r).padStart(2, "0")}`;
      researchers.push(rid);
      // alternate 8/9 so the corpus lands on exactly 200 documents
      const nDocs = 8 + ((r + t) % 2);
      for (let d = 0; d < nDocs; d++) {
        const pubId = `P${String(pub++).padStart(5, "0")}`;
        docs.push({
          pub_id: pubId,
          title: makeText(rng, vocab, 6),
          abstract: makeText(rng, vocab, 30),
          year: 2018 + Math.floor(rng() * 5),
          author_ids: [rid],
        });
        themeOf.set(pubId, theme);
      }
    }
  }

  researchers.push(DUAL_RESEARCHER);
  for (let d = 0; d < 30; d++) {
    const theme: "A" | "B" = d < 15 ? "A" : "B";
    const vocab = theme === "A" ? VOCAB_A : VOCAB_B;
    const pubId = `P${String(pub++).padStart(5, "0")}`;
    docs.push({
      pub_id: pubId,
      title: makeText(rng, vocab, 6),
      abstract: makeText(rng, vocab, 30),
      year: 2018 + Math.floor(rng() * 5),
      author_ids: [DUAL_RESEARCHER],
    });
    themeOf.set(pubId, theme);
  }

  return { docs, researchers, dual: DUAL_RESEARCHER, themeOf };
}

export function corpusJsonl(docs: ToyDoc[]): string {
  return docs.map((d) => JSON.stringify(d)).join("\n") + "\n";
}
