/** Tokenization and the preprocessing switches. */

export interface PreprocessOptions {
  stopwords: boolean; // drop common English function words
  stripDigitsPunct: boolean; // remove digits and punctuation before splitting
  lemmatize: boolean; // conservative suffix stripping (-s, -ed, -ing)
}

export const STOPWORDS = new Set([
  "the", "a", "an", "of", "and", "or", "in", "on", "to", "for", "with",
  "by", "at", "from", "is", "are", "was", "were", "be", "been", "being",
  "as", "that", "this", "these", "those", "we", "our", "it", "its", "their",
  "which", "can", "will", "has", "have", "had", "not", "no", "but", "if",
  "into", "than", "then", "also", "such", "both", "between", "during",
  "each", "more", "most", "other", "some", "any", "all", "may", "using",
  "used", "use", "based", "paper", "propose", "proposed", "show", "shown",
]);

function lemma(word: string): string {
  if (word.length > 5 && word.endsWith("ing")) return word.slice(0, -3);
  if (word.length > 4 && word.endsWith("ies")) return word.slice(0, -3) + "y";
  if (word.length > 4 && word.endsWith("ed")) return word.slice(0, -2);
  if (word.length > 3 && word.endsWith("s") && !word.endsWith("ss")) {
    return word.slice(0, -1);
  }
  return word;
}

/**
 * Lowercase and split a text into word tokens.
 *
 * With stripDigitsPunct everything outside [a-z] becomes a separator;
 * otherwise only whitespace splits and tokens keep their punctuation.
 * Single-character tokens are always dropped.
 */
export function tokenize(text: string, opts: PreprocessOptions): string[] {
  let lowered = text.toLowerCase();
  if (opts.stripDigitsPunct) {
    lowered = lowered.replace(/[^a-z]+/g, " ");
  }
  let tokens = lowered.split(/\s+/).filter((w) => w.length > 1);
  if (opts.stopwords) {
    tokens = tokens.filter((w) => !STOPWORDS.has(w));
  }
  if (opts.lemmatize) {
    tokens = tokens.map(lemma).filter((w) => w.length > 1);
  }
  return tokens;
}
