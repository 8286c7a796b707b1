/** Deterministic random streams.
 *
 * Every random choice in the adapter draws from a stream keyed by a string
 * label, so two runs with the same config produce identical artifacts
 * (within a fixed version of the clustering libraries).
 */

/** 32-bit string hash (xmur3), used to turn labels into integer seeds. */
export function hashLabel(label: string): number {
  let h = 1779033703 ^ label.length;
  for (let i = 0; i < label.length; i++) {
    h = Math.imul(h ^ label.charCodeAt(i), 3432918353);
    h = (h << 13) | (h >>> 19);
  }
  h = Math.imul(h ^ (h >>> 16), 2246822507);
  h = Math.imul(h ^ (h >>> 13), 3266489909);
  return (h ^= h >>> 16) >>> 0;
}

/** mulberry32: small, fast PRNG over a 32-bit state. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** A [0,1) generator keyed by an arbitrary string label. */
export function seededRandom(label: string): () => number {
  return mulberry32(hashLabel(label));
}
