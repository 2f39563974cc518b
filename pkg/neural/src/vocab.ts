/** Whitespace tokenizer and integer vocabulary.
 *
 * Tokens are whitespace-delimited and lowercased, nothing more: the enr
 * suffix packs each feature into a single "name=value" token (for example
 * "sentiment=-0.9000"), and splitting on punctuation would shred the value
 * and its sign. Index 0 is padding, index 1 is the out-of-vocabulary bucket.
 */

export const PAD_ID = 0;
export const OOV_ID = 1;

export function tokenize(text: string): string[] {
  return text.toLowerCase().split(/\s+/).filter(Boolean);
}

export interface Vocab {
  index: Map<string, number>;
  size: number;
}

/** Build a vocabulary from training texts only (most frequent first,
 * ties broken alphabetically so the mapping is deterministic). */
export function buildVocab(texts: string[], maxSize = 8192): Vocab {
  const counts = new Map<string, number>();
  for (const text of texts) {
    for (const token of tokenize(text)) {
      counts.set(token, (counts.get(token) ?? 0) + 1);
    }
  }
  const ranked = [...counts.entries()].sort(
    (a, b) => b[1] - a[1] || (a[0] < b[0] ? -1 : a[0] > b[0] ? 1 : 0),
  );
  const index = new Map<string, number>();
  for (const [token] of ranked.slice(0, Math.max(0, maxSize - 2))) {
    index.set(token, index.size + 2);
  }
  return { index, size: index.size + 2 };
}

/** Token ids truncated/padded to maxLen (padding on the right). */
export function encode(vocab: Vocab, text: string, maxLen: number): Int32Array {
  const ids = new Int32Array(maxLen).fill(PAD_ID);
  const tokens = tokenize(text);
  for (let i = 0; i < Math.min(tokens.length, maxLen); i++) {
    ids[i] = vocab.index.get(tokens[i]) ?? OOV_ID;
  }
  return ids;
}

/** Count-normalized token bag over the first maxLen tokens.
 *
 * Each slot holds count/seen for one vocabulary id, so multiplying the bag
 * by an embedding matrix gives exactly the average of the tokens' embedding
 * rows. Empty text is the zero vector.
 */
export function bagEncode(vocab: Vocab, text: string, maxLen: number): Float32Array {
  const bag = new Float32Array(vocab.size);
  const tokens = tokenize(text).slice(0, maxLen);
  if (tokens.length === 0) {
    return bag;
  }
  for (const token of tokens) {
    bag[vocab.index.get(token) ?? OOV_ID] += 1;
  }
  for (let i = 0; i < bag.length; i++) {
    bag[i] /= tokens.length;
  }
  return bag;
}
