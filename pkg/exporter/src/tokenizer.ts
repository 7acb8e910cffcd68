/** Whitespace-and-punctuation tokenizer with a fixed vocabulary.
 *
 * Number forms survive intact ("2.5", "1/2"); punctuation splits into
 * single-character tokens. Unknown words map to [UNK]. [CLS]/[SEP] wrap
 * every encoded sequence and stay visible in the emitted token stream so
 * consumers can mask them.
 */

export const PAD = "[PAD]";
export const UNK = "[UNK]";
export const CLS = "[CLS]";
export const SEP = "[SEP]";
export const SPECIALS = [PAD, UNK, CLS, SEP];

const TOKEN_RE = /\d+\/\d+|\d+\.\d+|\d+|[A-Za-z]+|[^\sA-Za-z0-9]/g;

export function tokenize(text: string): string[] {
  return text.match(TOKEN_RE) ?? [];
}

export class Vocab {
  readonly words: string[];
  private index: Map<string, number>;

  constructor(words: string[]) {
    this.words = words;
    this.index = new Map(words.map((w, i) => [w, i]));
    for (const s of SPECIALS) {
      if (!this.index.has(s)) throw new Error(`vocab missing special ${s}`);
    }
  }

  static build(texts: string[]): Vocab {
    const seen = new Set<string>();
    for (const t of texts) for (const tok of tokenize(t)) seen.add(tok);
    return new Vocab([...SPECIALS, ...[...seen].sort()]);
  }

  id(token: string): number {
    return this.index.get(token) ?? this.index.get(UNK)!;
  }

  get size(): number {
    return this.words.length;
  }
}

/** Wrap tokens with [CLS]/[SEP] and map to ids. */
export function encode(tokens: string[], vocab: Vocab,
                       maxLen: number): { tokens: string[]; ids: number[] } {
  const wrapped = [CLS, ...tokens, SEP];
  if (wrapped.length > maxLen) {
    throw new Error(`sequence of ${wrapped.length} tokens exceeds maxLen ${maxLen}`);
  }
  return { tokens: wrapped, ids: wrapped.map((t) => vocab.id(t)) };
}
