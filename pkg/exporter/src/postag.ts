/** Rule-based POS tagger onto the fixed 12-tag inventory.
 *
 * The tagger's native tags are fine-grained word classes; a fixed mapping
 * table folds them into {NOUN VERB NUM ADJ ADV PRON DET ADP CONJ PART PUNCT
 * X}. Anything unmapped becomes X and is counted in the run summary.
 */

export const POS_TAGS = ["NOUN", "VERB", "NUM", "ADJ", "ADV", "PRON", "DET",
                         "ADP", "CONJ", "PART", "PUNCT", "X"] as const;

const NATIVE_TO_12: Record<string, string> = {
  CD: "NUM", NN: "NOUN", VB: "VERB", JJ: "ADJ", RB: "ADV", PRP: "PRON",
  DT: "DET", IN: "ADP", CC: "CONJ", TO: "PART", PUNCT: "PUNCT", SYM: "X",
  SPECIAL: "X",
};

const DETERMINERS = new Set(["the", "a", "an", "each", "every", "this",
                             "that", "these", "those", "all", "some"]);
const PRONOUNS = new Set(["i", "you", "he", "she", "it", "we", "they", "me",
                          "him", "her", "us", "them", "his", "its", "their",
                          "my", "your", "our"]);
const ADPOSITIONS = new Set(["of", "in", "on", "at", "from", "by", "with",
                             "for", "among", "without", "into", "over",
                             "under", "per"]);
const CONJUNCTIONS = new Set(["and", "or", "but", "nor", "plus", "so",
                              "yet"]);
const PARTICLES = new Set(["to", "not"]);
const ADVERBS = new Set(["now", "then", "today", "soon", "daily", "together",
                         "away", "hard", "fast", "very", "how", "exactly",
                         "later", "here", "there", "again", "too", "also"]);
const VERBS = new Set(["is", "are", "was", "were", "be", "been", "has",
                       "have", "had", "do", "does", "did", "get", "gets",
                       "got", "buy", "bought", "sell", "sells", "sold",
                       "read", "reads", "cut", "cuts", "hold", "holds",
                       "held", "want", "wants", "need", "needs", "save",
                       "saved", "share", "shares", "pack", "packs", "add",
                       "adds", "left", "remain", "remains", "eat", "ate",
                       "give", "gives", "gave", "find", "found", "make",
                       "makes", "made", "carry", "carries", "weigh",
                       "weighs", "know", "knows", "come", "comes", "hope",
                       "hopes", "agree", "start", "starts", "keep", "keeps",
                       "finish", "tries", "try", "compare", "collect",
                       "drains", "rests", "arrive", "sort", "use", "plans"]);
const ADJECTIVES = new Set(["red", "green", "blue", "small", "big", "long",
                            "short", "fresh", "ripe", "sweet", "thick",
                            "thin", "new", "old", "busy", "kind", "sunny",
                            "cold", "hot", "white", "brown", "steel",
                            "signed", "next", "many", "much", "more",
                            "extra", "few", "several", "total"]);

const NUMBER_RE = /^(\d+(\.\d+)?|\d+\/\d+)$/;
const PUNCT_RE = /^[.,;:!?'"()\[\]{}-]+$/;
const SPECIAL_RE = /^\[[A-Z]+\]$/;

/** Native fine-grained tag for one token (context-free rules). */
export function nativeTag(token: string): string {
  const low = token.toLowerCase();
  if (SPECIAL_RE.test(token)) return "SPECIAL";
  if (NUMBER_RE.test(token)) return "CD";
  if (PUNCT_RE.test(token)) return "PUNCT";
  if (!/[A-Za-z]/.test(token)) return "SYM";
  if (DETERMINERS.has(low)) return "DT";
  if (PRONOUNS.has(low)) return "PRP";
  if (PARTICLES.has(low)) return "TO";
  if (ADPOSITIONS.has(low)) return "IN";
  if (CONJUNCTIONS.has(low)) return "CC";
  if (ADVERBS.has(low)) return "RB";
  if (VERBS.has(low)) return "VB";
  if (ADJECTIVES.has(low)) return "JJ";
  if (low.endsWith("ly")) return "RB";
  if (low.endsWith("ing") || low.endsWith("ed")) return "VB";
  return "NN";
}

export interface TagResult {
  tags: string[];
  unmapped: number;
}

export function tagTokens(tokens: string[]): TagResult {
  let unmapped = 0;
  const tags = tokens.map((tok) => {
    const native = nativeTag(tok);
    const mapped = NATIVE_TO_12[native];
    if (mapped === undefined) {
      unmapped += 1;
      return "X";
    }
    return mapped;
  });
  return { tags, unmapped };
}
