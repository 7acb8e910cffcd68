/** The three-problem self-test fixture.
 *
 * Each problem is hand-annotated (quantities, equation, answer, relation
 * label); tokens come from the tokenizer over the text so the export path is
 * exactly the production path, and POS tags come from the rule tagger.
 * Encoded sequences carry [CLS]/[SEP], tagged X, with quantity indices
 * shifted accordingly.
 */

import { MwpRecord } from "./dataset";
import { tagTokens } from "./postag";
import { CLS, SEP, Vocab, encode, tokenize } from "./tokenizer";

interface FixtureSpec {
  id: string;
  text: string;
  quantitySurfaces: string[];
  quantityValues: number[];
  equation: string[];
  answer: number;
  relation: 0 | 1;
}

export const FIXTURE_SPECS: FixtureSpec[] = [
  {
    id: "fx-001",
    text: "Tom has 2 red apples and 3 green pears . How many fruits does he have ?",
    quantitySurfaces: ["2", "3"],
    quantityValues: [2, 3],
    equation: ["+", "N0", "N1"],
    answer: 5,
    relation: 0,
  },
  {
    id: "fx-002",
    text: "A box holds 4 bags of 2.5 kg rice . How much rice is in the box ?",
    quantitySurfaces: ["4", "2.5"],
    quantityValues: [4, 2.5],
    equation: ["*", "N0", "N1"],
    answer: 10,
    relation: 0,
  },
  {
    id: "fx-003",
    text: "Lily read half of the 8 chapters today . How many chapters did she read ?",
    quantitySurfaces: ["half", "8"],
    quantityValues: [0.5, 8],
    equation: ["*", "N0", "N1"],
    answer: 4,
    relation: 1,
  },
];

export interface FixtureProblem {
  record: MwpRecord;
  ids: number[];
}

export function buildFixture(vocab: Vocab, maxLen: number): FixtureProblem[] {
  return FIXTURE_SPECS.map((spec) => {
    const bare = tokenize(spec.text);
    const { tokens, ids } = encode(bare, vocab, maxLen);
    const qIdx = spec.quantitySurfaces.map((s) => {
      const at = tokens.indexOf(s);
      if (at < 0) throw new Error(`fixture ${spec.id}: surface ${s} not in tokens`);
      return at;
    });
    const { tags } = tagTokens(tokens);
    tokens.forEach((t, i) => {
      if (t === CLS || t === SEP) tags[i] = "X";
    });
    const record: MwpRecord = {
      id: spec.id,
      text: spec.text,
      tokens,
      token_ids: ids,
      quantity_indices: qIdx,
      quantity_values: spec.quantityValues,
      pos_tags: tags,
      equation_prefix: spec.equation,
      answer: spec.answer,
      relation_label: spec.relation,
    };
    return { record, ids };
  });
}

export function fixtureVocab(): Vocab {
  return Vocab.build(FIXTURE_SPECS.map((s) => s.text));
}
