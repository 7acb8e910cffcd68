import assert from "node:assert/strict";
import { test } from "node:test";

import { POS_TAGS, tagTokens } from "../src/postag";
import { evalPrefix } from "../src/dataset";

test("unambiguous tokens tag cleanly", () => {
  const { tags } = tagTokens(["3", "apples", "."]);
  assert.deepEqual(tags, ["NUM", "NOUN", "PUNCT"]);
});

test("tags stay inside the 12-tag inventory", () => {
  const { tags } = tagTokens(["The", "quick", "brown", "fox", "jumps",
                              "over", "2", "lazy", "dogs", ",", "now", "!"]);
  const inventory = new Set(POS_TAGS);
  for (const t of tags) assert.ok(inventory.has(t as any), t);
});

test("exotic symbols fall back to X and are counted", () => {
  const { tags, unmapped } = tagTokens(["apples", "#", "3"]);
  assert.deepEqual(tags, ["NOUN", "X", "NUM"]);
  assert.equal(unmapped, 0); // mapped through SYM -> X, nothing unmapped
});

test("number forms map to NUM", () => {
  const { tags } = tagTokens(["2", "2.5", "1/2"]);
  assert.deepEqual(tags, ["NUM", "NUM", "NUM"]);
});

test("prefix evaluator for fixture self-checks", () => {
  assert.equal(evalPrefix(["+", "N0", "N1"], [3, 5]), 8);
  assert.equal(evalPrefix(["-", "*", "N0", "N1", "C:1"], [2, 3]), 5);
  assert.throws(() => evalPrefix(["/", "N0", "N1"], [1, 0]));
  assert.throws(() => evalPrefix(["+", "N0"], [1]));
});
