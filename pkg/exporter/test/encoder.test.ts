import assert from "node:assert/strict";
import { test } from "node:test";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { forward, loadCheckpoint, randomCheckpoint, saveCheckpoint } from "../src/bert";
import { Vocab, encode, tokenize } from "../src/tokenizer";

const VOCAB = new Vocab(["[PAD]", "[UNK]", "[CLS]", "[SEP]",
                         "a", "b", "c", "2", "2.5", "1/2", "."]);

const CFG = { vocabSize: VOCAB.size, hiddenSize: 24, numLayers: 2,
              numHeads: 4, intermediateSize: 32, maxLen: 16 };

test("tokenizer keeps number forms and splits punctuation", () => {
  assert.deepEqual(tokenize("a 2.5 kg of 1/2 rice."),
                   ["a", "2.5", "kg", "of", "1/2", "rice", "."]);
  assert.deepEqual(tokenize("How many, now?"),
                   ["How", "many", ",", "now", "?"]);
});

test("encode wraps with specials and maps unknowns", () => {
  const { tokens, ids } = encode(["a", "zzz"], VOCAB, 8);
  assert.deepEqual(tokens, ["[CLS]", "a", "zzz", "[SEP]"]);
  assert.equal(ids[0], 2);
  assert.equal(ids[2], 1); // [UNK]
});

test("forward is deterministic and correctly shaped", () => {
  const ckpt = randomCheckpoint(CFG, VOCAB.words, 7);
  const ids = [2, 4, 5, 7, 3];
  const a = forward(ckpt, ids);
  const b = forward(ckpt, ids);
  assert.equal(a.rows, 5);
  assert.equal(a.cols, 24);
  assert.deepEqual([...a.data], [...b.data]);
});

test("same token at different positions gets different vectors", () => {
  const ckpt = randomCheckpoint(CFG, VOCAB.words, 7);
  const h = forward(ckpt, [2, 4, 4, 3]);
  const row1 = [...h.data.slice(1 * 24, 2 * 24)];
  const row2 = [...h.data.slice(2 * 24, 3 * 24)];
  assert.notDeepEqual(row1, row2);
});

test("checkpoint save/load preserves the forward pass", () => {
  const ckpt = randomCheckpoint(CFG, VOCAB.words, 11);
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "ckpt-"));
  saveCheckpoint(ckpt, dir);
  const back = loadCheckpoint(dir);
  const ids = [2, 6, 8, 3];
  const a = forward(ckpt, ids);
  const b = forward(back, ids);
  for (let i = 0; i < a.data.length; i++) {
    assert.ok(Math.abs(a.data[i] - b.data[i]) < 1e-5); // f32 storage
  }
});

test("out-of-range ids and lengths are rejected", () => {
  const ckpt = randomCheckpoint(CFG, VOCAB.words, 1);
  assert.throws(() => forward(ckpt, [999]));
  assert.throws(() => forward(ckpt, []));
  assert.throws(() => forward(ckpt, new Array(17).fill(2)));
});
