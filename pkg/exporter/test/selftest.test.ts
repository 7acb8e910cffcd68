import assert from "node:assert/strict";
import { test } from "node:test";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { main } from "../src/cli";
import { readEmbeddings } from "../src/emb1";
import { buildFixture, fixtureVocab } from "../src/fixture";
import { validateRecord } from "../src/dataset";

test("fixture records validate and align", () => {
  const vocab = fixtureVocab();
  const fixture = buildFixture(vocab, 64);
  assert.equal(fixture.length, 3);
  for (const f of fixture) {
    validateRecord(f.record);
    assert.equal(f.record.tokens[0], "[CLS]");
    assert.equal(f.record.tokens[f.record.tokens.length - 1], "[SEP]");
    assert.equal(f.record.pos_tags[0], "X");
  }
  const labels = fixture.map((f) => f.record.relation_label);
  assert.deepEqual([...new Set(labels)].sort(), [0, 1]);
});

test("self-test writes a readable fixture with hidden size 768", () => {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "selftest-"));
  const code = main(["self-test", "--out", dir, "--seed", "42"]);
  assert.equal(code, 0);

  const es = readEmbeddings(path.join(dir, "fixture.emb"));
  assert.equal(es.dim, 768);
  assert.equal(es.problems.length, 3);
  for (const p of es.problems) {
    assert.equal(p.seqLen, p.tokens.length);
    assert.equal(p.tokenIds.length, p.tokens.length);
    for (const v of p.matrix) assert.ok(Number.isFinite(v));
  }

  const summary = JSON.parse(
    fs.readFileSync(path.join(dir, "summary.json"), "utf-8"));
  assert.equal(summary.hidden_size, 768);
  assert.deepEqual(summary.token_counts, es.problems.map((p) => p.seqLen));

  const lines = fs.readFileSync(path.join(dir, "fixture.jsonl"), "utf-8")
    .trim().split("\n");
  assert.equal(lines.length, 3);
  lines.forEach((line, i) => {
    const rec = JSON.parse(line);
    assert.equal(rec.id, es.problems[i].id);
    assert.deepEqual(rec.tokens, es.problems[i].tokens);
    assert.equal(typeof rec.answer, "string");
  });
});

test("self-test is deterministic for a fixed seed", () => {
  const a = fs.mkdtempSync(path.join(os.tmpdir(), "st-a-"));
  const b = fs.mkdtempSync(path.join(os.tmpdir(), "st-b-"));
  assert.equal(main(["self-test", "--out", a, "--seed", "7"]), 0);
  assert.equal(main(["self-test", "--out", b, "--seed", "7"]), 0);
  const fa = fs.readFileSync(path.join(a, "fixture.emb"));
  const fb = fs.readFileSync(path.join(b, "fixture.emb"));
  assert.ok(fa.equals(fb));
});

test("unknown command exits 1", () => {
  assert.equal(main(["frobnicate"]), 1);
});
