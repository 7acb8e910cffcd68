import assert from "node:assert/strict";
import { test } from "node:test";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { EmbeddingSet, readEmbeddings, writeEmbeddings } from "../src/emb1";

function tmpFile(name: string): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "emb1-"));
  return path.join(dir, name);
}

test("dim-2 seq-3 file is exactly 44 bytes", () => {
  const es: EmbeddingSet = {
    dim: 2, vocabSize: 3, sourceTag: "t",
    problems: [{
      id: "only", tokens: ["a", "b", "c"], tokenIds: [0, 1, 2],
      matrix: new Float32Array(6).fill(1), seqLen: 3,
    }],
  };
  const p = tmpFile("tiny.emb");
  writeEmbeddings(es, p);
  assert.equal(fs.statSync(p).size, 16 + 4 + 24);
});

test("write-read round trip is bit exact", () => {
  const matrix = new Float32Array([0.1, -2.5, 3.25, 1e-8, 7, -0.0]);
  const es: EmbeddingSet = {
    dim: 3, vocabSize: 11, sourceTag: "teacher-base",
    problems: [{
      id: "p1", tokens: ["x", "y"], tokenIds: [4, 9], matrix, seqLen: 2,
    }],
  };
  const p = tmpFile("rt.emb");
  writeEmbeddings(es, p);
  const back = readEmbeddings(p);
  assert.equal(back.dim, 3);
  assert.equal(back.vocabSize, 11);
  assert.equal(back.sourceTag, "teacher-base");
  assert.deepEqual(back.problems[0].tokens, ["x", "y"]);
  assert.deepEqual([...back.problems[0].matrix], [...matrix]);
  // second write is byte-identical
  const p2 = tmpFile("rt2.emb");
  writeEmbeddings(back, p2);
  assert.ok(fs.readFileSync(p).equals(fs.readFileSync(p2)));
});

test("truncated file reports an offset", () => {
  const es: EmbeddingSet = {
    dim: 2, vocabSize: 2, sourceTag: "t",
    problems: [{ id: "a", tokens: ["q"], tokenIds: [0],
                 matrix: new Float32Array([1, 2]), seqLen: 1 }],
  };
  const p = tmpFile("trunc.emb");
  writeEmbeddings(es, p);
  const blob = fs.readFileSync(p);
  fs.writeFileSync(p, blob.subarray(0, blob.length - 3));
  assert.throws(() => readEmbeddings(p), /byte offset/);
});
