/** EMB1 writer/reader, byte-compatible with the Python consumer.
 *
 * Layout (little-endian): "EMB1" | version u32=1 | dim u32 | count u32,
 * then per problem seq_len u32 + seq_len*dim float32 row-major. The
 * "<name>.meta.json" sidecar carries vocab_size, source_tag, and per-problem
 * id/tokens/token_ids in file order.
 */

import * as fs from "fs";

export interface EmbProblem {
  id: string;
  tokens: string[];
  tokenIds: number[];
  matrix: Float32Array; // seqLen * dim, row-major
  seqLen: number;
}

export interface EmbeddingSet {
  dim: number;
  vocabSize: number;
  sourceTag: string;
  problems: EmbProblem[];
}

export function sidecarPath(embPath: string): string {
  return embPath + ".meta.json";
}

export function writeEmbeddings(es: EmbeddingSet, embPath: string): void {
  let payload = 16;
  for (const p of es.problems) {
    if (p.matrix.length !== p.seqLen * es.dim) {
      throw new Error(`problem ${p.id}: matrix length ${p.matrix.length} != `
        + `${p.seqLen}x${es.dim}`);
    }
    if (p.tokens.length !== p.seqLen || p.tokenIds.length !== p.seqLen) {
      throw new Error(`problem ${p.id}: token metadata misaligned`);
    }
    payload += 4 + p.matrix.length * 4;
  }
  const buf = Buffer.alloc(payload);
  buf.write("EMB1", 0, "ascii");
  buf.writeUInt32LE(1, 4);
  buf.writeUInt32LE(es.dim, 8);
  buf.writeUInt32LE(es.problems.length, 12);
  let off = 16;
  for (const p of es.problems) {
    buf.writeUInt32LE(p.seqLen, off);
    off += 4;
    for (let i = 0; i < p.matrix.length; i++) {
      buf.writeFloatLE(p.matrix[i], off);
      off += 4;
    }
  }
  fs.writeFileSync(embPath, buf);

  const meta = {
    vocab_size: es.vocabSize,
    source_tag: es.sourceTag,
    problems: es.problems.map((p) => ({
      id: p.id, tokens: p.tokens, token_ids: p.tokenIds,
    })),
  };
  fs.writeFileSync(sidecarPath(embPath), JSON.stringify(meta));
}

export function readEmbeddings(embPath: string): EmbeddingSet {
  const buf = fs.readFileSync(embPath);
  if (buf.length < 16) throw new Error(`truncated header at byte offset ${buf.length}`);
  if (buf.toString("ascii", 0, 4) !== "EMB1") {
    throw new Error("bad magic at byte offset 0");
  }
  const version = buf.readUInt32LE(4);
  if (version !== 1) throw new Error(`unsupported version ${version}`);
  const dim = buf.readUInt32LE(8);
  const count = buf.readUInt32LE(12);
  const meta = JSON.parse(fs.readFileSync(sidecarPath(embPath), "utf-8"));
  if (meta.problems.length !== count) {
    throw new Error(`sidecar lists ${meta.problems.length} problems, header says ${count}`);
  }
  let off = 16;
  const problems: EmbProblem[] = [];
  for (let k = 0; k < count; k++) {
    if (off + 4 > buf.length) throw new Error(`truncated at byte offset ${off}`);
    const seqLen = buf.readUInt32LE(off);
    off += 4;
    const n = seqLen * dim;
    if (off + n * 4 > buf.length) throw new Error(`truncated at byte offset ${off}`);
    const matrix = new Float32Array(n);
    for (let i = 0; i < n; i++) {
      matrix[i] = buf.readFloatLE(off);
      off += 4;
    }
    problems.push({
      id: meta.problems[k].id,
      tokens: meta.problems[k].tokens,
      tokenIds: meta.problems[k].token_ids,
      matrix, seqLen,
    });
  }
  if (off !== buf.length) {
    throw new Error(`${buf.length - off} trailing bytes at byte offset ${off}`);
  }
  return { dim, vocabSize: meta.vocab_size, sourceTag: meta.source_tag,
           problems };
}
