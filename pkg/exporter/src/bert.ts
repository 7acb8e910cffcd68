/**
 * A compact BERT-style encoder: word + position embeddings with layer norm,
 * then post-norm transformer layers (multi-head self-attention, GELU
 * feed-forward). Inference only, deterministic, float64 inside.
 *
 * Checkpoints live in a directory: checkpoint.json (config + vocab) and
 * weights.bin (float32, little-endian, declaration order).
 */

import * as fs from "fs";
import * as path from "path";

import { Mat, addBiasInPlace, addInPlace, geluInPlace, layerNormInPlace,
         matmul, sliceCols, softmaxRowsInPlace, transpose, zeros } from "./mat";
import { Rng } from "./rng";

export interface BertConfig {
  vocabSize: number;
  hiddenSize: number;
  numLayers: number;
  numHeads: number;
  intermediateSize: number;
  maxLen: number;
}

export interface LayerWeights {
  wq: Mat; bq: Float64Array;
  wk: Mat; bk: Float64Array;
  wv: Mat; bv: Float64Array;
  wo: Mat; bo: Float64Array;
  ln1g: Float64Array; ln1b: Float64Array;
  wi: Mat; bi: Float64Array;
  wd: Mat; bd: Float64Array;
  ln2g: Float64Array; ln2b: Float64Array;
}

export interface Checkpoint {
  config: BertConfig;
  vocab: string[];
  wordEmb: Mat;
  posEmb: Mat;
  embLnG: Float64Array;
  embLnB: Float64Array;
  layers: LayerWeights[];
}

const INIT_STD = 0.02;

function randMat(rng: Rng, rows: number, cols: number): Mat {
  const m = zeros(rows, cols);
  for (let i = 0; i < m.data.length; i++) m.data[i] = rng.gaussian() * INIT_STD;
  return m;
}

function randVec(rng: Rng, n: number): Float64Array {
  const v = new Float64Array(n);
  for (let i = 0; i < n; i++) v[i] = rng.gaussian() * INIT_STD;
  return v;
}

function ones(n: number): Float64Array {
  return new Float64Array(n).fill(1.0);
}

export function randomCheckpoint(config: BertConfig, vocab: string[],
                                 seed: number): Checkpoint {
  if (vocab.length !== config.vocabSize) {
    throw new Error(`vocab length ${vocab.length} != vocabSize ${config.vocabSize}`);
  }
  if (config.hiddenSize % config.numHeads !== 0) {
    throw new Error("hiddenSize not divisible by numHeads");
  }
  const rng = new Rng(seed);
  const h = config.hiddenSize;
  const layers: LayerWeights[] = [];
  const wordEmb = randMat(rng, config.vocabSize, h);
  const posEmb = randMat(rng, config.maxLen, h);
  for (let l = 0; l < config.numLayers; l++) {
    layers.push({
      wq: randMat(rng, h, h), bq: randVec(rng, h),
      wk: randMat(rng, h, h), bk: randVec(rng, h),
      wv: randMat(rng, h, h), bv: randVec(rng, h),
      wo: randMat(rng, h, h), bo: randVec(rng, h),
      ln1g: ones(h), ln1b: new Float64Array(h),
      wi: randMat(rng, h, config.intermediateSize),
      bi: randVec(rng, config.intermediateSize),
      wd: randMat(rng, config.intermediateSize, h),
      bd: randVec(rng, h),
      ln2g: ones(h), ln2b: new Float64Array(h),
    });
  }
  return { config, vocab, wordEmb, posEmb,
           embLnG: ones(h), embLnB: new Float64Array(h), layers };
}

function attention(x: Mat, lw: LayerWeights, numHeads: number): Mat {
  const n = x.rows;
  const h = x.cols;
  const dk = h / numHeads;
  const scale = 1.0 / Math.sqrt(dk);
  const q = addBiasInPlace(matmul(x, lw.wq), lw.bq);
  const k = addBiasInPlace(matmul(x, lw.wk), lw.bk);
  const v = addBiasInPlace(matmul(x, lw.wv), lw.bv);
  const out = zeros(n, h);
  for (let head = 0; head < numHeads; head++) {
    const qh = sliceCols(q, head * dk, dk);
    const kh = sliceCols(k, head * dk, dk);
    const vh = sliceCols(v, head * dk, dk);
    const scores = matmul(qh, transpose(kh));
    for (let i = 0; i < scores.data.length; i++) scores.data[i] *= scale;
    softmaxRowsInPlace(scores);
    const ctx = matmul(scores, vh);
    for (let i = 0; i < n; i++) {
      for (let j = 0; j < dk; j++) {
        out.data[i * h + head * dk + j] = ctx.data[i * dk + j];
      }
    }
  }
  return addBiasInPlace(matmul(out, lw.wo), lw.bo);
}

/** Last-hidden-layer token vectors for one id sequence (n x hidden). */
export function forward(ckpt: Checkpoint, ids: number[],
                        layerSelector?: number): Mat {
  const cfg = ckpt.config;
  if (ids.length === 0 || ids.length > cfg.maxLen) {
    throw new Error(`sequence length ${ids.length} outside [1, ${cfg.maxLen}]`);
  }
  const h = cfg.hiddenSize;
  let x = zeros(ids.length, h);
  for (let i = 0; i < ids.length; i++) {
    const id = ids[i];
    if (id < 0 || id >= cfg.vocabSize) {
      throw new Error(`token id ${id} outside vocab of ${cfg.vocabSize}`);
    }
    for (let j = 0; j < h; j++) {
      x.data[i * h + j] = ckpt.wordEmb.data[id * h + j]
        + ckpt.posEmb.data[i * h + j];
    }
  }
  layerNormInPlace(x, ckpt.embLnG, ckpt.embLnB);

  const upto = layerSelector === undefined ? cfg.numLayers
    : Math.min(layerSelector, cfg.numLayers);
  for (let l = 0; l < upto; l++) {
    const lw = ckpt.layers[l];
    const att = attention(x, lw, cfg.numHeads);
    layerNormInPlace(addInPlace(att, x), lw.ln1g, lw.ln1b);
    const inter = geluInPlace(addBiasInPlace(matmul(att, lw.wi), lw.bi));
    const ff = addBiasInPlace(matmul(inter, lw.wd), lw.bd);
    layerNormInPlace(addInPlace(ff, att), lw.ln2g, lw.ln2b);
    x = ff;
  }
  return x;
}

// -------------------------------------------------------------- persistence

function* weightArrays(ckpt: Checkpoint): Generator<Float64Array> {
  yield ckpt.wordEmb.data;
  yield ckpt.posEmb.data;
  yield ckpt.embLnG;
  yield ckpt.embLnB;
  for (const lw of ckpt.layers) {
    yield lw.wq.data; yield lw.bq;
    yield lw.wk.data; yield lw.bk;
    yield lw.wv.data; yield lw.bv;
    yield lw.wo.data; yield lw.bo;
    yield lw.ln1g; yield lw.ln1b;
    yield lw.wi.data; yield lw.bi;
    yield lw.wd.data; yield lw.bd;
    yield lw.ln2g; yield lw.ln2b;
  }
}

export function saveCheckpoint(ckpt: Checkpoint, dir: string): void {
  fs.mkdirSync(dir, { recursive: true });
  fs.writeFileSync(path.join(dir, "checkpoint.json"),
                   JSON.stringify({ config: ckpt.config, vocab: ckpt.vocab }));
  let total = 0;
  for (const arr of weightArrays(ckpt)) total += arr.length;
  const buf = Buffer.alloc(total * 4);
  let off = 0;
  for (const arr of weightArrays(ckpt)) {
    for (let i = 0; i < arr.length; i++) {
      buf.writeFloatLE(arr[i], off);
      off += 4;
    }
  }
  fs.writeFileSync(path.join(dir, "weights.bin"), buf);
}

export function loadCheckpoint(dir: string): Checkpoint {
  const metaPath = path.join(dir, "checkpoint.json");
  if (!fs.existsSync(metaPath)) {
    throw new Error(`checkpoint not loadable: missing ${metaPath}`);
  }
  const meta = JSON.parse(fs.readFileSync(metaPath, "utf-8"));
  const ckpt = randomCheckpoint(meta.config, meta.vocab, 0);
  const buf = fs.readFileSync(path.join(dir, "weights.bin"));
  let off = 0;
  for (const arr of weightArrays(ckpt)) {
    for (let i = 0; i < arr.length; i++) {
      arr[i] = buf.readFloatLE(off);
      off += 4;
    }
  }
  if (off !== buf.length) {
    throw new Error(`weights.bin has ${buf.length - off} trailing bytes`);
  }
  return ckpt;
}
