/** Exporter command line.
 *
 *   make-checkpoint --out DIR [--hidden 768] [--layers 2] [--heads 12]
 *                   [--intermediate 1024] [--max-len 64] [--seed 42]
 *                   [--vocab-from data.jsonl]
 *   export          --checkpoint DIR --data in.jsonl --out out.emb
 *                   [--layer N] [--tag SOURCE_TAG]
 *   pos-tag         --in in.jsonl --out out.jsonl
 *   self-test       --out DIR [--seed 42]
 *
 * Exit codes: 0 success, 1 usage error, 2 data error.
 */

import * as fs from "fs";
import * as path from "path";

import { BertConfig, Checkpoint, forward, loadCheckpoint, randomCheckpoint,
         saveCheckpoint } from "./bert";
import { evalPrefix, readLoose, writeRecords } from "./dataset";
import { EmbProblem, EmbeddingSet, readEmbeddings, writeEmbeddings } from "./emb1";
import { buildFixture, fixtureVocab } from "./fixture";
import { tagTokens } from "./postag";
import { CLS, SEP, Vocab, encode, tokenize } from "./tokenizer";

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new UsageError(`expected --flag value pairs, got ${key}`);
    }
    flags.set(key.slice(2), argv[i + 1]);
  }
  return flags;
}

class UsageError extends Error {}

function req(flags: Map<string, string>, name: string): string {
  const v = flags.get(name);
  if (v === undefined) throw new UsageError(`--${name} is required`);
  return v;
}

function intFlag(flags: Map<string, string>, name: string, dflt: number): number {
  const v = flags.get(name);
  return v === undefined ? dflt : Number(v);
}

function toyClassConfig(flags: Map<string, string>, vocabSize: number): BertConfig {
  return {
    vocabSize,
    hiddenSize: intFlag(flags, "hidden", 768),
    numLayers: intFlag(flags, "layers", 2),
    numHeads: intFlag(flags, "heads", 12),
    intermediateSize: intFlag(flags, "intermediate", 1024),
    maxLen: intFlag(flags, "max-len", 64),
  };
}

function cmdMakeCheckpoint(flags: Map<string, string>): number {
  const out = req(flags, "out");
  const vocabFrom = flags.get("vocab-from");
  const vocab = vocabFrom
    ? Vocab.build(readLoose(vocabFrom).map((r) => r.text))
    : fixtureVocab();
  const config = toyClassConfig(flags, vocab.size);
  const ckpt = randomCheckpoint(config, vocab.words, intFlag(flags, "seed", 42));
  saveCheckpoint(ckpt, out);
  process.stderr.write(`checkpoint: hidden ${config.hiddenSize}, `
    + `${config.numLayers} layers, vocab ${vocab.size} -> ${out}\n`);
  return 0;
}

function exportProblems(ckpt: Checkpoint, records: { id: string; text: string }[],
                        layer: number | undefined,
                        sourceTag: string): EmbeddingSet {
  const vocab = new Vocab(ckpt.vocab);
  const problems: EmbProblem[] = [];
  for (const rec of records) {
    const bare = tokenize(rec.text);
    let enc;
    try {
      enc = encode(bare, vocab, ckpt.config.maxLen);
    } catch (err) {
      throw new Error(`problem ${rec.id}: ${(err as Error).message}`);
    }
    const hidden = forward(ckpt, enc.ids, layer);
    const matrix = new Float32Array(hidden.data.length);
    for (let i = 0; i < matrix.length; i++) matrix[i] = hidden.data[i];
    problems.push({ id: rec.id, tokens: enc.tokens, tokenIds: enc.ids,
                    matrix, seqLen: enc.tokens.length });
  }
  return { dim: ckpt.config.hiddenSize, vocabSize: ckpt.config.vocabSize,
           sourceTag, problems };
}

function cmdExport(flags: Map<string, string>): number {
  const ckpt = loadCheckpoint(req(flags, "checkpoint"));
  const records = readLoose(req(flags, "data"));
  const layerFlag = flags.get("layer");
  const es = exportProblems(ckpt, records,
                            layerFlag === undefined ? undefined : Number(layerFlag),
                            flags.get("tag") ?? "teacher-base");
  writeEmbeddings(es, req(flags, "out"));
  process.stderr.write(`exported ${records.length} problems at dim `
    + `${es.dim} -> ${flags.get("out")}\n`);
  return 0;
}

function cmdPosTag(flags: Map<string, string>): number {
  const records = readLoose(req(flags, "in"));
  let unmappedTotal = 0;
  const lines = records.map((rec) => {
    const tokens = (rec.tokens as string[] | undefined) ?? tokenize(rec.text);
    const { tags, unmapped } = tagTokens(tokens);
    unmappedTotal += unmapped;
    return JSON.stringify({ ...rec, tokens, pos_tags: tags });
  });
  fs.writeFileSync(req(flags, "out"), lines.join("\n") + "\n");
  process.stderr.write(`tagged ${records.length} records `
    + `(${unmappedTotal} unmapped tokens -> X)\n`);
  return 0;
}

function cmdSelfTest(flags: Map<string, string>): number {
  const outDir = req(flags, "out");
  fs.mkdirSync(outDir, { recursive: true });
  const seed = intFlag(flags, "seed", 42);
  const vocab = fixtureVocab();
  const config: BertConfig = {
    vocabSize: vocab.size, hiddenSize: 768, numLayers: 2, numHeads: 12,
    intermediateSize: 1024, maxLen: 64,
  };
  const ckpt = randomCheckpoint(config, vocab.words, seed);
  const fixture = buildFixture(vocab, config.maxLen);

  const es = exportProblems(ckpt, fixture.map((f) => f.record), undefined,
                            "self-test-checkpoint");
  const embPath = path.join(outDir, "fixture.emb");
  writeEmbeddings(es, embPath);

  const back = readEmbeddings(embPath);
  if (back.dim !== config.hiddenSize || back.problems.length !== 3) {
    throw new Error("self-test round trip failed");
  }
  back.problems.forEach((p, i) => {
    if (p.seqLen !== fixture[i].record.tokens.length) {
      throw new Error(`self-test: problem ${p.id} token count mismatch`);
    }
  });

  writeRecords(fixture.map((f) => f.record), path.join(outDir, "fixture.jsonl"));

  let unmapped = 0;
  for (const f of fixture) {
    unmapped += f.record.pos_tags.filter(
      (t, i) => t === "X" && ![CLS, SEP].includes(f.record.tokens[i])).length;
  }
  const summary = {
    hidden_size: config.hiddenSize,
    num_layers: config.numLayers,
    vocab_size: config.vocabSize,
    problem_count: 3,
    token_counts: fixture.map((f) => f.record.tokens.length),
    answers: fixture.map((f) =>
      evalPrefix(f.record.equation_prefix, f.record.quantity_values)),
    unmapped_tags: unmapped,
    checkpoint_seed: seed,
  };
  fs.writeFileSync(path.join(outDir, "summary.json"),
                   JSON.stringify(summary, null, 2));
  process.stdout.write(JSON.stringify(summary) + "\n");
  return 0;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  const commands: Record<string, (f: Map<string, string>) => number> = {
    "make-checkpoint": cmdMakeCheckpoint,
    "export": cmdExport,
    "pos-tag": cmdPosTag,
    "self-test": cmdSelfTest,
  };
  try {
    const fn = command === undefined ? undefined : commands[command];
    if (!fn) {
      process.stderr.write(
        "usage: cli.js <make-checkpoint|export|pos-tag|self-test> --flag value ...\n");
      return 1;
    }
    return fn(parseFlags(rest));
  } catch (err) {
    if (err instanceof UsageError) {
      process.stderr.write(`usage error: ${err.message}\n`);
      return 1;
    }
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 2;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
