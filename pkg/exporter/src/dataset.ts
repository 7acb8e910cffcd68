/** JSONL dataset records: a lenient reader (id + text suffice for export)
 * and a strict writer emitting the full consumer schema, answers as decimal
 * strings. A prefix-expression evaluator self-checks every record before it
 * is written. */

import * as fs from "fs";

export interface MwpRecord {
  id: string;
  text: string;
  tokens: string[];
  token_ids: number[];
  quantity_indices: number[];
  quantity_values: number[];
  pos_tags: string[];
  equation_prefix: string[];
  answer: number;
  relation_label: 0 | 1;
}

export interface LooseRecord {
  id: string;
  text: string;
  tokens?: string[];
  [key: string]: unknown;
}

const OPERATORS = new Set(["+", "-", "*", "/", "^"]);

export function evalPrefix(tokens: string[], values: number[]): number {
  let pos = 0;
  function parse(): number {
    if (pos >= tokens.length) throw new Error("prefix expression ran out of tokens");
    const tok = tokens[pos++];
    if (OPERATORS.has(tok)) {
      const a = parse();
      const b = parse();
      switch (tok) {
        case "+": return a + b;
        case "-": return a - b;
        case "*": return a * b;
        case "/":
          if (Math.abs(b) < 1e-12) throw new Error("division by zero");
          return a / b;
        default:
          return Math.pow(a, b);
      }
    }
    if (/^N\d$/.test(tok)) {
      const idx = Number(tok.slice(1));
      if (idx >= values.length) throw new Error(`slot ${tok} out of range`);
      return values[idx];
    }
    if (tok.startsWith("C:")) return Number(tok.slice(2));
    throw new Error(`unknown equation token ${tok}`);
  }
  const out = parse();
  if (pos !== tokens.length) throw new Error("trailing equation tokens");
  return out;
}

export function validateRecord(rec: MwpRecord): void {
  const n = rec.tokens.length;
  if (rec.token_ids.length !== n || rec.pos_tags.length !== n) {
    throw new Error(`record ${rec.id}: token metadata misaligned`);
  }
  for (const qi of rec.quantity_indices) {
    if (qi < 0 || qi >= n) throw new Error(`record ${rec.id}: quantity index ${qi}`);
  }
  if (rec.quantity_values.length !== rec.quantity_indices.length) {
    throw new Error(`record ${rec.id}: quantity arrays misaligned`);
  }
  const value = evalPrefix(rec.equation_prefix, rec.quantity_values);
  const tol = 1e-6 * Math.max(1.0, Math.abs(rec.answer));
  if (Math.abs(value - rec.answer) > tol) {
    throw new Error(`record ${rec.id}: equation gives ${value}, answer ${rec.answer}`);
  }
}

export function readLoose(path: string): LooseRecord[] {
  const out: LooseRecord[] = [];
  const lines = fs.readFileSync(path, "utf-8").split("\n");
  lines.forEach((line, i) => {
    if (!line.trim()) return;
    const obj = JSON.parse(line);
    if (typeof obj.id !== "string" || typeof obj.text !== "string") {
      throw new Error(`line ${i + 1}: records need at least id and text`);
    }
    out.push(obj);
  });
  return out;
}

export function writeRecords(records: MwpRecord[], path: string): void {
  for (const rec of records) validateRecord(rec);
  const lines = records.map((rec) => JSON.stringify({
    id: rec.id,
    text: rec.text,
    tokens: rec.tokens,
    token_ids: rec.token_ids,
    quantity_indices: rec.quantity_indices,
    quantity_values: rec.quantity_values,
    pos_tags: rec.pos_tags,
    equation_prefix: rec.equation_prefix,
    answer: String(rec.answer),
    relation_label: rec.relation_label,
  }));
  fs.writeFileSync(path, lines.join("\n") + "\n");
}
