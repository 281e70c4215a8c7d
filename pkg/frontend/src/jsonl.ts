/**
 * Reader for the dataset JSONL contract: a manifest line followed by
 * one record per string. This file format is the only interface to the
 * generator; labels are taken on trust here (the generator validates
 * them against its automata) but shapes are checked strictly.
 */

import { readFileSync } from "node:fs";

export interface Manifest {
  language: string;
  seed: number;
  balance: string;
  version: string;
  warnings: string[];
}

export interface DatasetRecord {
  s: string;
  label: 0 | 1;
  len: number;
}

export interface Dataset {
  manifest: Manifest;
  records: DatasetRecord[];
}

export function parseDataset(content: string): Dataset {
  const lines = content.split("\n").filter((line) => line.trim() !== "");
  if (lines.length === 0) {
    throw new Error("empty dataset file");
  }
  const head = JSON.parse(lines[0]);
  if (head.type !== "manifest") {
    throw new Error("first line must be a manifest");
  }
  const manifest: Manifest = {
    language: String(head.language),
    seed: Number(head.seed),
    balance: String(head.balance),
    version: String(head.version),
    warnings: Array.isArray(head.warnings) ? head.warnings.map(String) : [],
  };
  const records: DatasetRecord[] = [];
  for (let i = 1; i < lines.length; i++) {
    let obj: unknown;
    try {
      obj = JSON.parse(lines[i]);
    } catch {
      throw new Error(`line ${i + 1}: malformed JSON`);
    }
    const rec = obj as { s?: unknown; label?: unknown; len?: unknown };
    if (typeof rec.s !== "string") {
      throw new Error(`line ${i + 1}: missing string field "s"`);
    }
    if (rec.label !== 0 && rec.label !== 1) {
      throw new Error(`line ${i + 1}: label must be 0 or 1`);
    }
    if (rec.len !== rec.s.length) {
      throw new Error(
        `line ${i + 1}: recorded length ${rec.len} != ${rec.s.length}`,
      );
    }
    records.push({ s: rec.s, label: rec.label, len: rec.s.length });
  }
  return { manifest, records };
}

export function readDataset(path: string): Dataset {
  return parseDataset(readFileSync(path, "utf8"));
}

/** Sorted distinct tokens appearing in the records. */
export function inferAlphabet(records: DatasetRecord[]): string[] {
  const tokens = new Set<string>();
  for (const rec of records) {
    for (const ch of rec.s) {
      tokens.add(ch);
    }
  }
  return [...tokens].sort();
}

/** Group record indices by string length, ascending. */
export function byLength(records: DatasetRecord[]): Map<number, DatasetRecord[]> {
  const groups = new Map<number, DatasetRecord[]>();
  for (const rec of records) {
    const bucket = groups.get(rec.len);
    if (bucket) {
      bucket.push(rec);
    } else {
      groups.set(rec.len, [rec]);
    }
  }
  return new Map([...groups.entries()].sort((a, b) => a[0] - b[0]));
}
