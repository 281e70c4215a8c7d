import { describe, expect, it } from "vitest";

import { evaluate, EvalReport, reportToCsv } from "../src/evaluate.js";
import { DatasetRecord } from "../src/jsonl.js";
import { HarnessModel } from "../src/model.js";
import { Rng } from "../src/random.js";
import { makeBatches, train } from "../src/train.js";

/** All strings over {a, b} of lengths 1..maxLen, labelled by endsWith("a").
 * Exactly half of each length group ends in "a", so the set is balanced. */
function endsA(maxLen: number): DatasetRecord[] {
  const records: DatasetRecord[] = [];
  for (let len = 1; len <= maxLen; len++) {
    for (let code = 0; code < 1 << len; code++) {
      let s = "";
      for (let i = 0; i < len; i++) {
        s += (code >> i) & 1 ? "b" : "a";
      }
      records.push({ s, label: s.endsWith("a") ? 1 : 0, len });
    }
  }
  return records;
}

describe("makeBatches", () => {
  it("keeps every batch at a single length", () => {
    const batches = makeBatches(endsA(5), 8, new Rng(1));
    for (const batch of batches) {
      const lens = new Set(batch.strings.map((s) => s.length));
      expect(lens.size).toBe(1);
      expect(batch.strings).toHaveLength(batch.labels.length);
    }
  });

  it("covers every record exactly once per pass", () => {
    const records = endsA(4);
    const batches = makeBatches(records, 8, new Rng(1));
    const seen = batches.flatMap((b) => b.strings).sort();
    expect(seen).toEqual(records.map((r) => r.s).sort());
  });

  it("is deterministic for a fixed seed", () => {
    const records = endsA(4);
    const a = makeBatches(records, 8, new Rng(42));
    const b = makeBatches(records, 8, new Rng(42));
    expect(a).toEqual(b);
  });
});

describe("train", () => {
  it("reduces the loss and fits the training set", () => {
    const records = endsA(6);
    const model = new HarnessModel({
      alphabet: ["a", "b"],
      layers: 2,
      width: 32,
      heads: 4,
      mask: { pattern: "hybrid", k: 1 },
      positional: "none",
      seed: 0,
    });
    const result = train(model, records, {
      steps: 150,
      batchSize: 32,
      learningRate: 1e-3,
      seed: 0,
    });
    expect(result.losses).toHaveLength(150);
    const head = result.losses.slice(0, 10);
    const tail = result.losses.slice(-10);
    const mean = (xs: number[]) => xs.reduce((a, b) => a + b, 0) / xs.length;
    expect(mean(tail)).toBeLessThan(mean(head) / 2);

    const report = evaluate(model, records);
    expect(report.accuracy).toBeGreaterThan(0.95);
    expect(report.longestPerfectLength).toBeGreaterThanOrEqual(1);
  });
});

describe("reportToCsv", () => {
  it("emits one row per length in ascending order", () => {
    const report: EvalReport = {
      accuracyByLength: { 3: 0.5, 1: 1, 2: 1 },
      longestPerfectLength: 2,
      total: 30,
      accuracy: 0.8,
    };
    expect(reportToCsv(report)).toBe("length,accuracy\n1,1\n2,1\n3,0.5\n");
  });
});
