import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { beforeAll, describe, expect, it } from "vitest";

import { byLength, inferAlphabet, parseDataset, readDataset } from "../src/jsonl.js";

let datasetPath: string;

beforeAll(() => {
  datasetPath = join(mkdtempSync(join(tmpdir(), "harness-")), "ends-a.jsonl");
  const run = spawnSync(
    "python3",
    [
      "-m", "tal.cli", "gen-data",
      "--language", "ends-a",
      "--lengths", "1..8",
      "--per-length", "20",
      "--balance", "balanced",
      "--seed", "11",
      "--out", datasetPath,
    ],
    { cwd: "..", encoding: "utf8" },
  );
  expect(run.status, run.stderr).toBe(0);
});

describe("readDataset on generator output", () => {
  it("parses the manifest line", () => {
    const { manifest } = readDataset(datasetPath);
    expect(manifest.language).toBe("ends-a");
    expect(manifest.seed).toBe(11);
    expect(manifest.balance).toBe("balanced");
    expect(manifest.version.length).toBeGreaterThan(0);
  });

  it("parses every record with a consistent length field", () => {
    const { records } = readDataset(datasetPath);
    expect(records).toHaveLength(160);
    for (const rec of records) {
      expect(rec.len).toBe(rec.s.length);
      expect([0, 1]).toContain(rec.label);
    }
  });

  it("labels agree with membership in the language", () => {
    const { records } = readDataset(datasetPath);
    for (const rec of records) {
      expect(rec.label).toBe(rec.s.endsWith("a") ? 1 : 0);
    }
  });

  it("is balanced within every length group", () => {
    const { records } = readDataset(datasetPath);
    for (const [, group] of byLength(records)) {
      const positives = group.filter((r) => r.label === 1).length;
      expect(positives * 2).toBe(group.length);
    }
  });
});

describe("parseDataset validation", () => {
  const manifest = JSON.stringify({
    type: "manifest",
    language: "ends-a",
    seed: 0,
    balance: "balanced",
    version: "1",
    warnings: [],
  });

  it("rejects an empty file", () => {
    expect(() => parseDataset("")).toThrow(/empty/);
  });

  it("rejects a file that does not start with a manifest", () => {
    expect(() => parseDataset('{"s":"a","label":1,"len":1}')).toThrow(/manifest/);
  });

  it("rejects malformed JSON with the line number", () => {
    expect(() => parseDataset(`${manifest}\n{oops`)).toThrow(/line 2/);
  });

  it("rejects a record whose label is not 0 or 1", () => {
    const bad = `${manifest}\n{"s":"a","label":2,"len":1}`;
    expect(() => parseDataset(bad)).toThrow(/line 2: label/);
  });

  it("rejects a record whose length field disagrees with the string", () => {
    const bad = `${manifest}\n{"s":"ab","label":0,"len":3}`;
    expect(() => parseDataset(bad)).toThrow(/line 2: recorded length 3 != 2/);
  });

  it("accepts a minimal well-formed file", () => {
    const good = `${manifest}\n{"s":"ab","label":0,"len":2}\n`;
    const { records } = parseDataset(good);
    expect(records).toEqual([{ s: "ab", label: 0, len: 2 }]);
  });
});

describe("helpers", () => {
  it("inferAlphabet returns sorted distinct tokens", () => {
    const content = readFileSync(datasetPath, "utf8");
    const { records } = parseDataset(content);
    expect(inferAlphabet(records)).toEqual(["a", "b"]);
  });

  it("byLength groups records in ascending length order", () => {
    const { records } = readDataset(datasetPath);
    const lengths = [...byLength(records).keys()];
    expect(lengths).toEqual([1, 2, 3, 4, 5, 6, 7, 8]);
  });
});
