#!/usr/bin/env node
/**
 * train-harness CLI: train a masked-attention classifier on a JSONL
 * dataset, evaluate a checkpoint by length, or print a mask.
 */

import { readFileSync, writeFileSync } from "node:fs";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { evaluate, reportToCsv } from "./evaluate.js";
import { inferAlphabet, readDataset } from "./jsonl.js";
import { materialize } from "./masks.js";
import { HarnessModel, MaskPattern } from "./model.js";
import { Positional } from "./positional.js";
import { train } from "./train.js";

function parseMask(pattern: string, k: number): MaskPattern {
  if (pattern === "global") {
    return { pattern: "global" };
  }
  if (pattern === "local") {
    return { pattern: "local", k };
  }
  if (pattern === "hybrid") {
    return { pattern: "hybrid", k };
  }
  throw new Error(`unknown mask pattern: ${pattern}`);
}

export async function main(argv: string[]): Promise<number> {
  let exitCode = 0;
  await yargs(argv)
    .command(
      "train",
      "train a classifier on a JSONL dataset",
      (y) =>
        y
          .option("data", { type: "string", demandOption: true })
          .option("out", { type: "string", demandOption: true })
          .option("layers", { type: "number", default: 2 })
          .option("width", { type: "number", default: 32 })
          .option("heads", { type: "number", default: 4 })
          .option("mask", {
            type: "string",
            default: "hybrid",
            choices: ["global", "local", "hybrid"],
          })
          .option("k", { type: "number", default: 1 })
          .option("positional", {
            type: "string",
            default: "none",
            choices: ["none", "sinusoidal", "rotary"],
          })
          .option("steps", { type: "number", default: 2000 })
          .option("batch", { type: "number", default: 32 })
          .option("lr", { type: "number", default: 1e-3 })
          .option("seed", { type: "number", default: 0 }),
      (args) => {
        const { records } = readDataset(args.data);
        const model = new HarnessModel({
          alphabet: inferAlphabet(records),
          layers: args.layers,
          width: args.width,
          heads: args.heads,
          mask: parseMask(args.mask, args.k),
          positional: args.positional as Positional,
          seed: args.seed,
        });
        const result = train(
          model,
          records,
          {
            steps: args.steps,
            batchSize: args.batch,
            learningRate: args.lr,
            seed: args.seed,
            logEvery: Math.max(1, Math.floor(args.steps / 20)),
          },
          (line) => console.error(line),
        );
        writeFileSync(args.out, JSON.stringify(model.toJSON()));
        console.log(
          JSON.stringify({ finalLoss: result.finalLoss, checkpoint: args.out }),
        );
      },
    )
    .command(
      "eval",
      "evaluate a checkpoint on a JSONL dataset",
      (y) =>
        y
          .option("model", { type: "string", demandOption: true })
          .option("data", { type: "string", demandOption: true })
          .option("csv", { type: "string" })
          .option("out", { type: "string" }),
      (args) => {
        const model = HarnessModel.fromJSON(
          JSON.parse(readFileSync(args.model, "utf8")),
        );
        const { records } = readDataset(args.data);
        const report = evaluate(model, records);
        const payload = JSON.stringify(report, null, 1);
        if (args.out) {
          writeFileSync(args.out, payload + "\n");
        } else {
          console.log(payload);
        }
        if (args.csv) {
          writeFileSync(args.csv, reportToCsv(report));
        }
      },
    )
    .command(
      "masks",
      "print a strict-causal mask materialization",
      (y) =>
        y
          .option("kind", {
            type: "string",
            demandOption: true,
            choices: ["global", "local"],
          })
          .option("k", { type: "number" })
          .option("size", { type: "number", demandOption: true }),
      (args) => {
        const spec =
          args.kind === "global"
            ? { kind: "global" as const }
            : { kind: "local" as const, k: args.k };
        const mask = materialize(spec, args.size).map((row) => Array.from(row));
        console.log(
          JSON.stringify({ kind: spec.kind, k: spec.k ?? null, size: args.size, mask }),
        );
      },
    )
    .demandCommand(1)
    .strict()
    .fail((msg, err) => {
      console.error(`error: ${msg ?? err?.message}`);
      exitCode = 2;
    })
    .parseAsync();
  return exitCode;
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js")) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
