/**
 * Accuracy by length and the longest perfect length: the largest n
 * such that accuracy is 1.0 at every evaluated length <= n (0 if the
 * smallest evaluated length already has errors).
 */

import { byLength, DatasetRecord } from "./jsonl.js";
import { HarnessModel } from "./model.js";

export interface EvalReport {
  accuracyByLength: Record<number, number>;
  longestPerfectLength: number;
  total: number;
  accuracy: number;
}

export function evaluate(
  model: HarnessModel,
  records: DatasetRecord[],
  batchSize = 64,
): EvalReport {
  const accuracyByLength: Record<number, number> = {};
  let correctTotal = 0;
  for (const [len, group] of byLength(records)) {
    let correct = 0;
    for (let i = 0; i < group.length; i += batchSize) {
      const chunk = group.slice(i, i + batchSize);
      const got = model.predict(chunk.map((r) => r.s));
      chunk.forEach((r, j) => {
        if (got[j] === r.label) {
          correct++;
        }
      });
    }
    accuracyByLength[len] = correct / group.length;
    correctTotal += correct;
  }
  const lengths = Object.keys(accuracyByLength)
    .map(Number)
    .sort((a, b) => a - b);
  let longest = 0;
  for (const len of lengths) {
    if (accuracyByLength[len] < 1.0) {
      break;
    }
    longest = len;
  }
  return {
    accuracyByLength,
    longestPerfectLength: longest,
    total: records.length,
    accuracy: records.length ? correctTotal / records.length : 0,
  };
}

export function reportToCsv(report: EvalReport): string {
  const lines = ["length,accuracy"];
  for (const len of Object.keys(report.accuracyByLength)
    .map(Number)
    .sort((a, b) => a - b)) {
    lines.push(`${len},${report.accuracyByLength[len]}`);
  }
  return lines.join("\n") + "\n";
}
