/**
 * Adam training loop over length-grouped batches, seeded end to end.
 */

import * as tf from "@tensorflow/tfjs";

import { byLength, DatasetRecord } from "./jsonl.js";
import { HarnessModel } from "./model.js";
import { Rng } from "./random.js";

export interface TrainConfig {
  steps: number;
  batchSize: number;
  learningRate: number;
  seed: number;
  logEvery?: number;
}

export interface TrainResult {
  losses: number[];
  finalLoss: number;
}

interface Batch {
  strings: string[];
  labels: number[];
}

/** Same-length batches, shuffled deterministically. */
export function makeBatches(
  records: DatasetRecord[],
  batchSize: number,
  rng: Rng,
): Batch[] {
  const batches: Batch[] = [];
  for (const [, group] of byLength(records)) {
    const shuffled = rng.shuffle(group);
    for (let i = 0; i < shuffled.length; i += batchSize) {
      const chunk = shuffled.slice(i, i + batchSize);
      batches.push({
        strings: chunk.map((r) => r.s),
        labels: chunk.map((r) => r.label),
      });
    }
  }
  return rng.shuffle(batches);
}

export function train(
  model: HarnessModel,
  records: DatasetRecord[],
  config: TrainConfig,
  log: (line: string) => void = () => {},
): TrainResult {
  const rng = new Rng(config.seed ^ 0x5eed);
  const optimizer = tf.train.adam(config.learningRate);
  const losses: number[] = [];
  let batches: Batch[] = [];
  let cursor = 0;
  for (let step = 0; step < config.steps; step++) {
    if (cursor >= batches.length) {
      batches = makeBatches(records, config.batchSize, rng);
      cursor = 0;
    }
    const batch = batches[cursor++];
    const ids = batch.strings.map((s) => model.encode(s));
    const labels = tf.oneHot(
      tf.tensor1d(batch.labels, "int32"),
      2,
    ) as tf.Tensor2D;
    const loss = optimizer.minimize(
      () => {
        const logits = model.forward(ids);
        return tf.losses.softmaxCrossEntropy(labels, logits) as tf.Scalar;
      },
      true,
      model.variables(),
    ) as tf.Scalar;
    const value = loss.dataSync()[0];
    losses.push(value);
    loss.dispose();
    labels.dispose();
    const every = config.logEvery ?? 0;
    if (every > 0 && (step + 1) % every === 0) {
      log(`step ${step + 1}/${config.steps} loss ${value.toFixed(4)}`);
    }
  }
  optimizer.dispose();
  return { losses, finalLoss: losses[losses.length - 1] ?? NaN };
}
