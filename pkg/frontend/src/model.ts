/**
 * Minimal masked-attention sequence classifier.
 *
 * Tokens (plus a trailing EOS) are embedded, run through a stack of
 * pre-norm transformer layers whose heads carry strict-causal global or
 * k-local masks, and classified from the EOS column. Head layout for
 * the hybrid pattern: the first half of the heads is local, the second
 * half global.
 */

import * as tf from "@tensorflow/tfjs";

import { additiveMask, MaskSpec } from "./masks.js";
import { applyRotary, Positional, sinusoidalTable } from "./positional.js";
import { Rng } from "./random.js";

export type MaskPattern =
  | { pattern: "global" }
  | { pattern: "local"; k: number }
  | { pattern: "hybrid"; k: number };

export interface ModelConfig {
  alphabet: string[];
  layers: number;
  width: number;
  heads: number;
  mask: MaskPattern;
  positional: Positional;
  seed: number;
}

export function headMasks(config: ModelConfig): MaskSpec[] {
  const { heads, mask } = config;
  if (mask.pattern === "global") {
    return Array.from({ length: heads }, () => ({ kind: "global" as const }));
  }
  if (mask.pattern === "local") {
    return Array.from({ length: heads }, () => ({
      kind: "local" as const,
      k: mask.k,
    }));
  }
  if (heads % 2 !== 0) {
    throw new Error("hybrid pattern requires an even head count");
  }
  return Array.from({ length: heads }, (_, h) =>
    h < heads / 2
      ? { kind: "local" as const, k: mask.k }
      : { kind: "global" as const },
  );
}

interface LayerVars {
  wq: tf.Variable<tf.Rank.R2>;
  wk: tf.Variable<tf.Rank.R2>;
  wv: tf.Variable<tf.Rank.R2>;
  wo: tf.Variable<tf.Rank.R2>;
  ln1g: tf.Variable<tf.Rank.R1>;
  ln1b: tf.Variable<tf.Rank.R1>;
  ln2g: tf.Variable<tf.Rank.R1>;
  ln2b: tf.Variable<tf.Rank.R1>;
  ffnW1: tf.Variable<tf.Rank.R2>;
  ffnB1: tf.Variable<tf.Rank.R1>;
  ffnW2: tf.Variable<tf.Rank.R2>;
  ffnB2: tf.Variable<tf.Rank.R1>;
}

export class HarnessModel {
  readonly config: ModelConfig;
  readonly vocab: string[];
  private embed: tf.Variable<tf.Rank.R2>;
  private layers: LayerVars[];
  private readW: tf.Variable<tf.Rank.R2>;
  private readB: tf.Variable<tf.Rank.R1>;

  constructor(config: ModelConfig) {
    if (config.width % config.heads !== 0) {
      throw new Error("width must be divisible by heads");
    }
    this.config = config;
    this.vocab = [...config.alphabet, "<eos>"];
    const rng = new Rng(config.seed);
    const w = config.width;
    const init = (shape: [number, number], std: number) => {
      const size = shape.reduce((a, b) => a * b, 1);
      const data = new Float32Array(size);
      for (let i = 0; i < size; i++) {
        data[i] = rng.normal() * std;
      }
      return tf.variable(tf.tensor(data, shape)) as tf.Variable<tf.Rank.R2>;
    };
    const ones = (n: number) =>
      tf.variable(tf.ones([n])) as tf.Variable<tf.Rank.R1>;
    const zeros = (n: number) =>
      tf.variable(tf.zeros([n])) as tf.Variable<tf.Rank.R1>;
    const std = 0.1;
    this.embed = init([this.vocab.length, w], std);
    this.layers = Array.from({ length: config.layers }, () => ({
      wq: init([w, w], std),
      wk: init([w, w], std),
      wv: init([w, w], std),
      wo: init([w, w], std),
      ln1g: ones(w),
      ln1b: zeros(w),
      ln2g: ones(w),
      ln2b: zeros(w),
      ffnW1: init([w, 4 * w], std),
      ffnB1: zeros(4 * w),
      ffnW2: init([4 * w, w], std),
      ffnB2: zeros(w),
    }));
    // Zero-init readout: an untrained model is a constant classifier,
    // so its accuracy on balanced data is exactly chance level.
    this.readW = tf.variable(tf.zeros([w, 2])) as tf.Variable<tf.Rank.R2>;
    this.readB = zeros(2);
  }

  variables(): tf.Variable[] {
    const out: tf.Variable[] = [this.embed, this.readW, this.readB];
    for (const layer of this.layers) {
      out.push(
        layer.wq, layer.wk, layer.wv, layer.wo,
        layer.ln1g, layer.ln1b, layer.ln2g, layer.ln2b,
        layer.ffnW1, layer.ffnB1, layer.ffnW2, layer.ffnB2,
      );
    }
    return out;
  }

  /** Token ids including the trailing EOS. */
  encode(s: string): number[] {
    const ids = [...s].map((ch) => {
      const id = this.vocab.indexOf(ch);
      if (id < 0 || id === this.vocab.length - 1) {
        throw new Error(`token outside the model alphabet: ${ch}`);
      }
      return id;
    });
    ids.push(this.vocab.length - 1);
    return ids;
  }

  private layerNorm(
    x: tf.Tensor3D,
    gamma: tf.Variable<tf.Rank.R1>,
    beta: tf.Variable<tf.Rank.R1>,
  ): tf.Tensor3D {
    const mean = x.mean(-1, true);
    const centered = x.sub(mean);
    const variance = centered.square().mean(-1, true);
    const normed = centered.div(variance.add(1e-5).sqrt());
    return normed.mul(gamma).add(beta) as tf.Tensor3D;
  }

  private attention(x: tf.Tensor3D, layer: LayerVars): tf.Tensor3D {
    const [batch, seqLen, w] = x.shape;
    const heads = this.config.heads;
    const dHead = w / heads;
    const split = (proj: tf.Tensor3D) =>
      proj.reshape([batch, seqLen, heads, dHead]);
    let q: tf.Tensor = split(x.matMul(layer.wq.expandDims(0).tile([batch, 1, 1])) as tf.Tensor3D);
    let k: tf.Tensor = split(x.matMul(layer.wk.expandDims(0).tile([batch, 1, 1])) as tf.Tensor3D);
    const v = split(x.matMul(layer.wv.expandDims(0).tile([batch, 1, 1])) as tf.Tensor3D);
    if (this.config.positional === "rotary") {
      const flat = (t: tf.Tensor) =>
        t.transpose([0, 2, 1, 3]).reshape([batch * heads, seqLen, dHead]) as tf.Tensor3D;
      const unflat = (t: tf.Tensor3D) =>
        t.reshape([batch, heads, seqLen, dHead]).transpose([0, 2, 1, 3]);
      q = unflat(applyRotary(flat(q)));
      k = unflat(applyRotary(flat(k)));
    }
    // [batch, heads, n, dHead]
    const qh = q.reshape([batch, seqLen, heads, dHead]).transpose([0, 2, 1, 3]);
    const kh = k.reshape([batch, seqLen, heads, dHead]).transpose([0, 2, 1, 3]);
    const vh = v.reshape([batch, seqLen, heads, dHead]).transpose([0, 2, 1, 3]);
    // scores [batch, heads, n, m]
    const scores = tf.matMul(qh, kh, false, true).div(Math.sqrt(dHead));
    const specs = headMasks(this.config);
    const biasData = new Float32Array(heads * seqLen * seqLen);
    const anyData = new Float32Array(heads * seqLen);
    specs.forEach((spec, h) => {
      const { bias, rowAny } = additiveMask(spec, seqLen);
      for (let n = 0; n < seqLen; n++) {
        biasData.set(bias[n], h * seqLen * seqLen + n * seqLen);
        anyData[h * seqLen + n] = rowAny[n] ? 1 : 0;
      }
    });
    const bias = tf.tensor(biasData, [1, heads, seqLen, seqLen]);
    const rowAny = tf.tensor(anyData, [1, heads, seqLen, 1]);
    const alpha = tf.softmax(scores.add(bias), -1).mul(rowAny);
    const mixed = tf.matMul(alpha, vh).transpose([0, 2, 1, 3]);
    const merged = mixed.reshape([batch, seqLen, w]) as tf.Tensor3D;
    return merged.matMul(layer.wo.expandDims(0).tile([batch, 1, 1])) as tf.Tensor3D;
  }

  /** Logits [batch, 2] from the EOS column. */
  forward(ids: number[][]): tf.Tensor2D {
    return tf.tidy(() => {
      const batch = ids.length;
      const seqLen = ids[0].length;
      let x = tf
        .gather(this.embed, tf.tensor(ids.flat(), [batch * seqLen], "int32"))
        .reshape([batch, seqLen, this.config.width]) as tf.Tensor3D;
      if (this.config.positional === "sinusoidal") {
        x = x.add(sinusoidalTable(seqLen, this.config.width).expandDims(0)) as tf.Tensor3D;
      }
      for (const layer of this.layers) {
        const att = this.attention(this.layerNorm(x, layer.ln1g, layer.ln1b), layer);
        x = x.add(att) as tf.Tensor3D;
        const normed = this.layerNorm(x, layer.ln2g, layer.ln2b);
        const hidden = normed
          .matMul(layer.ffnW1.expandDims(0).tile([batch, 1, 1]))
          .add(layer.ffnB1)
          .relu();
        const ffn = hidden
          .matMul(layer.ffnW2.expandDims(0).tile([batch, 1, 1]))
          .add(layer.ffnB2);
        x = x.add(ffn) as tf.Tensor3D;
      }
      const eos = x
        .slice([0, seqLen - 1, 0], [batch, 1, this.config.width])
        .reshape([batch, this.config.width]) as tf.Tensor2D;
      return eos.matMul(this.readW).add(this.readB) as tf.Tensor2D;
    });
  }

  /** Predicted labels for same-length strings. */
  predict(strings: string[]): number[] {
    const ids = strings.map((s) => this.encode(s));
    const logits = this.forward(ids);
    const out = logits.argMax(-1).arraySync() as number[];
    logits.dispose();
    return out;
  }

  toJSON(): object {
    return {
      config: this.config,
      weights: this.variables().map((v) => ({
        shape: v.shape,
        data: Array.from(v.dataSync()),
      })),
    };
  }

  static fromJSON(obj: { config: ModelConfig; weights: { shape: number[]; data: number[] }[] }): HarnessModel {
    const model = new HarnessModel(obj.config);
    const vars = model.variables();
    if (vars.length !== obj.weights.length) {
      throw new Error("checkpoint does not match the model architecture");
    }
    vars.forEach((v, i) => {
      v.assign(tf.tensor(obj.weights[i].data, obj.weights[i].shape as number[]));
    });
    return model;
  }
}
