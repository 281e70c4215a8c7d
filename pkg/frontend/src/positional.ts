/**
 * Positional information: none, additive sinusoidal tables, or rotary
 * rotation of query/key vectors.
 */

import * as tf from "@tensorflow/tfjs";

export type Positional = "none" | "sinusoidal" | "rotary";

/** seqLen x dim sinusoidal table, interleaved sin/cos pairs. */
export function sinusoidalTable(seqLen: number, dim: number): tf.Tensor2D {
  if (dim % 2 !== 0) {
    throw new Error("sinusoidal dimension must be even");
  }
  const data = new Float32Array(seqLen * dim);
  for (let pos = 0; pos < seqLen; pos++) {
    for (let i = 0; i < dim / 2; i++) {
      const freq = 1 / Math.pow(10000, (2 * i) / dim);
      data[pos * dim + 2 * i] = Math.sin(pos * freq);
      data[pos * dim + 2 * i + 1] = Math.cos(pos * freq);
    }
  }
  return tf.tensor2d(data, [seqLen, dim]);
}

/** Rotation angles for rotary embedding, seqLen x (dim/2). */
export function rotaryAngles(seqLen: number, dim: number): {
  cos: tf.Tensor2D;
  sin: tf.Tensor2D;
} {
  if (dim % 2 !== 0) {
    throw new Error("rotary head dimension must be even");
  }
  const half = dim / 2;
  const cos = new Float32Array(seqLen * half);
  const sin = new Float32Array(seqLen * half);
  for (let pos = 0; pos < seqLen; pos++) {
    for (let i = 0; i < half; i++) {
      const theta = pos / Math.pow(10000, (2 * i) / dim);
      cos[pos * half + i] = Math.cos(theta);
      sin[pos * half + i] = Math.sin(theta);
    }
  }
  return {
    cos: tf.tensor2d(cos, [seqLen, half]),
    sin: tf.tensor2d(sin, [seqLen, half]),
  };
}

/**
 * Apply rotary rotation to a [batch, seqLen, dim] tensor, rotating
 * consecutive (even, odd) component pairs by the position angle.
 */
export function applyRotary(x: tf.Tensor3D): tf.Tensor3D {
  return tf.tidy(() => {
    const [batch, seqLen, dim] = x.shape;
    const half = dim / 2;
    const { cos, sin } = rotaryAngles(seqLen, dim);
    const reshaped = x.reshape([batch, seqLen, half, 2]);
    const even = reshaped.slice([0, 0, 0, 0], [batch, seqLen, half, 1]).squeeze([3]) as tf.Tensor3D;
    const odd = reshaped.slice([0, 0, 0, 1], [batch, seqLen, half, 1]).squeeze([3]) as tf.Tensor3D;
    const c = cos.expandDims(0);
    const s = sin.expandDims(0);
    const rotEven = even.mul(c).sub(odd.mul(s));
    const rotOdd = even.mul(s).add(odd.mul(c));
    return tf
      .stack([rotEven, rotOdd], 3)
      .reshape([batch, seqLen, dim]) as tf.Tensor3D;
  });
}
