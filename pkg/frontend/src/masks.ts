/**
 * Strict-causal attention masks.
 *
 * Positions are 1-based in the definitions: position n may attend to
 * position m when m < n (global) or max(1, n - k) <= m < n (local
 * window of k). Row n never includes n itself, so the first row of
 * every mask is empty.
 */

export type MaskKind = "global" | "local";

export interface MaskSpec {
  kind: MaskKind;
  k?: number;
}

export function allows(spec: MaskSpec, n: number, m: number): boolean {
  if (spec.kind === "global") {
    return m < n;
  }
  const k = spec.k;
  if (k === undefined || k < 1) {
    throw new Error("local mask requires k >= 1");
  }
  return Math.max(1, n - k) <= m && m < n;
}

/** size x size 0/1 matrix; entry [i][j] covers n = i+1, m = j+1. */
export function materialize(spec: MaskSpec, size: number): Int8Array[] {
  const rows: Int8Array[] = [];
  for (let i = 0; i < size; i++) {
    const row = new Int8Array(size);
    for (let j = 0; j < size; j++) {
      row[j] = allows(spec, i + 1, j + 1) ? 1 : 0;
    }
    rows.push(row);
  }
  return rows;
}

/**
 * Additive mask: 0 where attention is allowed, -1e9 elsewhere. The
 * returned rowAny flags mark rows with at least one allowed position;
 * fully masked rows must be zeroed after softmax, not left uniform.
 */
export function additiveMask(
  spec: MaskSpec,
  size: number,
): { bias: Float32Array[]; rowAny: boolean[] } {
  const grid = materialize(spec, size);
  const bias = grid.map((row) => {
    const out = new Float32Array(size);
    for (let j = 0; j < size; j++) {
      out[j] = row[j] ? 0 : -1e9;
    }
    return out;
  });
  const rowAny = grid.map((row) => row.some((v) => v === 1));
  return { bias, rowAny };
}
