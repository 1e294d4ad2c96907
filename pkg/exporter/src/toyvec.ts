import { createHash } from "node:crypto";

/**
 * Deterministic pseudo-random unit vector keyed by (token, seed).
 *
 * SHA-256 in counter mode, four big-endian uint64 lanes per block, each
 * mapped to [-1, 1) via (u >> 11) * 2^-53. The engine implements the
 * identical scheme, so both sides generate bit-equal float64 vectors.
 */
export function toyEmbedder(token: string, dim: number, seed: number): Float64Array {
  if (dim < 1) {
    throw new Error(`dim must be >= 1, got ${dim}`);
  }
  const out = new Float64Array(dim);
  let i = 0;
  let block = 0;
  while (i < dim) {
    const digest = createHash("sha256")
      .update(`${token}\x1f${seed}\x1f${block}`, "utf-8")
      .digest();
    const view = new DataView(digest.buffer, digest.byteOffset, digest.byteLength);
    for (let off = 0; off < 32 && i < dim; off += 8) {
      const u = view.getBigUint64(off, false);
      out[i] = 2.0 * (Number(u >> 11n) * 2 ** -53) - 1.0;
      i += 1;
    }
    block += 1;
  }
  let norm = 0;
  for (const x of out) norm += x * x;
  norm = Math.sqrt(norm);
  if (norm < 1e-12) {
    out[0] = 1.0;
    norm = 1.0;
  }
  for (let j = 0; j < dim; j += 1) out[j] /= norm;
  return out;
}
