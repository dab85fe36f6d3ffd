/** Gaussian kernel density estimation with Scott's bandwidth rule. */

const SQRT_2PI = Math.sqrt(2 * Math.PI);

export interface KdeResult {
  grid: number[];
  density: number[];
  bandwidth: number;
  rule: string;
}

export function sampleStd(xs: number[]): number {
  const n = xs.length;
  if (n < 2) return 0;
  const mean = xs.reduce((a, b) => a + b, 0) / n;
  const ss = xs.reduce((a, b) => a + (b - mean) * (b - mean), 0);
  return Math.sqrt(ss / (n - 1));
}

/** Scott's rule h = sigma * n^(-1/5), with a floor for degenerate samples. */
export function scottBandwidth(xs: number[]): number {
  const sigma = sampleStd(xs);
  if (sigma > 0) {
    return sigma * Math.pow(xs.length, -0.2);
  }
  // all-equal sample: pick a width that renders as a single narrow peak
  const scale = Math.max(Math.abs(xs[0] ?? 0), 1.0);
  return 1e-3 * scale;
}

export function gaussianKde(xs: number[], nGrid = 512): KdeResult {
  if (xs.length === 0) {
    throw new Error("cannot estimate a density from an empty sample");
  }
  const h = scottBandwidth(xs);
  const lo = Math.min(...xs) - 3 * h;
  const hi = Math.max(...xs) + 3 * h;
  const step = nGrid > 1 ? (hi - lo) / (nGrid - 1) : 1;
  const grid: number[] = [];
  const density: number[] = [];
  const norm = 1 / (xs.length * h * SQRT_2PI);
  for (let i = 0; i < nGrid; i++) {
    const x = lo + i * step;
    let acc = 0;
    for (const xi of xs) {
      const z = (x - xi) / h;
      acc += Math.exp(-0.5 * z * z);
    }
    grid.push(x);
    density.push(acc * norm);
  }
  return { grid, density, bandwidth: h, rule: "scott" };
}
