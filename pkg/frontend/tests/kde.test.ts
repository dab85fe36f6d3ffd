import { describe, expect, it } from "vitest";
import { gaussianKde, sampleStd, scottBandwidth } from "../src/kde";

describe("scott bandwidth", () => {
  it("matches sigma * n^(-1/5) by hand", () => {
    const xs = [0.1, 0.2, 0.3, 0.4, 0.5];
    const sigma = sampleStd(xs);
    expect(sigma).toBeCloseTo(Math.sqrt(0.025), 12);
    expect(scottBandwidth(xs)).toBeCloseTo(sigma * Math.pow(5, -0.2), 12);
  });

  it("falls back to a positive width for an all-equal sample", () => {
    expect(scottBandwidth([0.25, 0.25, 0.25])).toBeGreaterThan(0);
  });
});

describe("gaussian kde", () => {
  it("integrates to one", () => {
    const xs = Array.from({ length: 200 }, (_, i) => Math.sin(i * 12.9898) * 0.5 + 0.5);
    const { grid, density } = gaussianKde(xs, 1024);
    let integral = 0;
    for (let i = 1; i < grid.length; i++) {
      integral += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
    }
    expect(integral).toBeGreaterThan(0.99);
    expect(integral).toBeLessThan(1.01);
  });

  it("renders an all-equal sample as one narrow peak", () => {
    const { grid, density, bandwidth } = gaussianKde([0.3, 0.3, 0.3, 0.3], 256);
    expect(bandwidth).toBeGreaterThan(0);
    const peak = Math.max(...density);
    const peakAt = grid[density.indexOf(peak)];
    expect(peakAt).toBeCloseTo(0.3, 3);
    // support is tight around the peak: half-max width within ~3 bandwidths
    const above = grid.filter((_, i) => density[i] > peak / 2);
    expect(Math.max(...above) - Math.min(...above)).toBeLessThan(3 * bandwidth);
  });

  it("is symmetric for a symmetric sample", () => {
    const { density } = gaussianKde([-1, 1], 101);
    for (let i = 0; i < 50; i++) {
      expect(density[i]).toBeCloseTo(density[100 - i], 10);
    }
  });

  it("rejects an empty sample", () => {
    expect(() => gaussianKde([])).toThrow(/empty/);
  });
});
