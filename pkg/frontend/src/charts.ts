/** echarts option builders for each plot kind. */

import type { EChartsOption, SeriesOption } from "echarts";
import { Table } from "./csv";
import { gaussianKde, KdeResult } from "./kde";

export interface BuiltChart {
  option: EChartsOption;
  /** sidecar metadata lines recorded next to the image */
  meta: string[];
}

const PALETTE = ["#2155a3", "#c03d4c", "#3d8a50", "#8a5fb5", "#b8762c", "#4a9aa8"];

function baseOption(title: string, xName: string, yName: string): EChartsOption {
  return {
    animation: false,
    backgroundColor: "#ffffff",
    color: PALETTE,
    title: { text: title, left: "center", textStyle: { fontSize: 14 } },
    legend: { bottom: 0, type: "plain" },
    grid: { left: 60, right: 25, top: 40, bottom: 60 },
    xAxis: { type: "value", name: xName, nameLocation: "middle", nameGap: 28 },
    yAxis: { type: "value", name: yName, nameLocation: "middle", nameGap: 42 },
    series: [],
  };
}

function line(name: string, points: [number, number][]): SeriesOption {
  return { type: "line", name, data: points, showSymbol: false, lineStyle: { width: 2 } };
}

export function buildCdfChart(tables: Table[], labels: string[]): BuiltChart {
  const option = baseOption("test-error distribution", "error", "fraction of classifiers");
  let epsMax = 0;
  option.series = tables.map((t, i) => {
    const pts = t.data.epsilon.map((e, k) => [e, t.data.cdf[k]] as [number, number]);
    epsMax = Math.max(epsMax, ...t.data.epsilon);
    return line(labels[i], pts);
  });
  option.xAxis = { ...(option.xAxis as object), min: 0, max: Math.min(epsMax, 1) };
  option.yAxis = { ...(option.yAxis as object), min: 0, max: 1 };
  return { option, meta: [`epsilon_max=${Math.min(epsMax, 1)}`] };
}

export function buildKdeChart(tables: Table[], labels: string[]): BuiltChart {
  const option = baseOption("test-error density", "error", "density");
  const meta: string[] = ["kde_rule=scott"];
  const results: KdeResult[] = tables.map((t) => gaussianKde(t.data.error));
  option.series = results.map((r, i) => {
    meta.push(`bandwidth[${labels[i]}]=${r.bandwidth}`);
    const pts = r.grid.map((x, k) => [x, r.density[k]] as [number, number]);
    return { ...line(labels[i], pts), areaStyle: { opacity: 0.15 } };
  });
  return { option, meta };
}

export function buildWorstCaseChart(tables: Table[], labels: string[]): BuiltChart {
  const option = baseOption("worst-case vs typical interpolators", "training points", "test error");
  const series: SeriesOption[] = [];
  tables.forEach((t, i) => {
    const worst = t.data.n.map((n, k) => [n, t.data.worst_case_error[k]] as [number, number]);
    const typical = t.data.n.map(
      (n, k) => [n, t.data.typical_median_error[k]] as [number, number]
    );
    const tag = tables.length > 1 ? ` (${labels[i]})` : "";
    series.push({ ...line(`worst case${tag}`, worst), showSymbol: true });
    series.push({
      ...line(`typical median${tag}`, typical),
      showSymbol: true,
      lineStyle: { width: 2, type: "dashed" },
    });
  });
  option.series = series;
  option.yAxis = { ...(option.yAxis as object), min: 0, max: 1 };
  return { option, meta: [] };
}

export function buildTheoryRatioChart(tables: Table[], labels: string[]): BuiltChart {
  const option = baseOption(
    "orthant probability: asymptotic over quadrature",
    "training points",
    "ratio"
  );
  option.xAxis = { type: "log", name: "training points", nameLocation: "middle", nameGap: 28 };
  const series: SeriesOption[] = [];
  tables.forEach((t, i) => {
    // one curve per correlation level in the table
    const byRho = new Map<number, [number, number][]>();
    t.data.n.forEach((n, k) => {
      const rho = t.data.rho[k];
      if (!byRho.has(rho)) byRho.set(rho, []);
      byRho.get(rho)!.push([n, t.data.ratio[k]]);
    });
    const tag = tables.length > 1 ? `${labels[i]} ` : "";
    for (const [rho, pts] of [...byRho.entries()].sort((a, b) => a[0] - b[0])) {
      pts.sort((a, b) => a[0] - b[0]);
      series.push({ ...line(`${tag}rho=${rho}`, pts), showSymbol: true });
    }
  });
  option.series = series;
  return { option, meta: [] };
}

export const BUILDERS: Record<
  string,
  (tables: Table[], labels: string[]) => BuiltChart
> = {
  cdf: buildCdfChart,
  kde: buildKdeChart,
  worst_case: buildWorstCaseChart,
  theory_ratio: buildTheoryRatioChart,
};
