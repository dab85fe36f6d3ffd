#!/usr/bin/env node
/**
 * Render experiment CSVs to SVG figures.
 *
 *   render --kind cdf --in a.csv b.csv --labels n=100 n=350 --out fig.svg
 *
 * Kinds: cdf (epsilon,cdf), kde (sample_index,error),
 * worst_case (n,worst_case_error,typical_median_error),
 * theory_ratio (n,rho,quadrature,asymptotic,ratio).
 *
 * Output is always SVG; a `.meta.txt` sidecar records rendering metadata
 * (for kde plots: the bandwidth of every curve).
 */

import { writeFileSync } from "node:fs";
import { basename } from "node:path";
import * as echarts from "echarts";
import { BUILDERS } from "./charts";
import { readTable, SCHEMAS, SchemaError, Table } from "./csv";

export interface PlotSpec {
  kind: string;
  inputs: string[];
  labels: string[];
  out: string;
  width: number;
  height: number;
}

export function resolveSpec(raw: {
  kind?: string;
  in?: string[];
  labels?: string[];
  out?: string;
  width?: string;
  height?: string;
}): PlotSpec {
  if (!raw.kind || !(raw.kind in BUILDERS)) {
    throw new SchemaError(
      `--kind must be one of ${Object.keys(BUILDERS).join(", ")} (got '${raw.kind ?? ""}')`
    );
  }
  if (!raw.in || raw.in.length === 0) {
    throw new SchemaError("at least one --in CSV is required");
  }
  if (!raw.out) {
    throw new SchemaError("--out is required");
  }
  const labels = raw.labels ?? [];
  if (labels.length > 0 && labels.length !== raw.in.length) {
    throw new SchemaError(
      `--labels count (${labels.length}) must match --in count (${raw.in.length})`
    );
  }
  const filled = raw.in.map((p, i) => labels[i] ?? basename(p).replace(/\.csv$/, ""));
  const out = raw.out.endsWith(".svg") ? raw.out : raw.out.replace(/\.[^./\\]*$/, "") + ".svg";
  return {
    kind: raw.kind,
    inputs: raw.in,
    labels: filled,
    out,
    width: Number(raw.width ?? 800),
    height: Number(raw.height ?? 520),
  };
}

/**
 * Rewrite the renderer's process-global id/class counters (zr3-cls-17,
 * zr3-c0, ...) to a canonical numbering so equal specs yield equal bytes.
 */
export function canonicalizeSvg(svg: string): string {
  const seen = new Map<string, string>();
  const counters = new Map<string, number>();
  return svg.replace(/zr\d+-([a-z]+)-?(\d+)/g, (token, kind: string) => {
    let mapped = seen.get(token);
    if (mapped === undefined) {
      const k = counters.get(kind) ?? 0;
      counters.set(kind, k + 1);
      mapped = kind === "c" ? `zr0-c${k}` : `zr0-${kind}-${k}`;
      seen.set(token, mapped);
    }
    return mapped;
  });
}

export function render(spec: PlotSpec): { out: string; sidecar: string } {
  const tables: Table[] = spec.inputs.map((p) => readTable(p, SCHEMAS[spec.kind]));
  const { option, meta } = BUILDERS[spec.kind](tables, spec.labels);
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width: spec.width,
    height: spec.height,
  });
  chart.setOption(option);
  const svg = canonicalizeSvg(chart.renderToSVGString());
  chart.dispose();
  writeFileSync(spec.out, svg, "utf-8");
  const sidecar = spec.out + ".meta.txt";
  const lines = [
    `kind=${spec.kind}`,
    ...spec.inputs.map((p, i) => `input[${spec.labels[i]}]=${p}`),
    `width=${spec.width}`,
    `height=${spec.height}`,
    ...meta,
  ];
  writeFileSync(sidecar, lines.join("\n") + "\n", "utf-8");
  return { out: spec.out, sidecar };
}

const MULTI_FLAGS = new Set(["in", "labels"]);
const SINGLE_FLAGS = new Set(["kind", "out", "width", "height"]);

/** Greedy flag parser: `--in a.csv b.csv` collects values until the next flag. */
export function parseCli(argv: string[]): Record<string, string | string[]> {
  const out: Record<string, string | string[]> = {};
  let i = 0;
  while (i < argv.length) {
    const tok = argv[i];
    if (!tok.startsWith("--")) {
      throw new SchemaError(`unexpected positional argument '${tok}'`);
    }
    const eq = tok.indexOf("=");
    const name = eq >= 0 ? tok.slice(2, eq) : tok.slice(2);
    if (!MULTI_FLAGS.has(name) && !SINGLE_FLAGS.has(name)) {
      throw new SchemaError(`unknown flag '--${name}'`);
    }
    const values: string[] = eq >= 0 ? [tok.slice(eq + 1)] : [];
    i += 1;
    while (eq < 0 && i < argv.length && !argv[i].startsWith("--")) {
      values.push(argv[i]);
      i += 1;
    }
    if (values.length === 0) {
      throw new SchemaError(`flag '--${name}' needs a value`);
    }
    if (MULTI_FLAGS.has(name)) {
      out[name] = [...((out[name] as string[]) ?? []), ...values];
    } else {
      if (values.length > 1) {
        throw new SchemaError(`flag '--${name}' takes a single value`);
      }
      out[name] = values[0];
    }
  }
  return out;
}

export function main(argv: string[]): number {
  try {
    const parsed = parseCli(argv);
    const spec = resolveSpec(parsed as Parameters<typeof resolveSpec>[0]);
    const { out, sidecar } = render(spec);
    console.log(`wrote ${out} and ${sidecar}`);
    return 0;
  } catch (e) {
    if (e instanceof SchemaError) {
      console.error(`argument or schema error: ${e.message}`);
      return 2;
    }
    console.error(`error: ${(e as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
