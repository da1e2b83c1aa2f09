#!/usr/bin/env node
/**
 * figures <kind> --in <csv...> --out <file.svg>
 *
 * Kinds: subopt_bars | runtime_vs_subopt | risk_curves | order_plot.
 * Rendering is a pure function of the input CSVs (no timestamps), so
 * identical inputs produce identical bytes.
 */

import { writeFileSync } from "node:fs";
import { CHARTS } from "./charts.js";
import { SchemaError } from "./csv.js";

export function run(argv: string[]): number {
  const [kind, ...rest] = argv;
  if (!kind || !(kind in CHARTS)) {
    process.stderr.write(
      `usage: figures <${Object.keys(CHARTS).join("|")}> --in <csv...> --out <file>\n`,
    );
    return 2;
  }
  const inputs: string[] = [];
  let out = "";
  for (let i = 0; i < rest.length; i++) {
    if (rest[i] === "--in") {
      while (i + 1 < rest.length && !rest[i + 1].startsWith("--")) {
        inputs.push(rest[++i]);
      }
    } else if (rest[i] === "--out") {
      out = rest[++i] ?? "";
    } else {
      process.stderr.write(`unknown argument: ${rest[i]}\n`);
      return 2;
    }
  }
  if (inputs.length === 0 || !out) {
    process.stderr.write("need --in <csv...> and --out <file>\n");
    return 2;
  }
  try {
    const svg = CHARTS[kind](inputs);
    writeFileSync(out, svg + "\n");
    process.stdout.write(`wrote ${out}\n`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`schema error: ${err.message}\n`);
      return 1;
    }
    if (err instanceof Error && "code" in err && err.code === "ENOENT") {
      process.stderr.write(`missing input: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("main.js") || entry.endsWith("figures")) {
  process.exit(run(process.argv.slice(2)));
}
