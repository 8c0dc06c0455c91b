#!/usr/bin/env node
/** render CLI: figure images from uncontrol CSV output.
 *
 *   render --kind {bound_vs_epsilon,growth_vs_n} --in <csv> --out <image>
 *
 * Exit codes: 0 success, 2 usage error, 1 data or I/O error.
 */

import { readFileSync, writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { DataError } from "./csv.js";
import { FIGURE_KINDS, renderFigure, type FigureKind } from "./figures.js";

class UsageError extends Error {}

export function run(argv: string[]): number {
  let parsed;
  try {
    parsed = yargs(argv)
      .command("render", "render a figure from a CSV file", (cmd) =>
        cmd
          .option("kind", {
            choices: FIGURE_KINDS,
            demandOption: true,
            describe: "which figure to render",
          })
          .option("in", {
            type: "string",
            demandOption: true,
            describe: "input CSV path (from the uncontrol sweep/growth commands)",
          })
          .option("out", {
            type: "string",
            demandOption: true,
            describe: "output SVG path",
          })
      )
      .demandCommand(1, "expected the render command")
      .strict()
      .exitProcess(false)
      .fail((msg, err) => {
        throw err ?? new UsageError(msg ?? "invalid arguments");
      })
      .parseSync();
  } catch (err) {
    if (err instanceof UsageError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 2;
    }
    throw err;
  }

  const kind = parsed.kind as FigureKind;
  const inPath = parsed.in as string;
  const outPath = parsed.out as string;
  if (!outPath.endsWith(".svg")) {
    process.stderr.write("error: output must be an .svg path\n");
    return 2;
  }

  let csvText: string;
  try {
    csvText = readFileSync(inPath, "utf8");
  } catch (err) {
    process.stderr.write(`error: cannot read ${inPath}: ${(err as Error).message}\n`);
    return 1;
  }
  try {
    writeFileSync(outPath, renderFigure(kind, csvText), "utf8");
  } catch (err) {
    if (err instanceof DataError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 1;
    }
    process.stderr.write(`error: cannot write ${outPath}: ${(err as Error).message}\n`);
    return 1;
  }
  return 0;
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("main.js") || entry.endsWith("uncontrol-render")) {
  process.exit(run(hideBin(process.argv)));
}
