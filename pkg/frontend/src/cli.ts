#!/usr/bin/env node
/**
 * render --kind <spectra|scatter|grid> --in <csv> --out <svg>
 *
 * Thin shell around the renderers: one CSV in, one SVG out, stage-
 * tagged error line and exit code 1 on any failure.
 */

import * as fs from "node:fs";
import { readCsv, Row } from "./csv";
import { renderImageGrid } from "./grid";
import { renderScatter } from "./scatter";
import { renderSpectra } from "./spectra";
import { RenderResult } from "./types";

const RENDERERS: Record<string, (rows: Row[]) => RenderResult> = {
  spectra: renderSpectra,
  scatter: renderScatter,
  grid: renderImageGrid,
};

interface Args {
  kind: string;
  input: string;
  output: string;
}

function parseArgs(argv: string[]): Args {
  const values: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`flag ${flag} needs a value`);
    }
    values[flag] = value;
  }
  for (const flag of ["--kind", "--in", "--out"]) {
    if (!(flag in values)) throw new Error(`missing required flag ${flag}`);
  }
  if (!(values["--kind"] in RENDERERS)) {
    throw new Error(
      `unknown kind ${values["--kind"]}; expected one of ` +
      Object.keys(RENDERERS).join(", ")
    );
  }
  return { kind: values["--kind"], input: values["--in"], output: values["--out"] };
}

export function runCli(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    const rows = readCsv(args.input);
    const result = RENDERERS[args.kind](rows);
    fs.writeFileSync(args.output, result.svg);
    const census = result.series
      .map((s) => `${s.name}(${s.length})`)
      .join(", ");
    console.log(`wrote ${args.output}: ${census}`);
    return 0;
  } catch (error) {
    const message = error instanceof Error ? error.message : String(error);
    console.error(`error[render]: ${message}`);
    return 1;
  }
}

// direct-execution guard that stays inert when imported, including from
// ESM test runners where require is not defined
if (typeof require !== "undefined" && require.main === module) {
  process.exit(runCli(process.argv.slice(2)));
}
