#!/usr/bin/env node
/** CLI: one figure per invocation, kind + input files + output path. */
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { SchemaError } from "./data.js";
import { EmptyDataError } from "./figures.js";
import { writeFigure } from "./render.js";
import { figureKinds, type FigureKind, type FigureSpec } from "./schema.js";

export async function run(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .usage("$0 --kind <ids|lifshitz|vanhove|certificate> [inputs] --out <file.svg|file.png>")
    .option("kind", { choices: figureKinds as unknown as FigureKind[], demandOption: true })
    .option("curve", { type: "string", describe: "curve CSV (ids, lifshitz, vanhove)" })
    .option("fit", { type: "string", describe: "fit JSON (lifshitz, vanhove)" })
    .option("spectrum", { type: "string", describe: "spectrum JSON (certificate)" })
    .option("certificate", {
      type: "string", array: true, describe: "certificate JSON, repeatable (certificate)",
    })
    .option("out", { type: "string", demandOption: true })
    .option("width", { type: "number", default: 640 })
    .option("height", { type: "number", default: 420 })
    .option("window", {
      type: "number", array: true, nargs: 2, describe: "energy window lo hi",
    })
    .option("title", { type: "string" })
    .strict()
    .fail((message) => {
      throw new Error(message);
    })
    .parse();

  const spec: FigureSpec = {
    kind: args.kind,
    curvePath: args.curve,
    fitPath: args.fit,
    spectrumPath: args.spectrum,
    certificatePaths: args.certificate,
    outputPath: args.out,
    width: args.width,
    height: args.height,
    window: args.window ? [args.window[0], args.window[1]] : undefined,
    title: args.title,
  };
  await writeFigure(spec);
  console.log(`wrote ${spec.outputPath}`);
  return 0;
}

const isMain = process.argv[1]?.endsWith("cli.js") || process.argv[1]?.endsWith("perfospec-figures");
if (isMain) {
  run(hideBin(process.argv))
    .then((code) => process.exit(code))
    .catch((error: Error) => {
      const prefix = error instanceof SchemaError ? "schema error"
        : error instanceof EmptyDataError ? "empty data" : "error";
      console.error(`${prefix}: ${error.message}`);
      process.exit(1);
    });
}
