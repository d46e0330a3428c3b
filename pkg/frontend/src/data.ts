/** Loaders for the primary component's files, with field-naming errors. */
import { readFileSync } from "fs";
import Papa from "papaparse";
import { ZodError, type ZodTypeAny, type z } from "zod";
import {
  certificateSchema,
  curveRowSchema,
  fitSchema,
  spectrumSchema,
  type CertificateDoc,
  type Curve,
  type FitDoc,
  type SpectrumDoc,
} from "./schema.js";

export class SchemaError extends Error {}

function describe(error: ZodError, source: string): SchemaError {
  const issue = error.issues[0];
  const field = issue.path.length > 0 ? issue.path.join(".") : "(root)";
  return new SchemaError(`${source}: field '${field}': ${issue.message}`);
}

function parseWith<S extends ZodTypeAny>(schema: S, value: unknown, source: string): z.infer<S> {
  const result = schema.safeParse(value);
  if (!result.success) throw describe(result.error, source);
  return result.data;
}

export function loadCurve(path: string): Curve {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, unknown>>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`${path}: ${parsed.errors[0].message}`);
  }
  const rows = parsed.data.map((row, i) =>
    parseWith(curveRowSchema, row, `${path} row ${i + 1}`),
  );
  if (rows.length === 0) throw new SchemaError(`${path}: no data rows`);
  return { rows, d: rows[0].d, L: rows[0].L };
}

export function loadFit(path: string): FitDoc {
  return parseWith(fitSchema, JSON.parse(readFileSync(path, "utf8")), path);
}

export function loadCertificate(path: string): CertificateDoc {
  return parseWith(certificateSchema, JSON.parse(readFileSync(path, "utf8")), path);
}

export function loadSpectrum(path: string): SpectrumDoc {
  return parseWith(spectrumSchema, JSON.parse(readFileSync(path, "utf8")), path);
}
