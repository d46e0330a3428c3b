/**
 * Zod schemas for the primary component's export files.
 * All object schemas are strict: unknown fields are rejected, and validation
 * errors name the offending field.
 */
import { z } from "zod";

export const curveRowSchema = z
  .object({
    E: z.number().positive(),
    n_dirichlet: z.number().min(0),
    stderr_d: z.number().min(0),
    n_neumann: z.number().min(0),
    stderr_n: z.number().min(0),
    realizations: z.number().int().min(1),
    L: z.number().positive(),
    d: z.number().int().min(1),
    M: z.number().int().min(2),
    model: z.string(),
    master_seed: z.number().int(),
  })
  .strict();

export type CurveRow = z.infer<typeof curveRowSchema>;

export interface Curve {
  rows: CurveRow[];
  d: number;
  L: number;
}

export const fitSchema = z
  .object({
    kind: z.enum(["lifshitz", "vanhove"]),
    side: z.enum(["dirichlet", "neumann"]),
    exponent: z.number(),
    window: z.tuple([z.number(), z.number()]),
    residual: z.number().min(0),
    model_preference: z.enum(["exponential", "power"]),
    excluded_points: z.number().int().min(0),
    n_points: z.number().int().min(0),
    timestamp: z.string().optional(),
  })
  .strict();

export type FitDoc = z.infer<typeof fitSchema>;

export const certificateSchema = z
  .object({
    d: z.number().int().min(1),
    L: z.number().positive(),
    E: z.number().positive(),
    n_count: z.number().int().min(0),
    eps1: z.number().min(0),
    eps2: z.number().min(0),
    certified_energy: z.number(),
    certified_count: z.number().int().min(0),
    constants: z.tuple([z.number(), z.number()]).nullable(),
    valid: z.boolean(),
    timestamp: z.string().optional(),
  })
  .strict();

export type CertificateDoc = z.infer<typeof certificateSchema>;

export const spectrumSchema = z
  .object({
    d: z.number().int().min(1),
    L: z.number().positive(),
    M: z.number().int().min(2),
    bc: z.string(),
    dimension: z.number().int().min(0),
    seed: z.number().int(),
    counts: z
      .array(
        z
          .object({
            E: z.number(),
            count: z.number().int().min(0),
            method: z.string(),
          })
          .strict(),
      )
      .optional(),
    eigenvalues: z.array(z.number()).optional(),
    timestamp: z.string().optional(),
  })
  .strict();

export type SpectrumDoc = z.infer<typeof spectrumSchema>;

export const figureKinds = ["ids", "lifshitz", "vanhove", "certificate"] as const;
export type FigureKind = (typeof figureKinds)[number];

export interface FigureSpec {
  kind: FigureKind;
  curvePath?: string;
  fitPath?: string;
  spectrumPath?: string;
  certificatePaths?: string[];
  outputPath: string;
  width: number;
  height: number;
  window?: [number, number];
  title?: string;
}
