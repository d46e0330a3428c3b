import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";
import { SchemaError, loadCertificate, loadCurve, loadFit, loadSpectrum } from "../src/data.js";

const FIXTURES = join(__dirname, "fixtures");

function scratch(name: string, content: string): string {
  const dir = mkdtempSync(join(tmpdir(), "figtest-"));
  const path = join(dir, name);
  writeFileSync(path, content);
  return path;
}

describe("curve CSV", () => {
  it("parses the fixture and exposes box metadata", () => {
    const curve = loadCurve(join(FIXTURES, "curve.csv"));
    expect(curve.rows.length).toBe(24);
    expect(curve.d).toBe(1);
    expect(curve.L).toBe(32);
    for (const row of curve.rows) {
      expect(row.n_dirichlet).toBeLessThanOrEqual(row.n_neumann + 1e-15);
    }
  });

  it("rejects an unknown column, naming it", () => {
    const text = readFileSync(join(FIXTURES, "curve.csv"), "utf8");
    const lines = text.trim().split("\n");
    const patched = [lines[0] + ",bogus", ...lines.slice(1).map((l) => l + ",1")].join("\n");
    expect(() => loadCurve(scratch("curve.csv", patched))).toThrowError(/bogus/);
  });

  it("rejects a missing column, naming it", () => {
    const text = readFileSync(join(FIXTURES, "curve.csv"), "utf8");
    const rows = text.trim().split("\n");
    const cells = rows.map((r) => r.split(","));
    const dropped = cells.map((r) => r.slice(0, 3).join(",")).join("\n");
    expect(() => loadCurve(scratch("curve.csv", dropped))).toThrowError(SchemaError);
  });
});

describe("JSON documents", () => {
  it("parses fit, certificate, spectrum fixtures", () => {
    const fit = loadFit(join(FIXTURES, "fit_lifshitz.json"));
    expect(fit.kind).toBe("lifshitz");
    expect(fit.model_preference).toBe("exponential");
    const cert = loadCertificate(join(FIXTURES, "certificate_0.json"));
    expect(cert.valid).toBe(true);
    expect(cert.certified_energy).toBeGreaterThanOrEqual(cert.E);
    const spectrum = loadSpectrum(join(FIXTURES, "spectrum_nd.json"));
    expect(spectrum.bc).toBe("ND");
    expect(spectrum.counts?.length).toBeGreaterThan(0);
  });

  it("rejects unknown fields in fit JSON, naming them", () => {
    const doc = JSON.parse(readFileSync(join(FIXTURES, "fit_lifshitz.json"), "utf8"));
    doc.surprise = 1;
    expect(() => loadFit(scratch("fit.json", JSON.stringify(doc))))
      .toThrowError(/surprise/);
  });

  it("rejects wrong types, naming the field", () => {
    const doc = JSON.parse(readFileSync(join(FIXTURES, "certificate_0.json"), "utf8"));
    doc.eps1 = "big";
    expect(() => loadCertificate(scratch("cert.json", JSON.stringify(doc))))
      .toThrowError(/eps1/);
  });
});
