/** Figure-spec dispatch and file output (SVG natively, PNG via sharp). */
import { writeFileSync } from "fs";
import { extname } from "path";
import { loadCertificate, loadCurve, loadFit, loadSpectrum } from "./data.js";
import {
  renderCertificate,
  renderIds,
  renderLifshitz,
  renderVanhove,
  type FigureOptions,
} from "./figures.js";
import type { FigureSpec } from "./schema.js";

export function renderFigure(spec: FigureSpec): string {
  const options: FigureOptions = {
    width: spec.width,
    height: spec.height,
    window: spec.window,
    title: spec.title,
  };
  switch (spec.kind) {
    case "ids": {
      if (!spec.curvePath) throw new Error("ids figure needs --curve");
      return renderIds(loadCurve(spec.curvePath), options);
    }
    case "lifshitz": {
      if (!spec.curvePath || !spec.fitPath) {
        throw new Error("lifshitz figure needs --curve and --fit");
      }
      return renderLifshitz(loadCurve(spec.curvePath), loadFit(spec.fitPath), options);
    }
    case "vanhove": {
      if (!spec.curvePath || !spec.fitPath) {
        throw new Error("vanhove figure needs --curve and --fit");
      }
      return renderVanhove(loadCurve(spec.curvePath), loadFit(spec.fitPath), options);
    }
    case "certificate": {
      if (!spec.spectrumPath || !spec.certificatePaths?.length) {
        throw new Error("certificate figure needs --spectrum and --certificate");
      }
      return renderCertificate(
        loadSpectrum(spec.spectrumPath),
        spec.certificatePaths.map(loadCertificate),
        options,
      );
    }
  }
}

export async function writeFigure(spec: FigureSpec): Promise<void> {
  const body = renderFigure(spec);
  const extension = extname(spec.outputPath).toLowerCase();
  if (extension === ".svg") {
    writeFileSync(spec.outputPath, body);
    return;
  }
  if (extension === ".png") {
    let sharp: typeof import("sharp");
    try {
      sharp = (await import("sharp")).default;
    } catch (error) {
      throw new Error(
        `png output needs the optional 'sharp' rasterizer (${(error as Error).message}); ` +
        "write .svg instead",
      );
    }
    const buffer = await sharp(Buffer.from(body), { density: 144 }).png().toBuffer();
    writeFileSync(spec.outputPath, buffer);
    return;
  }
  throw new Error(`unsupported output extension '${extension}'; use .svg or .png`);
}
