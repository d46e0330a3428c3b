/** Minimal deterministic SVG assembly: plain string building, fixed precision. */

export type Attrs = Record<string, string | number>;

export function fmt(value: number): string {
  if (!Number.isFinite(value)) throw new Error(`non-finite coordinate ${value}`);
  return Number(value.toFixed(3)).toString();
}

export function el(tag: string, attrs: Attrs, children: string[] = []): string {
  const parts = Object.entries(attrs)
    .map(([key, value]) => `${key}="${typeof value === "number" ? fmt(value) : value}"`)
    .join(" ");
  const open = parts.length > 0 ? `<${tag} ${parts}` : `<${tag}`;
  if (children.length === 0) return `${open}/>`;
  return `${open}>${children.join("")}</${tag}>`;
}

export function text(content: string, attrs: Attrs): string {
  return el("text", { "font-family": "sans-serif", ...attrs }, [escapeText(content)]);
}

export function escapeText(value: string): string {
  return value.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function document(width: number, height: number, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    el("rect", { x: 0, y: 0, width, height, fill: "white" }),
    ...body,
    "</svg>",
  ].join("\n");
}

export function polylinePoints(coords: Array<[number, number]>): string {
  return coords.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
}
