/** Axis scales and tick helpers (pure coordinate transforms). */

export interface Scale {
  (value: number): number;
  readonly domain: [number, number];
  readonly range: [number, number];
}

function makeScale(
  transform: (v: number) => number,
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = [transform(domain[0]), transform(domain[1])];
  const span = d1 - d0 || 1;
  const scale = ((value: number) =>
    range[0] + ((transform(value) - d0) / span) * (range[1] - range[0])) as Scale;
  Object.defineProperty(scale, "domain", { value: domain });
  Object.defineProperty(scale, "range", { value: range });
  return scale;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  return makeScale((v) => v, domain, range);
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  if (domain[0] <= 0 || domain[1] <= 0) {
    throw new Error(`log scale needs a positive domain, got [${domain}]`);
  }
  return makeScale(Math.log10, domain, range);
}

/** Powers of ten covering [lo, hi]. */
export function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let k = Math.ceil(Math.log10(lo) - 1e-9); k <= Math.floor(Math.log10(hi) + 1e-9); k++) {
    ticks.push(10 ** k);
  }
  if (ticks.length === 0) ticks.push(lo, hi);
  return ticks;
}

/** A handful of round linear ticks covering [lo, hi]. */
export function linearTicks(lo: number, hi: number, target = 5): number[] {
  const span = hi - lo || 1;
  const step = 10 ** Math.floor(Math.log10(span / target));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= target + 1) ?? 10 * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / chosen) * chosen; v <= hi + 1e-12; v += chosen) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

export function tickLabel(value: number): string {
  if (value === 0) return "0";
  const exponent = Math.log10(Math.abs(value));
  if (Number.isInteger(exponent) && (exponent < -3 || exponent > 4)) {
    return `1e${exponent}`;
  }
  return Number(value.toPrecision(6)).toString();
}
