/** Linear scales and tick generation for the fixed-layout figures. */

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0;
  const fn = ((value: number) =>
    span === 0 ? (r0 + r1) / 2 : r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.range = range;
  return fn;
}

// steps of 1, 2, 2.5, or 5 times a power of ten
export function niceStep(span: number, targetCount: number): number {
  const rough = span / Math.max(1, targetCount);
  const power = Math.pow(10, Math.floor(Math.log10(rough)));
  for (const m of [1, 2, 2.5, 5, 10]) {
    if (m * power >= rough) return m * power;
  }
  return 10 * power;
}

export function ticks(lo: number, hi: number, targetCount = 6): number[] {
  if (!(hi > lo)) return [lo];
  const step = niceStep(hi - lo, targetCount);
  const first = Math.ceil(lo / step - 1e-9) * step;
  const out: number[] = [];
  for (let v = first; v <= hi + 1e-9 * step; v += step) {
    // snap to the tick grid to keep labels free of float noise
    out.push(Number((Math.round(v / step) * step).toPrecision(12)));
  }
  return out;
}
