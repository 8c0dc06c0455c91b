/** Deterministic SVG assembly: no timestamps, fixed precision, fixed layout.
 *
 * Coordinates pass through px() so the output never carries float noise;
 * rendering the same data twice must produce byte-identical markup.
 */

export function px(value: number): string {
  const stripped = value.toFixed(2).replace(/\.?0+$/, "");
  // values rounding to zero can leave "", "-", or "-0" behind
  return stripped === "" || stripped === "-" || stripped === "-0" ? "0" : stripped;
}

export function escapeText(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface LineAttrs {
  stroke: string;
  width?: number;
  dash?: string;
}

export function line(x1: number, y1: number, x2: number, y2: number, attrs: LineAttrs): string {
  const dash = attrs.dash ? ` stroke-dasharray="${attrs.dash}"` : "";
  return (
    `<line x1="${px(x1)}" y1="${px(y1)}" x2="${px(x2)}" y2="${px(y2)}"` +
    ` stroke="${attrs.stroke}" stroke-width="${attrs.width ?? 1}"${dash}/>`
  );
}

export function polylinePath(points: Array<[number, number]>): string {
  return points.map(([x, y], i) => `${i === 0 ? "M" : "L"}${px(x)} ${px(y)}`).join("");
}

export interface TextAttrs {
  size?: number;
  anchor?: "start" | "middle" | "end";
  fill?: string;
  rotate?: { angle: number; cx: number; cy: number };
}

export function text(x: number, y: number, content: string, attrs: TextAttrs = {}): string {
  const anchor = attrs.anchor ?? "start";
  const size = attrs.size ?? 12;
  const fill = attrs.fill ?? "#1a1a1a";
  const transform = attrs.rotate
    ? ` transform="rotate(${attrs.rotate.angle} ${px(attrs.rotate.cx)} ${px(attrs.rotate.cy)})"`
    : "";
  return (
    `<text x="${px(x)}" y="${px(y)}" font-size="${size}" text-anchor="${anchor}"` +
    ` fill="${fill}"${transform}>${escapeText(content)}</text>`
  );
}

export function document(width: number, height: number, body: string[]): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}"` +
    ` viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${width}" height="${height}" fill="#ffffff"/>\n` +
    body.join("\n") +
    "\n</svg>\n"
  );
}
