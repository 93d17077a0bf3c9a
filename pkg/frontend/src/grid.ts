/** Cell classification: what to draw for each grid cell.
 *
 * Every cell's glyph and color are a pure function of (ground code,
 * actor presence) as defined by the header vocabulary, so new
 * environments render with zero UI changes.
 */

import type { Frame, ReplayHeader, VocabEntry } from "./protocol.js";

export interface CellView {
  glyph: string;
  color: string;
  kind: string; // vocabulary kind name, doubles as a CSS hook
  actor: boolean;
}

/** Colors for kind names the shipped environments use; anything unknown
 * falls back to a hue hashed from the name (still a pure function). */
const PALETTE: Record<string, string> = {
  empty: "#2b2b2b",
  wall: "#7d7d7d",
  gem: "#54d1e8",
  river: "#2f6fd6",
  dirt: "#7a5c2e",
  orchard: "#3c5d33",
  apple: "#d64040",
  agent: "#f2c14e",
};

export function colorFor(name: string): string {
  const fixed = PALETTE[name];
  if (fixed) return fixed;
  let hash = 0;
  for (let i = 0; i < name.length; i++) {
    hash = (hash * 31 + name.charCodeAt(i)) | 0;
  }
  const hue = ((hash % 360) + 360) % 360;
  return `hsl(${hue}, 55%, 55%)`;
}

export class GridModel {
  private readonly byCode = new Map<number, VocabEntry>();
  private readonly agentEntry: VocabEntry;

  constructor(readonly header: ReplayHeader) {
    for (const entry of header.vocab) this.byCode.set(entry.c, entry);
    const agent = header.vocab.find((entry) => entry.n === "agent");
    if (!agent) throw new Error("vocabulary has no 'agent' kind to draw actors with");
    this.agentEntry = agent;
  }

  classifyCell(groundCode: number, actorPresent: boolean): CellView {
    if (actorPresent) {
      return {
        glyph: this.agentEntry.g,
        color: colorFor(this.agentEntry.n),
        kind: this.agentEntry.n,
        actor: true,
      };
    }
    const entry = this.byCode.get(groundCode);
    if (!entry) throw new Error(`ground code ${groundCode} absent from header vocabulary`);
    return { glyph: entry.g, color: colorFor(entry.n), kind: entry.n, actor: false };
  }

  /** Full frame classification, row-major [row][col]. */
  classifyFrame(frame: Frame): CellView[][] {
    const { h, w } = this.header;
    const actorAt = new Set<number>();
    for (const [, row, col] of frame.a) actorAt.add(row * w + col);
    const rows: CellView[][] = [];
    for (let r = 0; r < h; r++) {
      const cells: CellView[] = [];
      for (let c = 0; c < w; c++) {
        const i = r * w + c;
        cells.push(this.classifyCell(frame.g[i], actorAt.has(i)));
      }
      rows.push(cells);
    }
    return rows;
  }

  /** Glyph rows, matching the engine's text rendering of the same frame. */
  asciiRender(frame: Frame): string[] {
    return this.classifyFrame(frame).map((row) => row.map((c) => c.glyph).join(""));
  }
}
