/** DOM painting: grid cells, score panel, status line, countdown. */

import type { CellView } from "./grid.js";
import type { Frame } from "./protocol.js";
import type { ClientStore } from "./state.js";

export function renderGrid(container: HTMLElement, cells: CellView[][]): void {
  container.textContent = "";
  for (const row of cells) {
    const rowEl = document.createElement("div");
    rowEl.className = "grid-row";
    for (const cell of row) {
      const el = document.createElement("span");
      el.className = `cell kind-${cell.kind}${cell.actor ? " actor" : ""}`;
      el.textContent = cell.glyph;
      el.style.color = cell.color;
      rowEl.appendChild(el);
    }
    container.appendChild(rowEl);
  }
}

export function renderScores(container: HTMLElement, frame: Frame | null): void {
  container.textContent = "";
  if (!frame) return;
  for (const [agentId, score] of frame.s) {
    const row = document.createElement("div");
    row.className = "score-row";
    const reward = frame.r.find(([id]) => id === agentId)?.[1] ?? 0;
    const action = frame.act.find(([id]) => id === agentId)?.[1] ?? "-";
    row.textContent =
      `agent ${agentId}: ${score.toFixed(1)}  (last: ${action}, ${reward >= 0 ? "+" : ""}${reward.toFixed(1)})`;
    container.appendChild(row);
  }
}

export function renderStatus(container: HTMLElement, store: ClientStore): void {
  const bits: string[] = [];
  if (store.mode === "live") {
    bits.push(`connection: ${store.connection}`);
    if (store.controlledAgent !== null) bits.push(`you are agent ${store.controlledAgent}`);
    if (store.runEnded) bits.push("run finished");
    const remaining = store.msRemaining();
    if (store.awaitActive && remaining !== null) {
      bits.push(`your move! ${(remaining / 1000).toFixed(1)}s`);
    }
  } else if (store.frames.length) {
    const frame = store.currentFrame;
    bits.push(`frame ${store.frameIndex + 1}/${store.frames.length}`);
    if (frame) bits.push(`epoch ${frame.e} turn ${frame.t}`);
  }
  if (store.lastError) bits.push(`error: ${store.lastError}`);
  container.textContent = bits.join("  ·  ");
}
