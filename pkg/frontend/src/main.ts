/** App wiring: live play and replay viewing against one state store. */

import { InputController } from "./input.js";
import { LiveConnection } from "./live.js";
import { parseReplay, ReplayParseError } from "./replay.js";
import { renderGrid, renderScores, renderStatus } from "./render_dom.js";
import { ClientStore } from "./state.js";

const $ = (id: string) => document.getElementById(id) as HTMLElement;

const store = new ClientStore();
let connection: LiveConnection | null = null;
let playTimer: ReturnType<typeof setInterval> | null = null;

function rerender(): void {
  const gridEl = $("grid");
  const frame = store.currentFrame;
  if (store.grid && frame) {
    renderGrid(gridEl, store.grid.classifyFrame(frame));
  }
  renderScores($("scores"), frame);
  renderStatus($("status"), store);

  const scrub = $("scrub") as HTMLInputElement;
  scrub.max = String(Math.max(0, store.frames.length - 1));
  scrub.value = String(store.frameIndex);
  ($("btn-play") as HTMLButtonElement).textContent = store.playing ? "pause" : "play";
  ($("btn-back") as HTMLButtonElement).disabled = !store.canStepBack;
  ($("btn-fwd") as HTMLButtonElement).disabled = !store.canStepForward;

  $("replay-controls").style.display = store.mode === "replay" ? "" : "none";
  $("live-controls").style.display = store.mode === "live" ? "" : "none";
}

function showBanner(message: string | null): void {
  const banner = $("banner");
  banner.textContent = message ?? "";
  banner.style.display = message ? "" : "none";
}

function startPlayback(): void {
  stopPlayback();
  playTimer = setInterval(() => store.tick(), 1000 / store.fps);
}

function stopPlayback(): void {
  if (playTimer) clearInterval(playTimer);
  playTimer = null;
}

function wireReplayControls(): void {
  ($("replay-file") as HTMLInputElement).addEventListener("change", async (e) => {
    const input = e.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    try {
      const { header, frames } = parseReplay(await file.text());
      showBanner(null);
      store.loadReplay(header, frames);
    } catch (err) {
      if (err instanceof ReplayParseError) {
        showBanner(`could not load replay — ${err.message}`);
      } else {
        showBanner(`could not load replay — ${(err as Error).message}`);
      }
    }
  });
  $("btn-play").addEventListener("click", () => {
    store.setPlaying(!store.playing);
    if (store.playing) startPlayback();
    else stopPlayback();
  });
  $("btn-back").addEventListener("click", () => store.step(-1));
  $("btn-fwd").addEventListener("click", () => store.step(1));
  ($("scrub") as HTMLInputElement).addEventListener("input", (e) => {
    store.seek(Number((e.target as HTMLInputElement).value));
  });
  ($("fps") as HTMLSelectElement).addEventListener("change", (e) => {
    store.fps = Number((e.target as HTMLSelectElement).value);
    if (store.playing) startPlayback();
  });
  $("btn-load-server").addEventListener("click", async () => {
    try {
      const reply = await fetch("/replay");
      if (!reply.ok) {
        showBanner(`server replay not available (HTTP ${reply.status})`);
        return;
      }
      const { header, frames } = parseReplay(await reply.text());
      showBanner(null);
      store.loadReplay(header, frames);
    } catch (err) {
      showBanner(`could not fetch replay — ${(err as Error).message}`);
    }
  });
}

function wireLiveControls(): void {
  $("btn-connect").addEventListener("click", () => {
    connection?.close();
    store.mode = "live";
    store.runEnded = false;
    const agentId = Number(($("agent-id") as HTMLInputElement).value || "0");
    const role = ($("role") as HTMLSelectElement).value as "human" | "spectator";
    const proto = location.protocol === "https:" ? "wss" : "ws";
    connection = new LiveConnection(`${proto}://${location.host}/session`, store, {
      role,
      agentId,
    });
    connection.connect();
    const input = new InputController(store, (msg) => connection?.send(msg));
    input.attach(window);
    rerender();
  });
}

function wireSettings(): void {
  const panel = $("settings");
  $("btn-settings").addEventListener("click", () => {
    panel.style.display = panel.style.display === "none" ? "" : "none";
    renderBindings();
  });

  function renderBindings(): void {
    const list = $("bindings");
    list.textContent = "";
    for (const [key, action] of Object.entries(store.bindings)) {
      const row = document.createElement("div");
      row.className = "binding-row";
      const label = document.createElement("span");
      label.textContent = `${action}: `;
      const button = document.createElement("button");
      button.textContent = key === " " ? "space" : key;
      button.addEventListener("click", () => {
        button.textContent = "press a key…";
        const once = (e: KeyboardEvent) => {
          e.preventDefault();
          store.rebind(e.key, action);
          window.removeEventListener("keydown", once, true);
          renderBindings();
        };
        window.addEventListener("keydown", once, true);
      });
      row.append(label, button);
      list.appendChild(row);
    }
  }
}

function wireTabs(): void {
  $("tab-live").addEventListener("click", () => {
    store.mode = "live";
    rerender();
  });
  $("tab-replay").addEventListener("click", () => {
    store.mode = "replay";
    rerender();
  });
}

export function start(): void {
  store.subscribe(rerender);
  wireTabs();
  wireReplayControls();
  wireLiveControls();
  wireSettings();
  setInterval(() => {
    if (store.mode === "live" && store.awaitActive) renderStatus($("status"), store);
  }, 100);
  rerender();
}

start();
