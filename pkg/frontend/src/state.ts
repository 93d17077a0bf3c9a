/** The single client state store; network and input events both reduce
 * through here, and the view re-renders on change. */

import { GridModel } from "./grid.js";
import type { Frame, ReplayHeader, ServerMessage } from "./protocol.js";

export type Mode = "live" | "replay";
export type ConnectionStatus = "idle" | "connecting" | "open" | "retrying" | "closed";

/** key -> action name; defaults: arrows move, space cleans, period noops. */
export type KeyBindings = Record<string, string>;

export const DEFAULT_BINDINGS: KeyBindings = {
  ArrowUp: "up",
  ArrowDown: "down",
  ArrowLeft: "left",
  ArrowRight: "right",
  " ": "clean",
  ".": "noop",
};

export interface AwaitWindow {
  agentId: number;
  deadlineMs: number;
  armedAt: number; // epoch ms when the window opened
  actionSent: boolean;
}

export class ClientStore {
  mode: Mode = "replay";
  header: ReplayHeader | null = null;
  grid: GridModel | null = null;

  // live mode
  connection: ConnectionStatus = "idle";
  controlledAgent: number | null = null;
  liveFrame: Frame | null = null;
  awaitWindow: AwaitWindow | null = null;
  runEnded = false;
  lastError: string | null = null;
  lastFrameKey: [number, number] | null = null;
  frameGapDetected = false;

  // replay mode
  frames: Frame[] = [];
  frameIndex = 0;
  playing = false;
  fps = 4;

  bindings: KeyBindings = { ...DEFAULT_BINDINGS };

  private listeners: (() => void)[] = [];

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  protected changed(): void {
    for (const listener of this.listeners) listener();
  }

  get currentFrame(): Frame | null {
    if (this.mode === "live") return this.liveFrame;
    return this.frames[this.frameIndex] ?? null;
  }

  get awaitActive(): boolean {
    return (
      this.awaitWindow !== null &&
      !this.awaitWindow.actionSent &&
      this.awaitWindow.agentId === this.controlledAgent
    );
  }

  // -- live reducers ---------------------------------------------------------

  applyServer(msg: ServerMessage, now = Date.now()): void {
    switch (msg.type) {
      case "joined":
        this.header = msg.header;
        this.grid = new GridModel(msg.header);
        this.controlledAgent = msg.agent_id;
        this.lastError = null;
        break;
      case "frame": {
        const key: [number, number] = [msg.frame.e, msg.frame.t];
        if (this.lastFrameKey) {
          const [pe, pt] = this.lastFrameKey;
          const inOrder = key[0] > pe || (key[0] === pe && key[1] === pt + 1) ||
            (key[0] === pe + 1 && key[1] === 0);
          if (!inOrder) this.frameGapDetected = true;
        }
        this.lastFrameKey = key;
        this.liveFrame = msg.frame;
        // a frame closes the previous turn's window
        this.awaitWindow = null;
        break;
      }
      case "await_action":
        this.awaitWindow = {
          agentId: msg.agent_id,
          deadlineMs: msg.deadline_ms,
          armedAt: now,
          actionSent: false,
        };
        break;
      case "epoch_end":
        break;
      case "run_end":
        this.runEnded = true;
        this.awaitWindow = null;
        break;
      case "pong":
        break;
      case "error":
        this.lastError = msg.message;
        break;
    }
    this.changed();
  }

  setConnection(status: ConnectionStatus): void {
    this.connection = status;
    if (status !== "open") this.awaitWindow = null;
    this.changed();
  }

  /** Mark the open window consumed; true if an action may be sent now.
   * Exactly one action per await window, regardless of key repeat. */
  consumeAwaitWindow(): boolean {
    if (!this.awaitActive) return false;
    this.awaitWindow!.actionSent = true;
    this.changed();
    return true;
  }

  msRemaining(now = Date.now()): number | null {
    if (!this.awaitWindow) return null;
    const elapsed = now - this.awaitWindow.armedAt;
    return Math.max(0, this.awaitWindow.deadlineMs - elapsed);
  }

  // -- replay reducers -------------------------------------------------------

  loadReplay(header: ReplayHeader, frames: Frame[]): void {
    this.mode = "replay";
    this.header = header;
    this.grid = new GridModel(header);
    this.frames = frames;
    this.frameIndex = 0;
    this.playing = false;
    this.lastError = null;
    this.changed();
  }

  seek(index: number): void {
    if (!this.frames.length) return;
    this.frameIndex = Math.min(Math.max(0, index), this.frames.length - 1);
    this.changed();
  }

  step(delta: number): void {
    this.seek(this.frameIndex + delta);
  }

  get canStepBack(): boolean {
    return this.frameIndex > 0;
  }

  get canStepForward(): boolean {
    return this.frameIndex < this.frames.length - 1;
  }

  setPlaying(playing: boolean): void {
    this.playing = playing && this.frames.length > 0;
    this.changed();
  }

  /** One playback tick: advance a frame; stop at the end. */
  tick(): void {
    if (!this.playing) return;
    if (this.canStepForward) {
      this.frameIndex += 1;
    } else {
      this.playing = false;
    }
    this.changed();
  }

  rebind(key: string, action: string): void {
    for (const existing of Object.keys(this.bindings)) {
      if (this.bindings[existing] === action) delete this.bindings[existing];
    }
    this.bindings[key] = action;
    this.changed();
  }
}
