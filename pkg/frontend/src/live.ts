/** Live session connection with automatic retry and backoff. */

import { joinMessage } from "./protocol.js";
import type { ServerMessage } from "./protocol.js";
import type { ClientStore } from "./state.js";

export interface LiveOptions {
  role: "human" | "spectator";
  agentId?: number;
  /** injectable for tests */
  webSocketFactory?: (url: string) => WebSocket;
  /** backoff schedule in ms; the last entry repeats */
  backoff?: number[];
}

const DEFAULT_BACKOFF = [500, 1000, 2000, 4000, 8000];

export class LiveConnection {
  private ws: WebSocket | null = null;
  private attempts = 0;
  private closedByUser = false;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly url: string,
    private readonly store: ClientStore,
    private readonly options: LiveOptions,
  ) {}

  connect(): void {
    this.closedByUser = false;
    this.open();
  }

  private open(): void {
    this.store.setConnection(this.attempts ? "retrying" : "connecting");
    const factory = this.options.webSocketFactory ?? ((u: string) => new WebSocket(u));
    const ws = factory(this.url);
    this.ws = ws;

    ws.onopen = () => {
      this.attempts = 0;
      this.store.setConnection("open");
      this.send(joinMessage(this.options.role, this.options.agentId));
    };
    ws.onmessage = (event: MessageEvent) => {
      let msg: ServerMessage;
      try {
        msg = JSON.parse(String(event.data));
      } catch {
        return;
      }
      this.store.applyServer(msg);
    };
    ws.onclose = () => {
      if (this.closedByUser || this.store.runEnded) {
        this.store.setConnection("closed");
        return;
      }
      this.scheduleRetry();
    };
    ws.onerror = () => {
      // close handler decides about retrying
    };
  }

  private scheduleRetry(): void {
    const schedule = this.options.backoff ?? DEFAULT_BACKOFF;
    const delay = schedule[Math.min(this.attempts, schedule.length - 1)];
    this.attempts += 1;
    this.store.setConnection("retrying");
    this.retryTimer = setTimeout(() => this.open(), delay);
  }

  send(msg: object): void {
    if (this.ws && this.ws.readyState === 1) {
      this.ws.send(JSON.stringify(msg));
    }
  }

  close(): void {
    this.closedByUser = true;
    if (this.retryTimer) clearTimeout(this.retryTimer);
    this.ws?.close();
  }
}
