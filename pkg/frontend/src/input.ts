/** Keyboard capture for live play.
 *
 * Keys only do anything while an await window is open for the controlled
 * agent, and each window accepts exactly one action no matter how many
 * keydown events (or auto-repeats) arrive.
 */

import { actionMessage } from "./protocol.js";
import type { ClientStore } from "./state.js";

export class InputController {
  constructor(
    private readonly store: ClientStore,
    private readonly send: (msg: object) => void,
  ) {}

  /** Handle one key press; returns the action sent, if any. */
  handleKey(key: string): string | null {
    const action = this.store.bindings[key];
    if (!action) return null;
    if (!this.store.consumeAwaitWindow()) return null;
    const agentId = this.store.controlledAgent;
    if (agentId === null) return null;
    this.send(actionMessage(agentId, action));
    return action;
  }

  attach(target: { addEventListener(type: string, cb: (e: KeyboardEvent) => void): void }): void {
    target.addEventListener("keydown", (e: KeyboardEvent) => {
      if (this.handleKey(e.key) !== null) e.preventDefault?.();
    });
  }
}
