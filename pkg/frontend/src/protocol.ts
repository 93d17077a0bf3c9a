/** Wire types shared with the session server and replay files. */

export interface VocabEntry {
  c: number; // code
  n: string; // kind name
  g: string; // display glyph
  l: "G" | "A"; // layer
}

export interface ReplayHeader {
  v: number;
  env: string;
  config: Record<string, unknown>;
  vocab: VocabEntry[];
  h: number;
  w: number;
  n: number; // agent count
}

/** One recorded turn. Field names match the replay file format. */
export interface Frame {
  e: number; // epoch
  t: number; // turn
  g: number[]; // row-major ground codes, length h*w
  a: [number, number, number, string][]; // (agent_id, row, col, facing)
  act: [number, string][]; // (agent_id, action name)
  r: [number, number][]; // (agent_id, reward)
  s: [number, number][]; // (agent_id, score)
}

export type ServerMessage =
  | { type: "joined"; role: "human" | "spectator"; agent_id: number | null; header: ReplayHeader }
  | { type: "frame"; frame: Frame }
  | { type: "await_action"; agent_id: number; deadline_ms: number }
  | { type: "epoch_end"; metrics: Record<string, unknown> }
  | { type: "run_end" }
  | { type: "pong" }
  | { type: "error"; message: string };

export type ClientMessage =
  | { type: "join"; role: "human" | "spectator"; agent_id?: number }
  | { type: "action"; agent_id: number; action: string }
  | { type: "ping" };

export function joinMessage(role: "human" | "spectator", agentId?: number): ClientMessage {
  return role === "human"
    ? { type: "join", role, agent_id: agentId ?? 0 }
    : { type: "join", role };
}

export function actionMessage(agentId: number, action: string): ClientMessage {
  return { type: "action", agent_id: agentId, action };
}
