/** Replay file parsing: line-delimited JSON, header first. */

import type { Frame, ReplayHeader } from "./protocol.js";

export const SUPPORTED_VERSION = 1;

export class ReplayParseError extends Error {
  readonly line: number;

  constructor(message: string, line: number) {
    super(`line ${line}: ${message}`);
    this.line = line;
  }
}

function parseLine(text: string, line: number): unknown {
  try {
    return JSON.parse(text);
  } catch (e) {
    throw new ReplayParseError(`not valid JSON (${(e as Error).message})`, line);
  }
}

export function parseReplay(text: string): { header: ReplayHeader; frames: Frame[] } {
  const lines = text.split("\n");
  if (lines.length && lines[lines.length - 1] === "") lines.pop();
  if (!lines.length) throw new ReplayParseError("empty replay file", 1);

  const head = parseLine(lines[0], 1) as Partial<ReplayHeader>;
  for (const field of ["v", "env", "vocab", "h", "w", "n"] as const) {
    if (head[field] === undefined) {
      throw new ReplayParseError(`header missing field '${field}'`, 1);
    }
  }
  if (head.v !== SUPPORTED_VERSION) {
    throw new ReplayParseError(
      `unsupported replay version ${head.v} (viewer supports ${SUPPORTED_VERSION})`, 1,
    );
  }
  const header = head as ReplayHeader;

  const frames: Frame[] = [];
  for (let i = 1; i < lines.length; i++) {
    const obj = parseLine(lines[i], i + 1) as Partial<Frame>;
    for (const field of ["e", "t", "g", "a", "act", "r", "s"] as const) {
      if (obj[field] === undefined) {
        throw new ReplayParseError(`frame missing field '${field}'`, i + 1);
      }
    }
    const frame = obj as Frame;
    if (frame.g.length !== header.h * header.w) {
      throw new ReplayParseError(
        `frame has ${frame.g.length} ground codes, header says ${header.h}x${header.w}`,
        i + 1,
      );
    }
    frames.push(frame);
  }
  return { header, frames };
}
