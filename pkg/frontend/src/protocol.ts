/** Wire protocol: one JSON object per WebSocket text frame, versioned. */

export const PROTOCOL_VERSION = 1;

export interface Subject {
  text: string;
  key: string;
  kind: "keyphrase" | "entity";
  token_count: number;
}

export interface PostIt {
  id: number;
  subject: Subject;
  utterance_id: number;
  path: number;
  x: number;
  y: number;
  theta: number;
  orientation: "top" | "right" | "bottom" | "left";
}

export interface ContextEntry {
  subject: Subject;
  utterance_id: number;
  postit_id: number;
}

export interface Annotation {
  artifact_id: number;
  x: number;
  y: number;
  w: number;
  h: number;
  height_mm: number;
  ring_radius_px: number;
  primary: Subject;
  primary_utterance: number;
  context: ContextEntry[];
  isolated: boolean;
}

export interface Link {
  a: number;
  b: number;
  supporting_utterances: number[];
}

export interface DisplayInfo {
  width: number;
  height: number;
  postit_radius_px: number;
}

export interface SceneFrame {
  type: "scene_frame";
  now: number;
  postits: PostIt[];
  annotations: Annotation[];
  links: Link[];
  recent_utterances: { id: number; text: string }[];
  display: DisplayInfo;
}

export interface DeltaMessage {
  type: "delta";
  at: number;
  kind: string;
  concurrent: boolean;
  artifact_id?: number;
  postit_id?: number;
  subject?: Subject;
  annotation?: Annotation & Record<string, unknown>;
  [extra: string]: unknown;
}

export interface HelloMessage {
  type: "hello";
  now: number;
  config: Record<string, unknown>;
}

export type ServerMessage =
  | HelloMessage
  | SceneFrame
  | DeltaMessage
  | { type: "utterance"; at: number; id: number; text: string }
  | { type: "spawn"; at: number; postit_id: number; subject: Subject }
  | { type: "expire"; at: number; postit_id: number }
  | { type: "metrics_tick"; [extra: string]: unknown }
  | { type: "error"; message: string };

const SERVER_TYPES = new Set([
  "hello", "scene_frame", "delta", "utterance", "spawn", "expire",
  "metrics_tick", "error",
]);

export type InteractOp = "place" | "move" | "remove";

export interface InteractCommand {
  op: InteractOp;
  x: number;
  y: number;
  w: number;
  h: number;
  height: number;
  from_x?: number;
  from_y?: number;
  participant?: string;
}

export function encodeInteract(cmd: InteractCommand): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, type: "interact", ...cmd });
}

export function encodeSay(text: string): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, type: "say", text });
}

export function encodeControl(action: "start_round" | "end_round"): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, type: "control", action });
}

export class ProtocolError extends Error {}

export function decodeServer(line: string): ServerMessage {
  let obj: unknown;
  try {
    obj = JSON.parse(line);
  } catch {
    throw new ProtocolError(`not valid JSON: ${line.slice(0, 80)}`);
  }
  if (typeof obj !== "object" || obj === null) {
    throw new ProtocolError("message is not an object");
  }
  const msg = obj as { v?: unknown; type?: unknown };
  if (msg.v !== PROTOCOL_VERSION) {
    throw new ProtocolError(`unsupported protocol version ${String(msg.v)}`);
  }
  if (typeof msg.type !== "string" || !SERVER_TYPES.has(msg.type)) {
    throw new ProtocolError(`unexpected message type ${String(msg.type)}`);
  }
  return obj as ServerMessage;
}
