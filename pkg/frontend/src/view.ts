/** Render model: a pure function from view state to draw operations.
 *
 * No curation state lives here; everything drawn is something the server
 * sent. The canvas renderer just executes the returned list.
 */

import type { Annotation, SceneFrame } from "./protocol.js";
import type { TangiblePreset } from "./tangibles.js";

export type ConnectionState = "connecting" | "open" | "closed";

export interface DragState {
  fromX: number;
  fromY: number;
  x: number;
  y: number;
}

export interface ViewState {
  frame: SceneFrame | null;
  connection: ConnectionState;
  selected: TangiblePreset;
  drag: DragState | null;
}

export type DrawOp =
  | { kind: "background"; width: number; height: number }
  | { kind: "pathGuide"; cx: number; cy: number; radius: number }
  | { kind: "postit"; x: number; y: number; angle: number; text: string;
      entity: boolean; radius: number }
  | { kind: "link"; x1: number; y1: number; x2: number; y2: number }
  | { kind: "artifact"; x: number; y: number; w: number; h: number;
      stacked: boolean }
  | { kind: "ring"; x: number; y: number; radius: number; isolated: boolean }
  | { kind: "ringText"; x: number; y: number; radius: number; text: string;
      startAngle: number }
  | { kind: "utteranceStrip"; side: "top" | "right" | "bottom" | "left";
      texts: string[] }
  | { kind: "ghost"; x: number; y: number; w: number; h: number;
      shape: "cube" | "cylinder" }
  | { kind: "status"; text: string };

/** Canvas rotation that makes text readable from the given display side. */
export function orientationAngle(side: "top" | "right" | "bottom" | "left"): number {
  switch (side) {
    case "top": return Math.PI;        // upside down for a reader at the top edge
    case "right": return -Math.PI / 2;
    case "bottom": return 0;
    case "left": return Math.PI / 2;
  }
}

/** Evenly spread ring-text start angles so context entries share the circle. */
export function ringSlots(count: number): number[] {
  const slots: number[] = [];
  for (let i = 0; i < count; i++) {
    slots.push((2 * Math.PI * i) / Math.max(count, 1) - Math.PI / 2);
  }
  return slots;
}

function annotationOps(ann: Annotation): DrawOp[] {
  const ops: DrawOp[] = [];
  ops.push({ kind: "artifact", x: ann.x, y: ann.y, w: ann.w, h: ann.h,
             stacked: ann.isolated });
  ops.push({ kind: "ring", x: ann.x, y: ann.y, radius: ann.ring_radius_px,
             isolated: ann.isolated });
  const texts = [ann.primary.text, ...ann.context.map((c) => c.subject.text)];
  const slots = ringSlots(texts.length);
  texts.forEach((text, i) => {
    ops.push({ kind: "ringText", x: ann.x, y: ann.y,
               radius: ann.ring_radius_px, text, startAngle: slots[i]! });
  });
  return ops;
}

export function buildDrawList(state: ViewState, width: number,
                              height: number): DrawOp[] {
  const ops: DrawOp[] = [{ kind: "background", width, height }];
  if (state.connection !== "open") {
    ops.push({ kind: "status", text: `connection ${state.connection}` });
  }
  const frame = state.frame;
  if (frame === null) {
    return ops;
  }

  const cx = frame.display.width / 2;
  const cy = frame.display.height / 2;
  const minHalf = Math.min(frame.display.width, frame.display.height) / 2;
  ops.push({ kind: "pathGuide", cx, cy, radius: 0.62 * minHalf });
  ops.push({ kind: "pathGuide", cx, cy, radius: 0.8 * minHalf });

  const byId = new Map(frame.annotations.map((a) => [a.artifact_id, a]));
  for (const link of frame.links) {
    const a = byId.get(link.a);
    const b = byId.get(link.b);
    if (a && b) {
      ops.push({ kind: "link", x1: a.x, y1: a.y, x2: b.x, y2: b.y });
    }
  }
  for (const ann of frame.annotations) {
    ops.push(...annotationOps(ann));
  }
  for (const p of frame.postits) {
    ops.push({
      kind: "postit", x: p.x, y: p.y,
      angle: orientationAngle(p.orientation),
      text: p.subject.text,
      entity: p.subject.kind === "entity",
      radius: frame.display.postit_radius_px,
    });
  }
  const texts = frame.recent_utterances.map((u) => u.text);
  for (const side of ["top", "right", "bottom", "left"] as const) {
    ops.push({ kind: "utteranceStrip", side, texts });
  }
  if (state.drag !== null) {
    ops.push({ kind: "ghost", x: state.drag.x, y: state.drag.y,
               w: state.selected.w, h: state.selected.h,
               shape: state.selected.shape });
  }
  return ops;
}
