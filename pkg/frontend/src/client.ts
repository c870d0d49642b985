/** Server connection: subscribes to frames and deltas, sends commands.
 *
 * The client is strictly server-authoritative: local actions only emit
 * `interact`/`say` messages; all visible state arrives back in frames.
 */

import {
  decodeServer, encodeControl, encodeInteract, encodeSay,
  type InteractCommand, type ServerMessage,
} from "./protocol.js";
import type { TangiblePreset } from "./tangibles.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  set onopen(h: (() => void) | null);
  set onclose(h: (() => void) | null);
  set onerror(h: ((err: unknown) => void) | null);
  set onmessage(h: ((ev: { data: unknown }) => void) | null);
}

export type SocketFactory = (url: string) => SocketLike;

type Handler = (msg: ServerMessage) => void;

export class EngineClient {
  private socket: SocketLike | null = null;
  private handlers = new Map<string, Handler[]>();
  private anyHandlers: Handler[] = [];
  participant: string;

  constructor(private url: string, private factory: SocketFactory,
              participant = "pointer") {
    this.participant = participant;
  }

  on(type: string, handler: Handler): void {
    const list = this.handlers.get(type) ?? [];
    list.push(handler);
    this.handlers.set(type, list);
  }

  onAny(handler: Handler): void {
    this.anyHandlers.push(handler);
  }

  connect(onOpen?: () => void, onClose?: () => void): void {
    const socket = this.factory(this.url);
    socket.onopen = () => onOpen?.();
    socket.onclose = () => onClose?.();
    socket.onerror = () => onClose?.();
    socket.onmessage = (ev) => {
      const msg = decodeServer(String(ev.data));
      for (const h of this.anyHandlers) h(msg);
      for (const h of this.handlers.get(msg.type) ?? []) h(msg);
    };
    this.socket = socket;
  }

  close(): void {
    this.socket?.close();
    this.socket = null;
  }

  private send(line: string): void {
    if (this.socket === null) {
      throw new Error("not connected");
    }
    this.socket.send(line);
  }

  say(text: string): void {
    this.send(encodeSay(text));
  }

  control(action: "start_round" | "end_round"): void {
    this.send(encodeControl(action));
  }

  private interact(cmd: InteractCommand): void {
    this.send(encodeInteract({ participant: this.participant, ...cmd }));
  }

  /** Set a virtual tangible down at (x, y). */
  placeTangible(x: number, y: number, t: TangiblePreset): void {
    this.interact({ op: "place", x, y, w: t.w, h: t.h, height: t.height_mm });
  }

  /** Drag something already on the table from one spot to another. */
  dragTangible(fromX: number, fromY: number, x: number, y: number,
               t: TangiblePreset): void {
    this.interact({ op: "move", x, y, from_x: fromX, from_y: fromY,
                    w: t.w, h: t.h, height: t.height_mm });
  }

  /** Lift a tangible off the table. */
  liftTangible(x: number, y: number, t: TangiblePreset): void {
    this.interact({ op: "remove", x, y, w: t.w, h: t.h, height: t.height_mm });
  }
}
