import { describe, expect, it } from "vitest";

import {
  PROTOCOL_VERSION, ProtocolError, decodeServer, encodeControl,
  encodeInteract, encodeSay,
} from "../src/protocol.js";

describe("client message encoding", () => {
  it("stamps the protocol version on every message", () => {
    for (const line of [
      encodeSay("hello"),
      encodeControl("start_round"),
      encodeInteract({ op: "place", x: 1, y: 2, w: 60, h: 60, height: 40 }),
    ]) {
      expect(JSON.parse(line).v).toBe(PROTOCOL_VERSION);
    }
  });

  it("carries move origins", () => {
    const msg = JSON.parse(encodeInteract({
      op: "move", x: 10, y: 20, w: 50, h: 50, height: 38,
      from_x: 1, from_y: 2,
    }));
    expect(msg.type).toBe("interact");
    expect(msg.from_x).toBe(1);
    expect(msg.from_y).toBe(2);
  });
});

describe("server message decoding", () => {
  it("round trips a delta", () => {
    const line = JSON.stringify({
      v: 1, type: "delta", at: 5, kind: "pinned", concurrent: false,
      postit_id: 3,
    });
    const msg = decodeServer(line);
    expect(msg.type).toBe("delta");
    if (msg.type === "delta") {
      expect(msg.kind).toBe("pinned");
    }
  });

  it("rejects the wrong version", () => {
    expect(() => decodeServer(JSON.stringify({ v: 9, type: "hello" })))
      .toThrow(ProtocolError);
  });

  it("rejects client types on the server channel", () => {
    expect(() => decodeServer(JSON.stringify({ v: 1, type: "interact" })))
      .toThrow(ProtocolError);
  });

  it("rejects non JSON", () => {
    expect(() => decodeServer("}{")).toThrow(ProtocolError);
  });
});
