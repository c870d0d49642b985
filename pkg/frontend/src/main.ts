/** Browser entry point: canvas, pointer interactions, demo speech input. */

import { EngineClient, type SocketLike } from "./client.js";
import type { SceneFrame } from "./protocol.js";
import { DEFAULT_TANGIBLE, TANGIBLES } from "./tangibles.js";
import { render } from "./renderer.js";
import { buildDrawList, type ViewState } from "./view.js";

const params = new URLSearchParams(location.search);
const url = params.get("ws") ?? "ws://127.0.0.1:8765";

const canvas = document.getElementById("table") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const picker = document.getElementById("tangible") as HTMLSelectElement;
const sayBox = document.getElementById("say") as HTMLInputElement;
const sayButton = document.getElementById("say-go") as HTMLButtonElement;

for (const t of TANGIBLES) {
  const option = document.createElement("option");
  option.value = t.id;
  option.textContent = `${t.shape} ${t.w}×${t.h} (${t.height_mm} mm)`;
  picker.appendChild(option);
}
picker.value = DEFAULT_TANGIBLE.id;

const state: ViewState = {
  frame: null,
  connection: "connecting",
  selected: DEFAULT_TANGIBLE,
  drag: null,
};

const client = new EngineClient(
  url, (u) => new WebSocket(u) as unknown as SocketLike);
client.on("scene_frame", (msg) => {
  state.frame = msg as SceneFrame;
});
client.connect(
  () => { state.connection = "open"; },
  () => { state.connection = "closed"; },
);

picker.onchange = () => {
  state.selected = TANGIBLES.find((t) => t.id === picker.value) ?? DEFAULT_TANGIBLE;
};

function displayScale(): number {
  const w = state.frame?.display.width ?? 1920;
  return canvas.width / w;
}

function toDisplay(ev: MouseEvent): { x: number; y: number } {
  const rect = canvas.getBoundingClientRect();
  const scale = displayScale();
  return {
    x: (ev.clientX - rect.left) * (canvas.width / rect.width) / scale,
    y: (ev.clientY - rect.top) * (canvas.height / rect.height) / scale,
  };
}

let downAt: { x: number; y: number } | null = null;

canvas.onmousedown = (ev) => {
  downAt = toDisplay(ev);
};

canvas.onmousemove = (ev) => {
  if (downAt !== null) {
    const p = toDisplay(ev);
    state.drag = { fromX: downAt.x, fromY: downAt.y, x: p.x, y: p.y };
  }
};

canvas.onmouseup = (ev) => {
  const p = toDisplay(ev);
  if (downAt === null) return;
  const moved = Math.hypot(p.x - downAt.x, p.y - downAt.y) > 12;
  if (ev.shiftKey) {
    client.liftTangible(p.x, p.y, state.selected);
  } else if (moved) {
    client.dragTangible(downAt.x, downAt.y, p.x, p.y, state.selected);
  } else {
    client.placeTangible(p.x, p.y, state.selected);
  }
  downAt = null;
  state.drag = null;
};

canvas.oncontextmenu = (ev) => {
  ev.preventDefault();
  const p = toDisplay(ev);
  client.liftTangible(p.x, p.y, state.selected);
};

function speak(): void {
  const text = sayBox.value.trim();
  if (text) {
    client.say(text);
    sayBox.value = "";
  }
}
sayButton.onclick = speak;
sayBox.onkeydown = (ev) => {
  if (ev.key === "Enter") speak();
};

function frameLoop(): void {
  const ops = buildDrawList(state, state.frame?.display.width ?? 1920,
                            state.frame?.display.height ?? 1080);
  render(ctx, ops, displayScale());
  requestAnimationFrame(frameLoop);
}
frameLoop();
