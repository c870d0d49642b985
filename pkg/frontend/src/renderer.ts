/** Canvas executor for the draw list produced by the view model. */

import type { DrawOp } from "./view.js";

const POSTIT_FILL = "#fff9c4";
const ENTITY_FILL = "#c8e6c9";
const ARTIFACT_FILL = "#ff9800";
const RING_STROKE = "#555";
const LINK_STROKE = "#90a4ae";

export function render(ctx: CanvasRenderingContext2D, ops: DrawOp[],
                       scale: number): void {
  ctx.save();
  ctx.scale(scale, scale);
  for (const op of ops) {
    switch (op.kind) {
      case "background":
        ctx.fillStyle = "#263238";
        ctx.fillRect(0, 0, op.width, op.height);
        break;
      case "pathGuide":
        ctx.strokeStyle = "rgba(255,255,255,0.08)";
        ctx.lineWidth = 2;
        ctx.beginPath();
        ctx.arc(op.cx, op.cy, op.radius, 0, 2 * Math.PI);
        ctx.stroke();
        break;
      case "link":
        ctx.strokeStyle = LINK_STROKE;
        ctx.lineWidth = 3;
        ctx.beginPath();
        ctx.moveTo(op.x1, op.y1);
        ctx.lineTo(op.x2, op.y2);
        ctx.stroke();
        break;
      case "postit": {
        ctx.save();
        ctx.translate(op.x, op.y);
        ctx.rotate(op.angle);
        const r = op.radius;
        ctx.fillStyle = op.entity ? ENTITY_FILL : POSTIT_FILL;
        ctx.fillRect(-r, -r * 0.6, 2 * r, r * 1.2);
        ctx.fillStyle = "#333";
        ctx.font = "13px sans-serif";
        ctx.textAlign = "center";
        ctx.textBaseline = "middle";
        wrapText(ctx, op.text, 2 * r - 8, r * 1.2);
        ctx.restore();
        break;
      }
      case "artifact":
        ctx.fillStyle = ARTIFACT_FILL;
        ctx.fillRect(op.x - op.w / 2, op.y - op.h / 2, op.w, op.h);
        if (op.stacked) {
          ctx.fillStyle = "#e65100";
          ctx.fillRect(op.x - op.w / 3, op.y - op.h / 3,
                       (2 * op.w) / 3, (2 * op.h) / 3);
        }
        break;
      case "ring":
        ctx.strokeStyle = op.isolated ? "#e65100" : RING_STROKE;
        ctx.setLineDash(op.isolated ? [6, 6] : []);
        ctx.lineWidth = 2;
        ctx.beginPath();
        ctx.arc(op.x, op.y, op.radius, 0, 2 * Math.PI);
        ctx.stroke();
        ctx.setLineDash([]);
        break;
      case "ringText":
        drawRingText(ctx, op.x, op.y, op.radius + 12, op.text, op.startAngle);
        break;
      case "utteranceStrip":
        drawStrip(ctx, op.side, op.texts);
        break;
      case "ghost":
        ctx.strokeStyle = "rgba(255,255,255,0.6)";
        ctx.lineWidth = 2;
        if (op.shape === "cylinder") {
          ctx.beginPath();
          ctx.arc(op.x, op.y, op.w / 2, 0, 2 * Math.PI);
          ctx.stroke();
        } else {
          ctx.strokeRect(op.x - op.w / 2, op.y - op.h / 2, op.w, op.h);
        }
        break;
      case "status":
        ctx.fillStyle = "#ef9a9a";
        ctx.font = "20px sans-serif";
        ctx.textAlign = "left";
        ctx.fillText(op.text, 24, 36);
        break;
    }
  }
  ctx.restore();
}

function wrapText(ctx: CanvasRenderingContext2D, text: string,
                  maxWidth: number, boxHeight: number): void {
  const words = text.split(" ");
  const lines: string[] = [];
  let line = "";
  for (const word of words) {
    const probe = line ? `${line} ${word}` : word;
    if (ctx.measureText(probe).width > maxWidth && line) {
      lines.push(line);
      line = word;
    } else {
      line = probe;
    }
  }
  lines.push(line);
  const lineHeight = 15;
  const y0 = (-(lines.length - 1) * lineHeight) / 2;
  lines.forEach((l, i) => ctx.fillText(l, 0, y0 + i * lineHeight));
}

function drawRingText(ctx: CanvasRenderingContext2D, cx: number, cy: number,
                      radius: number, text: string, startAngle: number): void {
  ctx.save();
  ctx.fillStyle = "#eceff1";
  ctx.font = "12px sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  const step = 9 / radius; // radians per character, roughly
  for (let i = 0; i < text.length; i++) {
    const angle = startAngle + i * step;
    ctx.save();
    ctx.translate(cx + radius * Math.cos(angle), cy + radius * Math.sin(angle));
    ctx.rotate(angle + Math.PI / 2);
    ctx.fillText(text[i]!, 0, 0);
    ctx.restore();
  }
  ctx.restore();
}

function drawStrip(ctx: CanvasRenderingContext2D,
                   side: "top" | "right" | "bottom" | "left",
                   texts: string[]): void {
  const canvasW = ctx.canvas.width;
  const canvasH = ctx.canvas.height;
  ctx.save();
  ctx.fillStyle = "rgba(255,255,255,0.55)";
  ctx.font = "13px sans-serif";
  ctx.textAlign = "center";
  const joined = texts.join("   ·   ");
  switch (side) {
    case "bottom":
      ctx.fillText(joined, canvasW / 2, canvasH - 10);
      break;
    case "top":
      ctx.translate(canvasW / 2, 16);
      ctx.rotate(Math.PI);
      ctx.fillText(joined, 0, 0);
      break;
    case "left":
      ctx.translate(16, canvasH / 2);
      ctx.rotate(Math.PI / 2);
      ctx.fillText(joined, 0, 0);
      break;
    case "right":
      ctx.translate(canvasW - 16, canvasH / 2);
      ctx.rotate(-Math.PI / 2);
      ctx.fillText(joined, 0, 0);
      break;
  }
  ctx.restore();
}
