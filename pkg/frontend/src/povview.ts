// Tip-camera view: the target grid as seen from the nozzle, hit cells
// filled. The gateway projects the visible cells into camera-plane (x, y)
// for us; we just draw squares.

import type { UiSessionState } from "./state.js";

export class PovView {
  readonly canvas: HTMLCanvasElement;

  constructor(parent: HTMLElement, size = 300) {
    this.canvas = document.createElement("canvas");
    this.canvas.width = size;
    this.canvas.height = size;
    this.canvas.className = "pov-view";
    parent.appendChild(this.canvas);
  }

  render(state: UiSessionState) {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const { width: w, height: h } = this.canvas;
    ctx.fillStyle = "#0b0f14";
    ctx.fillRect(0, 0, w, h);

    const pov = state.frame?.pov;
    if (!pov || pov.length === 0) {
      ctx.fillStyle = "#5a6b80";
      ctx.fillText("no grid in view", 16, 24);
      return;
    }

    // fit the projected cells; keep aspect square
    let span = 1e-6;
    for (const cell of pov) span = Math.max(span, Math.abs(cell.x), Math.abs(cell.y));
    const scale = (Math.min(w, h) / 2 - 20) / span;
    // cell size on screen: distance between adjacent columns when we have it
    let cellPx = 16;
    const byRow = pov.filter((c) => c.r === pov[0].r).sort((a, b) => a.c - b.c);
    if (byRow.length > 1) {
      cellPx = Math.max(4, Math.abs(byRow[1].x - byRow[0].x) * scale * 0.92);
    }

    for (const cell of pov) {
      const x = w / 2 + cell.x * scale;
      const y = h / 2 - cell.y * scale;
      ctx.fillStyle = cell.hit ? "#4cc26e" : "#263342";
      ctx.fillRect(x - cellPx / 2, y - cellPx / 2, cellPx, cellPx);
      ctx.strokeStyle = "#10151c";
      ctx.strokeRect(x - cellPx / 2, y - cellPx / 2, cellPx, cellPx);
    }

    // aim reticle
    ctx.strokeStyle = "#e8b74c";
    ctx.lineWidth = 1;
    ctx.beginPath();
    ctx.moveTo(w / 2 - 8, h / 2);
    ctx.lineTo(w / 2 + 8, h / 2);
    ctx.moveTo(w / 2, h / 2 - 8);
    ctx.lineTo(w / 2, h / 2 + 8);
    ctx.stroke();
  }
}
